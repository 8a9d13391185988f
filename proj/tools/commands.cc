//
// Copyright 2026 The ksubset-ldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "commands.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "ksubset/estimation.h"
#include "ksubset/information.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"
#include "ksubset/sampling.h"
#include "ksubset/simulation.h"
#include "ksubset/verify.h"

namespace ksubset::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr char kSeedEnv[] = "KSUBSET_SEED";
constexpr char kThreadsEnv[] = "KSUBSET_THREADS";

std::string SchemaLine(std::string_view kind) {
  return absl::StrCat("# schema=ksubset.", std::string(kind), ".v1\n");
}

std::string Num(double v) { return absl::StrFormat("%.17g", v); }

// Error raised while reading user data (exit code 2).
struct DataError {
  std::string message;
};

int Report(std::ostream& err, ExitCode code, absl::string_view message) {
  err << "error: " << message << "\n";
  return code;
}

// Subset-view mechanisms accepted by randomize/estimate.
enum class ViewMechanism { kKss, kMrr, kBrr };

absl::StatusOr<ViewMechanism> ParseViewMechanism(const std::string& name) {
  if (name == "KSS") return ViewMechanism::kKss;
  if (name == "MRR") return ViewMechanism::kMrr;
  if (name == "BRR") return ViewMechanism::kBrr;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism \"", name, "\" (expected KSS, MRR, BRR)"));
}

// Resolves the subset size: explicit --k, otherwise the l2-optimal k.
absl::StatusOr<int64_t> ResolveK(const PrivacyParams& params,
                                 std::optional<int64_t> k) {
  if (!k.has_value()) return KSharp(params, 1).k;
  if (*k < 1 || *k > params.d() - 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "--k must lie in [1, %d], got %d", params.d() - 1, *k));
  }
  return *k;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  int64_t d = 0;
  double epsilon = 0.0;
  int64_t n = 10000;
  bool bits = false;
  bool json = false;
};

int Analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  absl::StatusOr<PrivacyParams> params = PrivacyParams::Create(opt.epsilon, opt.d);
  if (!params.ok()) return Report(err, kExitUsage, params.status().message());
  if (opt.n < 1) return Report(err, kExitUsage, "--n must be >= 1");

  const double unit = opt.bits ? std::log(2.0) : 1.0;
  const SubsetSizeChoice kstar = KStar(*params);
  const SubsetSizeChoice ksharp = KSharp(*params, opt.n);
  absl::StatusOr<BrrMutualInfo> brr = BrrMutualInformation(*params);

  std::vector<std::pair<std::string, std::string>> rows = {
      {"d", absl::StrCat(opt.d)},
      {"epsilon", absl::StrFormat("%.10g", opt.epsilon)},
      {"mi_unit", opt.bits ? "bits" : "nats"},
      {"beta", Num(kstar.beta)},
      {"k_star", absl::StrCat(kstar.k)},
      {"mi_k_star", Num(kstar.objective_value / unit)},
      {"l2_beta", Num(ksharp.beta)},
      {"k_sharp", absl::StrCat(ksharp.k)},
      {"n", absl::StrCat(opt.n)},
      {"l2_error_k_sharp", Num(ksharp.objective_value)},
      {"mi_domain_free_bound", Num(MutualInfoDomainFreeBound(opt.epsilon) / unit)},
      {"mi_quadratic_bound", Num(MutualInfoQuadraticBound(opt.epsilon) / unit)},
      {"brr_mi", brr.ok() ? Num(brr->value / unit) : ""},
      {"brr_mi_bound", brr.ok() ? Num(brr->bound / unit) : ""},
  };
  if (opt.json) {
    json doc;
    doc["schema"] = "ksubset.analyze.v1";
    doc["d"] = opt.d;
    doc["epsilon"] = opt.epsilon;
    doc["mi_unit"] = opt.bits ? "bits" : "nats";
    doc["beta"] = kstar.beta;
    doc["k_star"] = kstar.k;
    doc["mi_k_star"] = kstar.objective_value / unit;
    doc["l2_beta"] = ksharp.beta;
    doc["k_sharp"] = ksharp.k;
    doc["n"] = opt.n;
    doc["l2_error_k_sharp"] = ksharp.objective_value;
    doc["mi_domain_free_bound"] = MutualInfoDomainFreeBound(opt.epsilon) / unit;
    doc["mi_quadratic_bound"] = MutualInfoQuadraticBound(opt.epsilon) / unit;
    doc["brr_mi"] = brr.ok() ? json(brr->value / unit) : json(nullptr);
    doc["brr_mi_bound"] = brr.ok() ? json(brr->bound / unit) : json(nullptr);
    out << doc.dump(2) << "\n";
  } else {
    out << SchemaLine("analyze") << "quantity,value\n";
    for (const auto& [key, value] : rows) out << key << "," << value << "\n";
  }
  if (!brr.ok()) err << "warning: " << brr.status().message() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- randomize

struct RandomizeOptions {
  int64_t d = 0;
  double epsilon = 0.0;
  std::optional<int64_t> k;
  std::string mechanism = "KSS";
  std::string input = "-";
  std::string output = "-";
  uint64_t seed = 1;
};

// Reads one secret index per line; line i is randomized with stream
// Derive(seed, {i}).
int Randomize(const RandomizeOptions& opt, std::istream& stdin_stream,
              std::ostream& out, std::ostream& err) {
  absl::StatusOr<PrivacyParams> params = PrivacyParams::Create(opt.epsilon, opt.d);
  if (!params.ok()) return Report(err, kExitUsage, params.status().message());
  absl::StatusOr<ViewMechanism> mech = ParseViewMechanism(opt.mechanism);
  if (!mech.ok()) return Report(err, kExitUsage, mech.status().message());
  int64_t k = 1;
  if (*mech == ViewMechanism::kKss) {
    absl::StatusOr<int64_t> resolved = ResolveK(*params, opt.k);
    if (!resolved.ok()) return Report(err, kExitUsage, resolved.status().message());
    k = *resolved;
  } else if (opt.k.has_value()) {
    return Report(err, kExitUsage, "--k only applies to --mechanism KSS");
  }

  std::ifstream file;
  std::istream* in = &stdin_stream;
  if (opt.input != "-") {
    file.open(opt.input);
    if (!file) return Report(err, kExitData, "cannot open input " + opt.input);
    in = &file;
  }
  std::ofstream out_file;
  std::ostream* sink = &out;
  if (opt.output != "-") {
    out_file.open(opt.output, std::ios::binary | std::ios::trunc);
    if (!out_file) return Report(err, kExitData, "cannot open output " + opt.output);
    sink = &out_file;
  }

  std::string line;
  std::string buffer;
  SubsetView view;
  uint64_t index = 0;
  while (std::getline(*in, line)) {
    ++index;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int64_t x = 0;
    const auto [ptr, ec] =
        std::from_chars(line.data(), line.data() + line.size(), x);
    if (ec != std::errc() || ptr != line.data() + line.size() || line.empty()) {
      return Report(err, kExitData,
                    absl::StrFormat("line %d: not an integer: \"%s\"", index, line));
    }
    if (x < 0 || x >= opt.d) {
      return Report(err, kExitData,
                    absl::StrFormat("line %d: secret %d outside [0, %d)", index,
                                    x, opt.d));
    }
    RngStream rng = RngStream::Derive(opt.seed, {index - 1});
    switch (*mech) {
      case ViewMechanism::kKss:
        KSubsetRandomizeInto(x, *params, k, rng, view).IgnoreError();
        break;
      case ViewMechanism::kMrr:
        view.members.assign(1, *MrrRandomize(x, *params, rng));
        break;
      case ViewMechanism::kBrr:
        BrrRandomizeInto(x, *params, rng, view).IgnoreError();
        break;
    }
    AppendView(view, buffer);
    buffer.push_back('\n');
    if (buffer.size() > (1 << 20)) {
      sink->write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  sink->write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  sink->flush();
  if (!*sink) return Report(err, kExitData, "write failed");
  return kExitOk;
}

// --------------------------------------------------------------- estimate

struct EstimateOptions {
  int64_t d = 0;
  double epsilon = 0.0;
  std::optional<int64_t> k;
  std::string mechanism = "KSS";
  std::string views = "-";
  bool project = false;
  bool json = false;
};

int Estimate(const EstimateOptions& opt, std::istream& stdin_stream,
             std::ostream& out, std::ostream& err) {
  absl::StatusOr<PrivacyParams> params = PrivacyParams::Create(opt.epsilon, opt.d);
  if (!params.ok()) return Report(err, kExitUsage, params.status().message());
  absl::StatusOr<ViewMechanism> mech = ParseViewMechanism(opt.mechanism);
  if (!mech.ok()) return Report(err, kExitUsage, mech.status().message());

  absl::StatusOr<HitRates> rates;
  std::optional<int64_t> required_size;
  switch (*mech) {
    case ViewMechanism::kKss: {
      absl::StatusOr<int64_t> k = ResolveK(*params, opt.k);
      if (!k.ok()) return Report(err, kExitUsage, k.status().message());
      required_size = *k;
      rates = HitRatesKSubset(*params, *k);
      break;
    }
    case ViewMechanism::kMrr:
      required_size = 1;
      rates = HitRatesMrr(*params);
      break;
    case ViewMechanism::kBrr:
      rates = HitRatesBrr(*params);
      break;
  }
  if (opt.k.has_value() && *mech != ViewMechanism::kKss) {
    return Report(err, kExitUsage, "--k only applies to --mechanism KSS");
  }
  if (!rates.ok()) return Report(err, kExitUsage, rates.status().message());

  std::ifstream file;
  std::istream* in = &stdin_stream;
  if (opt.views != "-") {
    file.open(opt.views);
    if (!file) return Report(err, kExitData, "cannot open views " + opt.views);
    in = &file;
  }
  FrequencyAggregator aggregator(opt.d);
  std::string line;
  uint64_t index = 0;
  while (std::getline(*in, line)) {
    ++index;
    absl::StatusOr<SubsetView> view = ParseView(line, opt.d);
    if (!view.ok()) {
      return Report(err, kExitData,
                    absl::StrFormat("line %d: %s", index, view.status().message()));
    }
    if (required_size.has_value() &&
        static_cast<int64_t>(view->members.size()) != *required_size) {
      return Report(err, kExitData,
                    absl::StrFormat("line %d: view has %d members, expected %d",
                                    index, view->members.size(), *required_size));
    }
    aggregator.AddUnchecked(view->members);
  }
  absl::StatusOr<DistributionEstimate> raw =
      RemapEstimate(aggregator.frequencies(), *rates);
  if (!raw.ok()) return Report(err, kExitData, raw.status().message());
  std::optional<DistributionEstimate> projected;
  if (opt.project) projected = ProjectSimplex(*raw);

  if (opt.json) {
    json doc;
    doc["schema"] = "ksubset.estimate.v1";
    doc["n"] = aggregator.frequencies().n;
    json rows = json::array();
    for (size_t j = 0; j < raw->theta_hat.size(); ++j) {
      rows.push_back({{"index", j},
                      {"theta_hat_raw", raw->theta_hat[j]},
                      {"theta_hat_projected",
                       projected ? json(projected->theta_hat[j]) : json(nullptr)}});
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << "\n";
  } else {
    out << SchemaLine("estimate")
        << EstimateToCsv(*raw, projected ? &*projected : nullptr);
  }
  return kExitOk;
}

// ------------------------------------------------------ simulate and table

json ResultsJson(std::string_view kind,
                 const std::vector<ExperimentResult>& results) {
  json doc;
  doc["schema"] = absl::StrCat("ksubset.", std::string(kind), ".v1");
  json rows = json::array();
  for (const ExperimentResult& r : results) {
    for (const MechanismResult& m : r.mechanisms) {
      rows.push_back({{"d", r.d},
                      {"epsilon", r.epsilon},
                      {"mechanism", std::string(MechanismName(m.mechanism))},
                      {"k", m.k},
                      {"mean_l2_sq", m.mean_l2_sq},
                      {"se_l2_sq", m.se_l2_sq},
                      {"mean_l1", m.mean_l1},
                      {"se_l1", m.se_l1},
                      {"reps", r.reps},
                      {"n", r.n},
                      {"master_seed", r.master_seed}});
    }
  }
  doc["results"] = std::move(rows);
  return doc;
}

absl::StatusOr<std::vector<double>> ReadTheta(const std::string& path) {
  std::ifstream file(path);
  if (!file) return absl::NotFoundError("cannot open theta file " + path);
  std::vector<double> theta;
  std::string line;
  int64_t index = 0;
  while (std::getline(file, line)) {
    ++index;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("theta line %d: not a number: \"%s\"", index, line));
    }
    theta.push_back(v);
  }
  return theta;
}

struct SimulateOptions {
  int64_t d = 0;
  double epsilon = 0.0;
  int64_t n = 10000;
  int64_t reps = 100;
  std::vector<std::string> mechanisms;
  uint64_t seed = 1;
  int threads = 1;
  std::string theta_file;
  bool no_project = false;
  bool json = false;
};

int Simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  config.d = opt.d;
  config.epsilon = opt.epsilon;
  config.n = opt.n;
  config.reps = opt.reps;
  config.master_seed = opt.seed;
  config.threads = opt.threads;
  config.project = !opt.no_project;
  if (!opt.mechanisms.empty()) {
    config.mechanisms.clear();
    for (const std::string& name : opt.mechanisms) {
      absl::StatusOr<Mechanism> m = ParseMechanism(name);
      if (!m.ok()) return Report(err, kExitUsage, m.status().message());
      config.mechanisms.push_back(*m);
    }
  }
  if (!opt.theta_file.empty()) {
    absl::StatusOr<std::vector<double>> theta = ReadTheta(opt.theta_file);
    if (!theta.ok()) return Report(err, kExitData, theta.status().message());
    config.fixed_theta = *std::move(theta);
  }
  absl::StatusOr<ExperimentResult> result = RunExperiment(config);
  if (!result.ok()) {
    const ExitCode code = opt.theta_file.empty() ? kExitUsage : kExitData;
    return Report(err, code, result.status().message());
  }
  if (opt.json) {
    out << ResultsJson("simulate", {*result}).dump(2) << "\n";
  } else {
    out << SchemaLine("simulate") << ResultsCsv({*result});
  }
  return kExitOk;
}

struct TableOptions {
  std::vector<std::string> rows;
  int64_t n = 10000;
  int64_t reps = 100;
  uint64_t seed = 1;
  int threads = 1;
  double budget_seconds = 0.0;
  bool long_format = false;
  bool json = false;
};

int Table(const TableOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<GridRow> rows;
  if (opt.rows.empty()) {
    rows = ReferenceGrid();
  } else {
    for (const std::string& spec : opt.rows) {
      absl::StatusOr<GridRow> row = ParseGridRow(spec);
      if (!row.ok()) return Report(err, kExitUsage, row.status().message());
      rows.push_back(*row);
    }
  }
  ExperimentConfig defaults;
  defaults.n = opt.n;
  defaults.reps = opt.reps;
  defaults.master_seed = opt.seed;
  defaults.threads = opt.threads;

  const auto start = std::chrono::steady_clock::now();
  std::vector<ExperimentResult> results;
  for (size_t i = 0; i < rows.size(); ++i) {
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    if (opt.budget_seconds > 0.0 && elapsed >= opt.budget_seconds) {
      err << "note: time budget reached, skipped " << rows.size() - i
          << " of " << rows.size() << " rows\n";
      break;
    }
    absl::StatusOr<std::vector<ExperimentResult>> r = TableGrid({rows[i]}, defaults);
    if (!r.ok()) return Report(err, kExitUsage, r.status().message());
    results.push_back(std::move(r->front()));
  }
  if (opt.json) {
    out << ResultsJson("table", results).dump(2) << "\n";
  } else if (opt.long_format) {
    out << SchemaLine("simulate") << ResultsCsv(results);
  } else {
    out << SchemaLine("table") << TableCsv(results);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- verify

int Verify(const std::string& level, std::ostream& out, std::ostream& err) {
  VerifyLevel parsed;
  if (level == "default") {
    parsed = VerifyLevel::kDefault;
  } else if (level == "deep") {
    parsed = VerifyLevel::kDeep;
  } else {
    return Report(err, kExitUsage, "--level must be default or deep");
  }
  const VerificationReport report = RunVerification(parsed);
  out << SchemaLine("verify") << "check,status,seconds,detail\n";
  for (const CheckResult& c : report.checks) {
    out << c.name << "," << (c.passed ? "PASS" : "FAIL") << ","
        << absl::StrFormat("%.2f", c.seconds) << ",\"" << c.detail << "\"\n";
  }
  return report.ok() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"k-subset local differential privacy toolkit"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Optimal subset sizes, mutual information and error bounds");
  analyze_cmd->add_option("--d", analyze.d, "Domain size")->required();
  analyze_cmd->add_option("--eps", analyze.epsilon, "Privacy budget")->required();
  analyze_cmd->add_option("--n", analyze.n, "Providers for the l2 error");
  analyze_cmd->add_flag("--bits", analyze.bits, "Report information in bits");
  analyze_cmd->add_flag("--json", analyze.json, "JSON instead of CSV");

  RandomizeOptions randomize;
  CLI::App* randomize_cmd = app.add_subcommand(
      "randomize", "Privatize one secret index per line into views");
  randomize_cmd->add_option("--d", randomize.d, "Domain size")->required();
  randomize_cmd->add_option("--eps", randomize.epsilon, "Privacy budget")->required();
  randomize_cmd->add_option("--k", randomize.k, "Subset size (default: l2-optimal)");
  randomize_cmd->add_option("--mechanism", randomize.mechanism, "KSS, MRR or BRR");
  randomize_cmd->add_option("--input", randomize.input, "Secrets file, - for stdin");
  randomize_cmd->add_option("--output", randomize.output, "Views file, - for stdout");
  randomize_cmd->add_option("--seed", randomize.seed, "Master seed")->envname(kSeedEnv);

  EstimateOptions estimate;
  CLI::App* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate the secret distribution from views");
  estimate_cmd->add_option("--d", estimate.d, "Domain size")->required();
  estimate_cmd->add_option("--eps", estimate.epsilon, "Privacy budget")->required();
  estimate_cmd->add_option("--k", estimate.k, "Subset size (default: l2-optimal)");
  estimate_cmd->add_option("--mechanism", estimate.mechanism, "KSS, MRR or BRR");
  estimate_cmd->add_option("--views", estimate.views, "Views file, - for stdin");
  estimate_cmd->add_flag("--project", estimate.project, "Also project onto the simplex");
  estimate_cmd->add_flag("--json", estimate.json, "JSON instead of CSV");

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Monte Carlo estimation error for one (d, eps) cell");
  simulate_cmd->add_option("--d", simulate.d, "Domain size")->required();
  simulate_cmd->add_option("--eps", simulate.epsilon, "Privacy budget")->required();
  simulate_cmd->add_option("--n", simulate.n, "Providers per repetition");
  simulate_cmd->add_option("--reps", simulate.reps, "Repetitions");
  simulate_cmd->add_option("--mechanisms", simulate.mechanisms,
                           "Subset of BRR MRR KSS_MI KSS_L2")
      ->delimiter(',');
  simulate_cmd->add_option("--seed", simulate.seed, "Master seed")->envname(kSeedEnv);
  simulate_cmd->add_option("--threads", simulate.threads, "Worker threads")
      ->envname(kThreadsEnv);
  simulate_cmd->add_option("--theta", simulate.theta_file,
                           "Fixed true distribution, one probability per line");
  simulate_cmd->add_flag("--no-project", simulate.no_project,
                         "Measure error before simplex projection");
  simulate_cmd->add_flag("--json", simulate.json, "JSON instead of CSV");

  TableOptions table;
  CLI::App* table_cmd = app.add_subcommand(
      "table", "Run rows of the reference comparison grid");
  table_cmd->add_option("--rows", table.rows, "Row specs such as d16e1.0")
      ->delimiter(',');
  table_cmd->add_option("--n", table.n, "Providers per repetition");
  table_cmd->add_option("--reps", table.reps, "Repetitions");
  table_cmd->add_option("--seed", table.seed, "Master seed")->envname(kSeedEnv);
  table_cmd->add_option("--threads", table.threads, "Worker threads")
      ->envname(kThreadsEnv);
  table_cmd->add_option("--budget", table.budget_seconds,
                        "Stop starting new rows after this many seconds");
  table_cmd->add_flag("--long", table.long_format,
                      "One line per mechanism (simulate schema)");
  table_cmd->add_flag("--json", table.json, "JSON instead of CSV");

  std::string level = "default";
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the closed-form vs oracle checks");
  verify_cmd->add_option("--level", level, "default or deep");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) {
      err << app.help();
    } else {
      err << app.get_subcommands().front()->help();
    }
    return kExitUsage;
  }

  if (*analyze_cmd) return Analyze(analyze, out, err);
  if (*randomize_cmd) return Randomize(randomize, in, out, err);
  if (*estimate_cmd) return Estimate(estimate, in, out, err);
  if (*simulate_cmd) return Simulate(simulate, out, err);
  if (*table_cmd) return Table(table, out, err);
  if (*verify_cmd) return Verify(level, out, err);
  return kExitUsage;
}

}  // namespace ksubset::cli
