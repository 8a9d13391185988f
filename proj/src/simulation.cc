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

#include "ksubset/simulation.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <span>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ksubset/estimation.h"
#include "ksubset/information.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"
#include "ksubset/sampling.h"
#include "math_util.h"

namespace ksubset {

namespace {

struct PreparedMechanism {
  Mechanism mechanism;
  int64_t k;
  HitRates rates;
};

struct RepErrors {
  std::vector<double> l2_sq;
  std::vector<double> l1;
};

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (absl::StatusOr<PrivacyParams> p =
          PrivacyParams::Create(config.epsilon, config.d);
      !p.ok()) {
    return p.status();
  }
  if (config.n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n must be >= 1, got %d", config.n));
  }
  if (config.reps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("reps must be >= 1, got %d", config.reps));
  }
  if (config.mechanisms.empty()) {
    return absl::InvalidArgumentError("no mechanisms selected");
  }
  if (config.threads < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("threads must be >= 1, got %d", config.threads));
  }
  if (config.fixed_theta.has_value()) {
    const std::vector<double>& theta = *config.fixed_theta;
    if (static_cast<int64_t>(theta.size()) != config.d) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "theta has %d entries, expected d=%d", theta.size(), config.d));
    }
    internal::CompensatedSum total;
    for (double t : theta) {
      if (!(t >= 0.0)) {
        return absl::InvalidArgumentError("theta entries must be >= 0");
      }
      total.Add(t);
    }
    if (std::abs(total.Result() - 1.0) > 1e-9) {
      return absl::InvalidArgumentError(
          absl::StrFormat("theta sums to %.17g, not 1", total.Result()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PreparedMechanism> Prepare(Mechanism mechanism,
                                          const PrivacyParams& params,
                                          int64_t n) {
  absl::StatusOr<HitRates> rates;
  int64_t k = 0;
  switch (mechanism) {
    case Mechanism::kBrr:
      rates = HitRatesBrr(params);
      break;
    case Mechanism::kMrr:
      k = 1;
      rates = HitRatesMrr(params);
      break;
    case Mechanism::kKssMi:
      k = KStar(params).k;
      rates = HitRatesKSubset(params, k);
      break;
    case Mechanism::kKssL2:
      k = KSharp(params, n).k;
      rates = HitRatesKSubset(params, k);
      break;
  }
  if (!rates.ok()) return rates.status();
  return PreparedMechanism{mechanism, k, *rates};
}

int64_t SampleFromCdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it != cdf.end()) return it - cdf.begin();
  // u landed past a cdf that rounds to slightly below 1: take the last
  // symbol with positive mass.
  for (size_t j = cdf.size(); j-- > 0;) {
    if (j == 0 || cdf[j] > cdf[j - 1]) return static_cast<int64_t>(j);
  }
  return 0;
}

void RunRep(const ExperimentConfig& config, const PrivacyParams& params,
            const std::vector<PreparedMechanism>& prepared, int64_t rep,
            RepErrors& errors) {
  const int64_t d = config.d;
  const uint64_t r = static_cast<uint64_t>(rep);
  std::vector<double> theta;
  if (config.fixed_theta.has_value()) {
    theta = *config.fixed_theta;
  } else {
    RngStream theta_rng =
        RngStream::Derive(config.master_seed, {r, kThetaStream});
    theta = RandomTheta(d, theta_rng);
  }
  std::vector<double> cdf(theta.size());
  double running = 0.0;
  for (size_t j = 0; j < theta.size(); ++j) cdf[j] = (running += theta[j]);

  std::vector<int64_t> secrets(static_cast<size_t>(config.n));
  std::vector<uint64_t> histogram(static_cast<size_t>(d), 0);
  for (int64_t i = 0; i < config.n; ++i) {
    RngStream rng = RngStream::Derive(
        config.master_seed, {r, static_cast<uint64_t>(i), kSecretStream});
    const int64_t x = SampleFromCdf(cdf, rng.Uniform01());
    secrets[static_cast<size_t>(i)] = x;
    ++histogram[static_cast<size_t>(x)];
  }
  // Reference: the empirical distribution of the providers' secrets.
  std::vector<double> truth(static_cast<size_t>(d));
  for (int64_t j = 0; j < d; ++j) {
    truth[static_cast<size_t>(j)] =
        static_cast<double>(histogram[static_cast<size_t>(j)]) /
        static_cast<double>(config.n);
  }

  SubsetView view;
  for (const PreparedMechanism& m : prepared) {
    FrequencyAggregator aggregator(d);
    const uint64_t tag = kMechanismStreamBase + static_cast<uint64_t>(m.mechanism);
    for (int64_t i = 0; i < config.n; ++i) {
      RngStream rng = RngStream::Derive(
          config.master_seed, {r, static_cast<uint64_t>(i), tag});
      const int64_t x = secrets[static_cast<size_t>(i)];
      // Inputs were validated up front, so the randomizers cannot fail.
      switch (m.mechanism) {
        case Mechanism::kBrr:
          BrrRandomizeInto(x, params, rng, view).IgnoreError();
          aggregator.AddUnchecked(view.members);
          break;
        case Mechanism::kMrr: {
          const int64_t z = *MrrRandomize(x, params, rng);
          aggregator.AddUnchecked(std::span<const int64_t>(&z, 1));
          break;
        }
        case Mechanism::kKssMi:
        case Mechanism::kKssL2:
          KSubsetRandomizeInto(x, params, m.k, rng, view).IgnoreError();
          aggregator.AddUnchecked(view.members);
          break;
      }
    }
    DistributionEstimate estimate =
        *RemapEstimate(aggregator.frequencies(), m.rates);
    if (config.project) estimate = ProjectSimplex(estimate);
    internal::CompensatedSum l2;
    internal::CompensatedSum l1;
    for (int64_t j = 0; j < d; ++j) {
      const double diff = estimate.theta_hat[static_cast<size_t>(j)] -
                          truth[static_cast<size_t>(j)];
      l2.Add(diff * diff);
      l1.Add(std::abs(diff));
    }
    errors.l2_sq.push_back(l2.Result());
    errors.l1.push_back(l1.Result());
  }
}

void MeanAndStandardError(const std::vector<RepErrors>& per_rep, size_t slot,
                          bool use_l2, double& mean, double& se) {
  const double count = static_cast<double>(per_rep.size());
  internal::CompensatedSum sum;
  for (const RepErrors& e : per_rep) {
    sum.Add(use_l2 ? e.l2_sq[slot] : e.l1[slot]);
  }
  mean = sum.Result() / count;
  if (per_rep.size() < 2) {
    se = 0.0;
    return;
  }
  internal::CompensatedSum squares;
  for (const RepErrors& e : per_rep) {
    const double dev = (use_l2 ? e.l2_sq[slot] : e.l1[slot]) - mean;
    squares.Add(dev * dev);
  }
  se = std::sqrt(squares.Result() / (count - 1.0) / count);
}

std::string FormatEpsilon(double epsilon) {
  return absl::StrFormat("%.10g", epsilon);
}

}  // namespace

std::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kBrr:
      return "BRR";
    case Mechanism::kMrr:
      return "MRR";
    case Mechanism::kKssMi:
      return "KSS_MI";
    case Mechanism::kKssL2:
      return "KSS_L2";
  }
  return "?";
}

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name) {
  for (Mechanism m : kAllMechanisms) {
    if (MechanismName(m) == name) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mechanism \"", std::string(name), "\" (expected BRR, MRR, KSS_MI, KSS_L2)"));
}

const MechanismResult* ExperimentResult::Find(Mechanism mechanism) const {
  for (const MechanismResult& m : mechanisms) {
    if (m.mechanism == mechanism) return &m;
  }
  return nullptr;
}

std::vector<double> RandomTheta(int64_t d, RngStream& rng) {
  std::vector<double> theta(static_cast<size_t>(std::max<int64_t>(d, 0)));
  internal::CompensatedSum total;
  for (double& t : theta) {
    t = rng.Exponential();
    total.Add(t);
  }
  const double norm = total.Result();
  for (double& t : theta) t /= norm;
  return theta;
}

absl::StatusOr<ExperimentResult> RunExperiment(
    const ExperimentConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  const PrivacyParams params =
      *PrivacyParams::Create(config.epsilon, config.d);

  std::vector<PreparedMechanism> prepared;
  for (Mechanism m : config.mechanisms) {
    absl::StatusOr<PreparedMechanism> p = Prepare(m, params, config.n);
    if (!p.ok()) return p.status();
    prepared.push_back(*p);
  }

  std::vector<RepErrors> per_rep(static_cast<size_t>(config.reps));
  std::atomic<int64_t> next_rep{0};
  auto worker = [&]() {
    for (int64_t rep = next_rep++; rep < config.reps; rep = next_rep++) {
      RunRep(config, params, prepared, rep, per_rep[static_cast<size_t>(rep)]);
    }
  };
  const int threads =
      static_cast<int>(std::min<int64_t>(config.threads, config.reps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentResult result;
  result.d = config.d;
  result.epsilon = config.epsilon;
  result.n = config.n;
  result.reps = config.reps;
  result.master_seed = config.master_seed;
  for (size_t slot = 0; slot < prepared.size(); ++slot) {
    MechanismResult m;
    m.mechanism = prepared[slot].mechanism;
    m.k = prepared[slot].k;
    MeanAndStandardError(per_rep, slot, /*use_l2=*/true, m.mean_l2_sq,
                         m.se_l2_sq);
    MeanAndStandardError(per_rep, slot, /*use_l2=*/false, m.mean_l1, m.se_l1);
    result.mechanisms.push_back(m);
  }
  return result;
}

std::vector<GridRow> ReferenceGrid() {
  return {
      {2, 0.1},   {2, 1.0},   {4, 0.01},  {4, 0.1},   {4, 0.5},
      {4, 1.0},   {6, 0.01},  {6, 0.1},   {6, 0.5},   {6, 1.0},
      {8, 0.01},  {8, 0.1},   {8, 0.5},   {8, 1.0},   {8, 2.0},
      {16, 0.01}, {16, 0.1},  {16, 0.5},  {16, 1.0},  {16, 2.0},
      {16, 3.0},  {32, 0.01}, {32, 0.1},  {32, 1.0},  {32, 1.5},
      {32, 2.0},  {32, 3.0},  {64, 0.1},  {64, 0.5},  {64, 1.0},
      {64, 1.5},  {64, 2.0},  {64, 3.0},  {64, 5.0},  {128, 0.1},
      {128, 1.0}, {128, 3.0}, {128, 5.0}, {256, 1.0}, {256, 3.0},
      {256, 5.0},
  };
}

absl::StatusOr<GridRow> ParseGridRow(std::string_view spec) {
  const auto bad = [&]() {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad row spec \"", std::string(spec), "\" (expected e.g. d16e1.0)"));
  };
  if (spec.size() < 4 || spec.front() != 'd') return bad();
  const size_t e_pos = spec.find('e', 1);
  if (e_pos == std::string_view::npos) return bad();
  GridRow row{};
  const char* begin = spec.data() + 1;
  const char* mid = spec.data() + e_pos;
  const char* end = spec.data() + spec.size();
  auto [p1, ec1] = std::from_chars(begin, mid, row.d);
  if (ec1 != std::errc() || p1 != mid) return bad();
  auto [p2, ec2] = std::from_chars(mid + 1, end, row.epsilon);
  if (ec2 != std::errc() || p2 != end) return bad();
  if (absl::StatusOr<PrivacyParams> p =
          PrivacyParams::Create(row.epsilon, row.d);
      !p.ok()) {
    return p.status();
  }
  return row;
}

absl::StatusOr<std::vector<ExperimentResult>> TableGrid(
    const std::vector<GridRow>& rows, const ExperimentConfig& defaults) {
  std::vector<ExperimentResult> results;
  results.reserve(rows.size());
  for (const GridRow& row : rows) {
    ExperimentConfig config = defaults;
    config.d = row.d;
    config.epsilon = row.epsilon;
    config.mechanisms.assign(std::begin(kAllMechanisms),
                             std::end(kAllMechanisms));
    config.fixed_theta.reset();
    absl::StatusOr<ExperimentResult> r = RunExperiment(config);
    if (!r.ok()) return r.status();
    results.push_back(*std::move(r));
  }
  return results;
}

std::string ResultsCsv(const std::vector<ExperimentResult>& results) {
  std::string out =
      "d,epsilon,mechanism,k,mean_l2_sq,se_l2_sq,mean_l1,se_l1,reps,n,"
      "master_seed\n";
  for (const ExperimentResult& r : results) {
    for (const MechanismResult& m : r.mechanisms) {
      absl::StrAppend(
          &out, r.d, ",", FormatEpsilon(r.epsilon), ",",
          std::string(MechanismName(m.mechanism)), ",", m.k, ",",
          absl::StrFormat("%.17g,%.17g,%.17g,%.17g", m.mean_l2_sq, m.se_l2_sq,
                          m.mean_l1, m.se_l1),
          ",", r.reps, ",", r.n, ",", r.master_seed, "\n");
    }
  }
  return out;
}

std::string TableCsv(const std::vector<ExperimentResult>& results) {
  std::string out =
      "d,epsilon,l2_brr,l2_mrr,l2_kss_mi,l2_kss_l2,l1_brr,l1_mrr,l1_kss_mi,"
      "l1_kss_l2,k_star,k_sharp\n";
  for (const ExperimentResult& r : results) {
    absl::StrAppend(&out, r.d, ",", FormatEpsilon(r.epsilon));
    for (bool l2 : {true, false}) {
      for (Mechanism m : kAllMechanisms) {
        const MechanismResult* found = r.Find(m);
        absl::StrAppend(&out, ",");
        if (found != nullptr) {
          absl::StrAppend(&out, absl::StrFormat(
                                    "%.17g", l2 ? found->mean_l2_sq
                                                : found->mean_l1));
        }
      }
    }
    const MechanismResult* mi = r.Find(Mechanism::kKssMi);
    const MechanismResult* l2 = r.Find(Mechanism::kKssL2);
    absl::StrAppend(&out, ",", mi != nullptr ? absl::StrCat(mi->k) : "", ",",
                    l2 != nullptr ? absl::StrCat(l2->k) : "", "\n");
  }
  return out;
}

}  // namespace ksubset
