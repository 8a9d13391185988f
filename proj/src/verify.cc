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

#include "ksubset/verify.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ksubset/channels.h"
#include "ksubset/estimation.h"
#include "ksubset/information.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"
#include "ksubset/sampling.h"

namespace ksubset {

namespace {

constexpr double kEpsilonGrid[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
constexpr uint64_t kVerifySeed = 0x5EED5EEDULL;

class Tally {
 public:
  void Fail(std::string message) {
    ++failures_;
    if (messages_.size() < 5) messages_.push_back(std::move(message));
  }
  void Observe(double delta) { max_delta_ = std::max(max_delta_, delta); }
  void Count() { ++cases_; }

  CheckResult Finish(std::string name) const {
    CheckResult result;
    result.name = std::move(name);
    result.passed = failures_ == 0;
    if (result.passed) {
      result.detail = absl::StrFormat("%d cases, max delta %.3g", cases_,
                                      max_delta_);
    } else {
      result.detail = absl::StrFormat("%d of %d cases failed", failures_,
                                      cases_);
      for (const std::string& m : messages_) absl::StrAppend(&result.detail, "; ", m);
    }
    return result;
  }

 private:
  int64_t cases_ = 0;
  int64_t failures_ = 0;
  double max_delta_ = 0.0;
  std::vector<std::string> messages_;
};

PrivacyParams Params(double epsilon, int64_t d) {
  return *PrivacyParams::Create(epsilon, d);
}

CheckResult ClosedFormMutualInfo(int64_t max_d) {
  Tally tally;
  for (int64_t d = 2; d <= max_d; ++d) {
    for (double eps : kEpsilonGrid) {
      const PrivacyParams params = Params(eps, d);
      for (int64_t k = 1; k < d; ++k) {
        tally.Count();
        const double closed = *MutualInfoIk(params, k);
        absl::StatusOr<Channel> channel = KSubsetChannel(params, k);
        absl::StatusOr<double> brute =
            channel.ok() ? BruteForceMutualInfo(*channel)
                         : absl::StatusOr<double>(channel.status());
        if (!brute.ok()) {
          tally.Fail(absl::StrCat("d=", d, " eps=", eps, " k=", k, ": ",
                                  brute.status().message()));
          continue;
        }
        const double delta = std::abs(closed - *brute);
        tally.Observe(delta);
        if (delta > 1e-9) {
          tally.Fail(absl::StrFormat("d=%d eps=%g k=%d: I_k=%.12g brute=%.12g",
                                     d, eps, k, closed, *brute));
        }
      }
    }
  }
  return tally.Finish("closed_form_mi_vs_brute_force");
}

CheckResult BrrSeries(int64_t max_d) {
  Tally tally;
  for (int64_t d = 2; d <= max_d; ++d) {
    for (double eps : kEpsilonGrid) {
      tally.Count();
      const PrivacyParams params = Params(eps, d);
      absl::StatusOr<BrrMutualInfo> series = BrrMutualInformation(params);
      absl::StatusOr<Channel> channel = BrrChannel(params);
      if (!series.ok() || !channel.ok()) {
        tally.Fail(absl::StrCat("d=", d, " eps=", eps, ": evaluation failed"));
        continue;
      }
      const double brute = *BruteForceMutualInfo(*channel);
      const double delta = std::abs(series->value - brute);
      tally.Observe(delta);
      if (delta > 1e-9) {
        tally.Fail(absl::StrFormat("d=%d eps=%g: series=%.12g brute=%.12g", d,
                                   eps, series->value, brute));
      }
      if (!(series->value < MaxMutualInfo(params))) {
        tally.Fail(absl::StrFormat("d=%d eps=%g: BRR not dominated by I_k*",
                                   d, eps));
      }
    }
  }
  return tally.Finish("brr_series_vs_brute_force");
}

CheckResult AmortizationInvariance(int count) {
  Tally tally;
  constexpr double kEps[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < count; ++i) {
    tally.Count();
    const int64_t d = 3 + i % 2;
    const double eps = kEps[(i / 2) % 3];
    absl::StatusOr<StaircaseMechanism> mech = RandomValidStaircase(
        d, eps, RngStream::DeriveSeed(kVerifySeed, {static_cast<uint64_t>(i)}));
    if (!mech.ok()) {
      tally.Fail(absl::StrCat("generation failed: ", mech.status().message()));
      continue;
    }
    absl::StatusOr<StaircaseMechanism> amortized = Amortize(*mech);
    if (!amortized.ok()) {
      tally.Fail(absl::StrCat("amortize failed: ", amortized.status().message()));
      continue;
    }
    const Channel original = *InducedChannel(*mech);
    absl::StatusOr<Channel> flattened = InducedChannel(*amortized);
    absl::StatusOr<double> mi_flat =
        flattened.ok() ? BruteForceMutualInfo(*flattened)
                       : absl::StatusOr<double>(flattened.status());
    if (!mi_flat.ok()) {
      tally.Fail(absl::StrCat("amortized mechanism invalid: ",
                              mi_flat.status().message()));
      continue;
    }
    const double mi = *BruteForceMutualInfo(original);
    const double delta = std::abs(mi - *mi_flat);
    tally.Observe(delta);
    if (delta > 1e-9) {
      tally.Fail(absl::StrFormat("mechanism %d (d=%d eps=%g): MI %.12g -> %.12g",
                                 i, d, eps, mi, *mi_flat));
    }
    if (!ValidateLdp(original, eps).satisfied) {
      tally.Fail(absl::StrFormat("mechanism %d violates eps-LDP", i));
    }
    if (mi > MaxMutualInfo(Params(eps, d)) + 1e-9) {
      tally.Fail(absl::StrFormat("mechanism %d exceeds I_k*: %.12g", i, mi));
    }
  }
  return tally.Finish("amortization_invariance");
}

CheckResult BoundChain(int64_t max_d) {
  Tally tally;
  for (double eps : kEpsilonGrid) {
    const double domain_free = MutualInfoDomainFreeBound(eps);
    const double quadratic = MutualInfoQuadraticBound(eps);
    for (int64_t d = 2; d <= max_d; ++d) {
      tally.Count();
      const PrivacyParams params = Params(eps, d);
      const double max_mi = MaxMutualInfo(params);
      const double at_beta = ContinuousMutualInfo(params, BetaOptimal(params));
      const double m1 = at_beta - max_mi;
      const double m2 = domain_free - at_beta;
      const double m3 = quadratic - domain_free;
      tally.Observe(-std::min({m1, m2, m3}));
      if (m1 < -1e-12 || m2 < -1e-12 || m3 < -1e-12) {
        tally.Fail(absl::StrFormat(
            "d=%d eps=%g: I_k*=%.15g I_beta=%.15g bound=%.15g eps^2/8=%.15g", d,
            eps, max_mi, at_beta, domain_free, quadratic));
      }
    }
  }
  return tally.Finish("bound_chain");
}

CheckResult MixtureQuasiconcavity(int count) {
  Tally tally;
  RngStream rng = RngStream::Derive(kVerifySeed, {1});
  const auto draw_pair = [&rng](double& g, double& h) {
    do {
      g = rng.Uniform01();
      h = rng.Uniform01();
      if (h > g) std::swap(g, h);
    } while (!(g > h));
  };
  for (int i = 0; i < count; ++i) {
    tally.Count();
    double g1, h1, g2, h2;
    draw_pair(g1, h1);
    draw_pair(g2, h2);
    const double p = rng.Uniform01();
    const int64_t d = 2 + static_cast<int64_t>(rng.UniformInt(63));
    const double f1 = *MixtureL2Objective(g1, h1, d);
    const double f2 = *MixtureL2Objective(g2, h2, d);
    const double fm = *MixtureL2Objective(p * g1 + (1 - p) * g2,
                                          p * h1 + (1 - p) * h2, d);
    const double lower = std::min(f1, f2);
    const double slack = 1e-12 * std::max(1.0, std::abs(lower));
    tally.Observe(std::max(0.0, (lower - fm) / std::max(1.0, lower)));
    if (fm < lower - slack) {
      tally.Fail(absl::StrFormat("g=%.6g h=%.6g g'=%.6g h'=%.6g p=%.6g d=%d",
                                 g1, h1, g2, h2, p, d));
    }
  }
  return tally.Finish("mixture_quasiconcavity");
}

CheckResult SizeMixtureDominance(int count, const VerificationHooks& hooks) {
  Tally tally;
  RngStream rng = RngStream::Derive(kVerifySeed, {2});
  for (int i = 0; i < count; ++i) {
    const int64_t d = 2 + static_cast<int64_t>(rng.UniformInt(31));
    const double eps = kEpsilonGrid[rng.UniformInt(std::size(kEpsilonGrid))];
    const PrivacyParams params = Params(eps, d);
    SizeMixtureMechanism mech;
    mech.size_probs.resize(static_cast<size_t>(d + 1));
    mech.ratios.resize(static_cast<size_t>(d + 1));
    double total = 0.0;
    for (int64_t k = 0; k <= d; ++k) {
      const double w = rng.Exponential();
      mech.size_probs[static_cast<size_t>(k)] = w;
      total += w;
      mech.ratios[static_cast<size_t>(k)] =
          std::exp(eps * rng.Uniform01());
    }
    for (double& p : mech.size_probs) p /= total;
    absl::StatusOr<HitRates> rates = SizeMixtureHitRates(params, mech);
    if (!rates.ok()) continue;
    tally.Count();
    const double mixture = RemapL2Error(*rates, d, 1);

    const double beta = static_cast<double>(d) / (1.0 + std::exp(eps));
    double best = std::numeric_limits<double>::infinity();
    for (double c : {std::floor(beta), std::ceil(beta)}) {
      const int64_t k =
          std::clamp<int64_t>(static_cast<int64_t>(c), 1, d - 1);
      absl::StatusOr<HitRates> ks = hooks.ksubset_hit_rates(params, k);
      if (ks.ok()) best = std::min(best, RemapL2Error(*ks, d, 1));
    }
    tally.Observe(std::max(0.0, (best - mixture) / best));
    if (mixture < best * (1.0 - 1e-12)) {
      tally.Fail(absl::StrFormat(
          "d=%d eps=%g: mixture objective %.12g below k-subset %.12g", d, eps,
          mixture, best));
    }
  }
  return tally.Finish("size_mixture_dominance");
}

CheckResult HitRatesAgainstChannel(int64_t max_d,
                                   const VerificationHooks& hooks) {
  Tally tally;
  for (int64_t d = 2; d <= max_d; ++d) {
    for (double eps : kEpsilonGrid) {
      const PrivacyParams params = Params(eps, d);
      for (int64_t k = 1; k < d; ++k) {
        tally.Count();
        const Channel channel = *KSubsetChannel(params, k);
        // Secret 0: g sums columns containing 0, h those containing 1.
        double g = 0.0;
        double h = 0.0;
        for (int64_t z = 0; z < channel.num_outputs(); ++z) {
          const uint64_t label = channel.output_labels()[static_cast<size_t>(z)];
          if (label & 1U) g += channel.prob(0, z);
          if (label & 2U) h += channel.prob(0, z);
        }
        absl::StatusOr<HitRates> rates = hooks.ksubset_hit_rates(params, k);
        if (!rates.ok()) {
          tally.Fail(absl::StrCat("d=", d, " eps=", eps, " k=", k, ": ",
                                  rates.status().message()));
          continue;
        }
        const double delta =
            std::max(std::abs(g - rates->g()), std::abs(h - rates->h()));
        tally.Observe(delta);
        if (delta > 1e-12) {
          tally.Fail(absl::StrFormat(
              "d=%d eps=%g k=%d: channel (g,h)=(%.12g,%.12g) formula "
              "(%.12g,%.12g)",
              d, eps, k, g, h, rates->g(), rates->h()));
        }
      }
    }
  }
  return tally.Finish("hit_rates_vs_channel");
}

CheckResult EstimatorMonteCarlo(int64_t n, int64_t reps,
                                const VerificationHooks& hooks) {
  Tally tally;
  constexpr int64_t kD = 6;
  constexpr int64_t kK = 2;
  const PrivacyParams params = Params(1.0, kD);
  const std::vector<double> theta = {0.5, 0.3, 0.2, 0.0, 0.0, 0.0};
  absl::StatusOr<HitRates> rates = hooks.ksubset_hit_rates(params, kK);
  if (!rates.ok()) {
    tally.Fail(std::string(rates.status().message()));
    return tally.Finish("estimator_monte_carlo");
  }
  std::vector<double> cdf;
  double running = 0.0;
  for (double t : theta) cdf.push_back(running += t);

  std::vector<double> bias_sum(kD, 0.0);
  double sq_sum = 0.0;
  SubsetView view;
  for (int64_t r = 0; r < reps; ++r) {
    FrequencyAggregator aggregator(kD);
    std::vector<double> truth(kD, 0.0);
    RngStream rng = RngStream::Derive(kVerifySeed, {3, static_cast<uint64_t>(r)});
    for (int64_t i = 0; i < n; ++i) {
      const double u = rng.Uniform01();
      const int64_t x = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      truth[static_cast<size_t>(x)] += 1.0 / static_cast<double>(n);
      KSubsetRandomizeInto(x, params, kK, rng, view).IgnoreError();
      aggregator.AddUnchecked(view.members);
    }
    const DistributionEstimate est =
        *RemapEstimate(aggregator.frequencies(), *rates);
    for (int64_t j = 0; j < kD; ++j) {
      const double diff = est.theta_hat[static_cast<size_t>(j)] -
                          truth[static_cast<size_t>(j)];
      bias_sum[static_cast<size_t>(j)] += diff;
      sq_sum += diff * diff;
    }
  }
  const double g = rates->g();
  const double h = rates->h();
  const double gap2 = (g - h) * (g - h);
  for (int64_t j = 0; j < kD; ++j) {
    tally.Count();
    const double t = theta[static_cast<size_t>(j)];
    const double var = (t * g * (1 - g) + (1 - t) * h * (1 - h)) /
                       (static_cast<double>(n) * gap2);
    const double sigma = std::sqrt(var / static_cast<double>(reps));
    const double bias = bias_sum[static_cast<size_t>(j)] /
                        static_cast<double>(reps);
    tally.Observe(std::abs(bias) / sigma);
    if (std::abs(bias) > 4.0 * sigma) {
      tally.Fail(absl::StrFormat("coordinate %d: mean error %.4g exceeds 4 sigma "
                                 "(%.4g)",
                                 j, bias, sigma));
    }
  }
  tally.Count();
  const double empirical = sq_sum / static_cast<double>(reps);
  const double analytic = RemapL2Error(*rates, kD, n);
  const double rel = std::abs(empirical / analytic - 1.0);
  if (rel > 0.15) {
    tally.Fail(absl::StrFormat(
        "mean squared l2 %.5g vs analytic %.5g (%.1f%% off)", empirical,
        analytic, 100 * rel));
  }
  return tally.Finish("estimator_monte_carlo");
}

CheckResult KStarExhaustive(int64_t max_d) {
  Tally tally;
  for (int64_t d = 2; d <= max_d; ++d) {
    for (double eps : kEpsilonGrid) {
      tally.Count();
      const PrivacyParams params = Params(eps, d);
      int64_t best = 1;
      double best_value = -1.0;
      std::vector<double> values;
      for (int64_t k = 0; k <= d; ++k) {
        values.push_back(*MutualInfoIk(params, k));
        if (k >= 1 && k <= d - 1 && values.back() > best_value) {
          best_value = values.back();
          best = k;
        }
      }
      const auto peak = std::max_element(values.begin(), values.end());
      const bool unimodal =
          std::is_sorted(values.begin(), peak + 1) &&
          std::is_sorted(peak, values.end(), std::greater<>());
      if (!unimodal) {
        tally.Fail(absl::StrFormat("d=%d eps=%g: I_k not unimodal", d, eps));
      }
      const int64_t bracket = KStar(params).k;
      if (bracket != best) {
        tally.Fail(absl::StrFormat("d=%d eps=%g: exhaustive k=%d, bracket k=%d",
                                   d, eps, best, bracket));
      }
    }
  }
  return tally.Finish("kstar_bracket_exhaustive");
}

CheckResult KSharpExhaustive(int64_t max_d, const VerificationHooks& hooks) {
  Tally tally;
  for (int64_t d = 2; d <= max_d; ++d) {
    for (double eps : kEpsilonGrid) {
      tally.Count();
      const PrivacyParams params = Params(eps, d);
      int64_t best = 1;
      double best_value = std::numeric_limits<double>::infinity();
      for (int64_t k = 1; k < d; ++k) {
        absl::StatusOr<HitRates> rates = hooks.ksubset_hit_rates(params, k);
        if (!rates.ok()) continue;
        const double v = RemapL2Error(*rates, d, 1);
        if (v < best_value) {
          best_value = v;
          best = k;
        }
      }
      const int64_t bracket = KSharp(params, 1).k;
      if (bracket != best) {
        tally.Fail(absl::StrFormat("d=%d eps=%g: exhaustive k=%d, bracket k=%d",
                                   d, eps, best, bracket));
      }
    }
  }
  return tally.Finish("ksharp_bracket_exhaustive");
}

template <typename F>
CheckResult Timed(F&& check) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult result = check();
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

}  // namespace

bool VerificationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

VerificationReport RunVerification(VerifyLevel level,
                                   const VerificationHooks& hooks) {
  const bool deep = level == VerifyLevel::kDeep;
  VerificationReport report;
  report.checks.push_back(Timed([&] { return ClosedFormMutualInfo(deep ? 12 : 8); }));
  report.checks.push_back(Timed([&] { return BrrSeries(deep ? 14 : 10); }));
  report.checks.push_back(Timed([&] { return AmortizationInvariance(deep ? 1000 : 200); }));
  report.checks.push_back(Timed([&] { return BoundChain(deep ? 256 : 64); }));
  report.checks.push_back(
      Timed([&] { return MixtureQuasiconcavity(deep ? 1000000 : 100000); }));
  report.checks.push_back(
      Timed([&] { return SizeMixtureDominance(deep ? 10000 : 1000, hooks); }));
  report.checks.push_back(
      Timed([&] { return HitRatesAgainstChannel(deep ? 12 : 8, hooks); }));
  report.checks.push_back(Timed([&] {
    return deep ? EstimatorMonteCarlo(10000, 500, hooks)
                : EstimatorMonteCarlo(2000, 400, hooks);
  }));
  report.checks.push_back(Timed([&] { return KStarExhaustive(deep ? 256 : 64); }));
  report.checks.push_back(
      Timed([&] { return KSharpExhaustive(deep ? 256 : 64, hooks); }));
  return report;
}

}  // namespace ksubset
