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

#include "ksubset/estimation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ksubset/information.h"
#include "ksubset/privacy_params.h"
#include "ksubset/sampling.h"
#include "math_util.h"

namespace ksubset {

namespace {

using internal::CompensatedSum;

struct RawRates {
  double g;
  double h;
};

// Forms divided through by e^eps so that large eps stays finite.
RawRates KSubsetRates(double epsilon, int64_t d, int64_t k) {
  const double kr = static_cast<double>(k);
  const double rest = static_cast<double>(d - k);
  const double damp = std::exp(-epsilon);
  const double norm = kr + rest * damp;
  return {kr / norm, (kr * (kr - 1.0) + rest * kr * damp) /
                         (norm * static_cast<double>(d - 1))};
}

double L2Error(double g, double h, int64_t d, int64_t n) {
  if (!(g > h)) return std::numeric_limits<double>::infinity();
  const double gap = g - h;
  return (g * (1.0 - g) + static_cast<double>(d - 1) * h * (1.0 - h)) /
         (static_cast<double>(n) * gap * gap);
}

}  // namespace

absl::StatusOr<HitRates> HitRates::Create(double g, double h) {
  if (!(g > 0.0 && g <= 1.0) || !(h >= 0.0 && h < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "hit rates out of range: g=%.17g (need (0,1]), h=%.17g (need [0,1))",
        g, h));
  }
  if (!(g > h)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "hit rates must satisfy g > h, got g=%.17g, h=%.17g", g, h));
  }
  return HitRates(g, h);
}

absl::StatusOr<HitRates> HitRatesKSubset(const PrivacyParams& params,
                                         int64_t k) {
  if (k < 1 || k > params.d() - 1) {
    return absl::OutOfRangeError(absl::StrFormat(
        "subset size k=%d outside [1, %d]", k, params.d() - 1));
  }
  const RawRates r = KSubsetRates(params.epsilon(), params.d(), k);
  return HitRates::Create(r.g, r.h);
}

absl::StatusOr<HitRates> HitRatesMrr(const PrivacyParams& params) {
  const double damp = std::exp(-params.epsilon());
  const double norm = 1.0 + static_cast<double>(params.d() - 1) * damp;
  return HitRates::Create(1.0 / norm, damp / norm);
}

absl::StatusOr<HitRates> HitRatesBrr(const PrivacyParams& params) {
  const double half = 0.5 * params.epsilon();
  return HitRates::Create(1.0 / (1.0 + std::exp(-half)),
                          1.0 / (std::exp(half) + 1.0));
}

FrequencyAggregator::FrequencyAggregator(int64_t d) {
  freq_.counts.assign(static_cast<size_t>(std::max<int64_t>(d, 0)), 0);
}

absl::Status FrequencyAggregator::Add(const SubsetView& view) {
  for (int64_t j : view.members) {
    if (j < 0 || j >= d()) {
      return absl::OutOfRangeError(
          absl::StrFormat("view member %d outside [0, %d)", j, d()));
    }
  }
  AddUnchecked(view.members);
  return absl::OkStatus();
}

absl::Status FrequencyAggregator::AddSymbol(int64_t x) {
  if (x < 0 || x >= d()) {
    return absl::OutOfRangeError(
        absl::StrFormat("symbol %d outside [0, %d)", x, d()));
  }
  ++freq_.counts[static_cast<size_t>(x)];
  ++freq_.n;
  return absl::OkStatus();
}

absl::Status FrequencyAggregator::Merge(const FrequencyAggregator& other) {
  if (other.d() != d()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot merge frequencies over d=%d into d=%d", other.d(), d()));
  }
  for (size_t j = 0; j < freq_.counts.size(); ++j) {
    freq_.counts[j] += other.freq_.counts[j];
  }
  freq_.n += other.freq_.n;
  return absl::OkStatus();
}

absl::StatusOr<FrequencyVector> Aggregate(std::span<const SubsetView> views,
                                          int64_t d) {
  FrequencyAggregator aggregator(d);
  for (const SubsetView& view : views) {
    if (absl::Status s = aggregator.Add(view); !s.ok()) return s;
  }
  return aggregator.frequencies();
}

absl::StatusOr<DistributionEstimate> RemapEstimate(const FrequencyVector& freq,
                                                   const HitRates& rates) {
  if (freq.n == 0) {
    return absl::FailedPreconditionError("cannot estimate from zero views");
  }
  const double n = static_cast<double>(freq.n);
  const double offset = n * rates.h();
  const double scale = n * (rates.g() - rates.h());
  DistributionEstimate estimate;
  estimate.theta_hat.reserve(freq.counts.size());
  for (uint64_t count : freq.counts) {
    estimate.theta_hat.push_back((static_cast<double>(count) - offset) /
                                 scale);
  }
  return estimate;
}

std::vector<double> ProjectOntoSimplex(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  if (sorted.empty()) return sorted;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double threshold = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) threshold = candidate;
  }
  std::vector<double> projected(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    projected[i] = std::max(v[i] - threshold, 0.0);
  }
  return projected;
}

DistributionEstimate ProjectSimplex(const DistributionEstimate& estimate) {
  return {ProjectOntoSimplex(estimate.theta_hat), true};
}

double RemapL2Error(const HitRates& rates, int64_t d, int64_t n) {
  return L2Error(rates.g(), rates.h(), d, n);
}

absl::StatusOr<double> AnalyticL2Error(const PrivacyParams& params, int64_t k,
                                       int64_t n) {
  if (k < 1 || k > params.d() - 1) {
    return absl::OutOfRangeError(absl::StrFormat(
        "subset size k=%d outside [1, %d]", k, params.d() - 1));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need at least one provider, got n=%d", n));
  }
  const RawRates r = KSubsetRates(params.epsilon(), params.d(), k);
  return L2Error(r.g, r.h, params.d(), n);
}

SubsetSizeChoice KSharp(const PrivacyParams& params, int64_t n) {
  const int64_t d = params.d();
  const double beta =
      static_cast<double>(d) / (1.0 + std::exp(params.epsilon()));
  const int64_t lo = std::clamp<int64_t>(
      static_cast<int64_t>(std::floor(beta)), 1, d - 1);
  const int64_t hi = std::clamp<int64_t>(
      static_cast<int64_t>(std::ceil(beta)), 1, d - 1);
  const int64_t providers = std::max<int64_t>(n, 1);
  const RawRates r_lo = KSubsetRates(params.epsilon(), d, lo);
  const RawRates r_hi = KSubsetRates(params.epsilon(), d, hi);
  const double at_lo = L2Error(r_lo.g, r_lo.h, d, providers);
  const double at_hi = L2Error(r_hi.g, r_hi.h, d, providers);
  if (at_hi < at_lo) return {beta, hi, at_hi};
  return {beta, lo, at_lo};
}

absl::StatusOr<double> MixtureL2Objective(double g, double h, int64_t d) {
  if (!(h >= 0.0 && g <= 1.0 && h < g)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "mixture objective needs 0 <= h < g <= 1, got g=%.17g, h=%.17g", g,
        h));
  }
  const double gap = g - h;
  return (g * (1.0 - g) + h * (1.0 - h) * static_cast<double>(d)) /
         (gap * gap);
}

absl::StatusOr<HitRates> SizeMixtureHitRates(
    const PrivacyParams& params, const SizeMixtureMechanism& mechanism) {
  const int64_t d = params.d();
  const size_t sizes = static_cast<size_t>(d + 1);
  if (mechanism.size_probs.size() != sizes ||
      mechanism.ratios.size() != sizes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "size mixture needs %d size probabilities and ratios", sizes));
  }
  const double max_ratio = std::exp(params.epsilon()) * (1.0 + 1e-12);
  CompensatedSum total;
  for (size_t k = 0; k < sizes; ++k) {
    const double p = mechanism.size_probs[k];
    const double c = mechanism.ratios[k];
    if (!(p >= 0.0)) {
      return absl::InvalidArgumentError("size probabilities must be >= 0");
    }
    if (!(c >= 1.0 && c <= max_ratio)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "ratio C_%d=%.17g outside [1, e^eps]", k, c));
    }
    total.Add(p);
  }
  if (std::abs(total.Result() - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "size probabilities sum to %.17g, not 1", total.Result()));
  }
  CompensatedSum g;
  CompensatedSum h;
  const double dr = static_cast<double>(d);
  for (size_t k = 1; k < sizes; ++k) {
    const double kr = static_cast<double>(k);
    const double c = mechanism.ratios[k];
    const double norm = kr * c + dr - kr;
    g.Add(mechanism.size_probs[k] * kr * c / norm);
    h.Add(mechanism.size_probs[k] * (kr * c * (kr - 1.0) + (dr - kr) * kr) /
          (norm * (dr - 1.0)));
  }
  const double g_total = std::min(g.Result(), 1.0);
  const double h_total = std::min(h.Result(), 1.0);
  if (!(g_total > h_total)) {
    return absl::FailedPreconditionError(
        "size mixture carries no information about the secret (g == h)");
  }
  // h may reach 1 only together with g; excluded above.
  return HitRates::Create(g_total, h_total);
}

std::string EstimateToCsv(const DistributionEstimate& raw,
                          const DistributionEstimate* projected) {
  std::string out = "index,theta_hat_raw,theta_hat_projected\n";
  for (size_t j = 0; j < raw.theta_hat.size(); ++j) {
    absl::StrAppend(&out, j, ",", absl::StrFormat("%.17g", raw.theta_hat[j]),
                    ",");
    if (projected != nullptr && j < projected->theta_hat.size()) {
      absl::StrAppend(&out, absl::StrFormat("%.17g", projected->theta_hat[j]));
    }
    out += "\n";
  }
  return out;
}

}  // namespace ksubset
