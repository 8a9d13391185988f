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

// Frequency aggregation and the remapping estimator shared by every
// mechanism whose view is a subset of the domain, together with the analytic
// squared-l2 error, the l2-optimal subset size, simplex projection and the
// size-mixture machinery used to compare power-set mechanisms.

#ifndef KSUBSET_ESTIMATION_H_
#define KSUBSET_ESTIMATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ksubset/information.h"
#include "ksubset/privacy_params.h"
#include "ksubset/sampling.h"

namespace ksubset {

// g: probability the view contains the true symbol. h: probability it
// contains a fixed other symbol. Requires 0 < g <= 1, 0 <= h < 1, g > h.
class HitRates {
 public:
  static absl::StatusOr<HitRates> Create(double g, double h);

  double g() const { return g_; }
  double h() const { return h_; }

 private:
  HitRates(double g, double h) : g_(g), h_(h) {}
  double g_;
  double h_;
};

// g_k = k e^eps / (k e^eps + d - k),
// h_k = (k e^eps (k-1) + (d-k) k) / ((k e^eps + d - k)(d-1)).
absl::StatusOr<HitRates> HitRatesKSubset(const PrivacyParams& params,
                                         int64_t k);
absl::StatusOr<HitRates> HitRatesMrr(const PrivacyParams& params);
absl::StatusOr<HitRates> HitRatesBrr(const PrivacyParams& params);

struct FrequencyVector {
  std::vector<uint64_t> counts;
  uint64_t n = 0;
};

// Single-pass counter; shards over disjoint views merge by addition.
class FrequencyAggregator {
 public:
  explicit FrequencyAggregator(int64_t d);

  absl::Status Add(const SubsetView& view);
  absl::Status AddSymbol(int64_t x);
  absl::Status Merge(const FrequencyAggregator& other);

  // Skips range checks; members must lie in [0, d).
  void AddUnchecked(std::span<const int64_t> members) {
    for (int64_t j : members) ++freq_.counts[static_cast<size_t>(j)];
    ++freq_.n;
  }

  int64_t d() const { return static_cast<int64_t>(freq_.counts.size()); }
  const FrequencyVector& frequencies() const { return freq_; }

 private:
  FrequencyVector freq_;
};

absl::StatusOr<FrequencyVector> Aggregate(std::span<const SubsetView> views,
                                          int64_t d);

struct DistributionEstimate {
  std::vector<double> theta_hat;
  bool projected = false;
};

// theta_j = (f_j - n h) / (n (g - h)). Unbiased; may leave the simplex.
absl::StatusOr<DistributionEstimate> RemapEstimate(const FrequencyVector& freq,
                                                   const HitRates& rates);

// Euclidean projection onto {p >= 0, sum p = 1} by sorting and
// thresholding, O(d log d).
std::vector<double> ProjectOntoSimplex(std::span<const double> v);
DistributionEstimate ProjectSimplex(const DistributionEstimate& estimate);

// Expected squared l2 error of the remapping estimator for a mechanism with
// the given hit rates: (g(1-g) + (d-1) h(1-h)) / (n (g-h)^2). Does not
// depend on the true distribution.
double RemapL2Error(const HitRates& rates, int64_t d, int64_t n);

// RemapL2Error for the k-subset mechanism.
absl::StatusOr<double> AnalyticL2Error(const PrivacyParams& params, int64_t k,
                                       int64_t n);

// l2-optimal subset size: compares AnalyticL2Error at floor and ceil of
// d / (1 + e^eps), clamped into [1, d-1]; ties go to the smaller k.
// `beta` holds d / (1 + e^eps).
SubsetSizeChoice KSharp(const PrivacyParams& params, int64_t n);

// f(g, h) = (g(1-g) + h(1-h) d) / (g-h)^2. Quasiconcave along segments:
// f at a convex combination is at least the smaller endpoint value.
absl::StatusOr<double> MixtureL2Objective(double g, double h, int64_t d);

// Power-set mechanism that picks an output size k with probability
// size_probs[k] (k = 0..d) and, within size k, weighs subsets containing the
// true symbol by ratios[k] in [1, e^eps] relative to those that do not.
struct SizeMixtureMechanism {
  std::vector<double> size_probs;
  std::vector<double> ratios;
};

// Hit rates of a size-mixture mechanism: g = sum_k P_k g'_k, h = sum_k P_k
// h'_k with g'_k = k C_k / (k C_k + d - k) and
// h'_k = (k C_k (k-1) + (d-k) k) / ((k C_k + d - k)(d-1)). Returns
// FailedPrecondition if g == h (no information; estimator undefined).
absl::StatusOr<HitRates> SizeMixtureHitRates(
    const PrivacyParams& params, const SizeMixtureMechanism& mechanism);

// CSV with columns index,theta_hat_raw,theta_hat_projected. The projected
// column is left empty when `projected` is null.
std::string EstimateToCsv(const DistributionEstimate& raw,
                          const DistributionEstimate* projected);

}  // namespace ksubset

#endif  // KSUBSET_ESTIMATION_H_
