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

// Closed-form mutual information of the k-subset mechanism under a uniform
// prior, the optimal subset size, the binary randomized response series and
// the analytic upper bounds. All quantities are in nats.

#ifndef KSUBSET_INFORMATION_H_
#define KSUBSET_INFORMATION_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "ksubset/privacy_params.h"

namespace ksubset {

// A selected subset size together with the continuous optimizer it was
// bracketed from. `objective_value` is whatever the selector optimized
// (mutual information for KStar, analytic squared l2 error for KSharp).
struct SubsetSizeChoice {
  double beta = 0.0;
  int64_t k = 0;
  double objective_value = 0.0;
};

// I_k: mutual information between a uniform secret and the output of the
// k-subset mechanism. Defined for 0 <= k <= d; I_0 = I_d = 0.
absl::StatusOr<double> MutualInfoIk(const PrivacyParams& params, int64_t k);

// I_k with k extended to a real value in [0, d]. Concave in k.
double ContinuousMutualInfo(const PrivacyParams& params, double k);

// The unique stationary point of the continuous I_k on (0, d):
// (eps e^eps - e^eps + 1) d / (e^eps - 1)^2.
double BetaOptimal(const PrivacyParams& params);

// Mutual-information optimal subset size. Evaluates I_k at floor(beta) and
// ceil(beta) clamped into [1, d-1]; ties go to the smaller k.
SubsetSizeChoice KStar(const PrivacyParams& params);

// I_{k*}, the maximum mutual information over all eps-LDP mechanisms.
double MaxMutualInfo(const PrivacyParams& params);

// ln((e^eps - 1)/eps) + eps/(e^eps - 1) - 1. Upper bound on I_beta for every d.
double MutualInfoDomainFreeBound(double epsilon);

// eps^2 / 8.
double MutualInfoQuadraticBound(double epsilon);

struct BrrMutualInfo {
  // Exact series over output sizes.
  double value = 0.0;
  // (1 - (e^{eps(d-1)/2} + e^{-eps/2}) / (e^{eps/2} + 1)^d) * I_{k*}.
  double bound = 0.0;
};

// Mutual information of binary randomized response (per-bit flip probability
// 1/(e^{eps/2}+1)), summed over output sizes in log space. Returns
// OutOfRange if the series cannot be evaluated in double precision, and
// Internal if the series exceeds its bound.
absl::StatusOr<BrrMutualInfo> BrrMutualInformation(const PrivacyParams& params);

}  // namespace ksubset

#endif  // KSUBSET_INFORMATION_H_
