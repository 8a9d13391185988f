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

#include "ksubset/information.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "ksubset/privacy_params.h"
#include "math_util.h"

namespace ksubset {

namespace {

using internal::CompensatedSum;
using internal::LogAddExp;

// Evaluated as p_in (ln d + eps - L) + p_out (ln d - L) with
// L = ln(k e^eps + d - k), which stays finite for any eps.
double MutualInfoUnchecked(double epsilon, double d, double k) {
  if (k <= 0.0 || k >= d) return 0.0;
  const double log_d = std::log(d);
  const double log_in = std::log(k) + epsilon;
  const double log_out = std::log(d - k);
  const double log_norm = LogAddExp(log_in, log_out);
  const double p_in = std::exp(log_in - log_norm);
  const double p_out = std::exp(log_out - log_norm);
  return p_in * (log_d + epsilon - log_norm) + p_out * (log_d - log_norm);
}

}  // namespace

absl::StatusOr<double> MutualInfoIk(const PrivacyParams& params, int64_t k) {
  if (k < 0 || k > params.d()) {
    return absl::OutOfRangeError(
        absl::StrFormat("subset size k=%d outside [0, %d]", k, params.d()));
  }
  return MutualInfoUnchecked(params.epsilon(),
                             static_cast<double>(params.d()),
                             static_cast<double>(k));
}

double ContinuousMutualInfo(const PrivacyParams& params, double k) {
  const double d = static_cast<double>(params.d());
  return MutualInfoUnchecked(params.epsilon(), d, std::clamp(k, 0.0, d));
}

double BetaOptimal(const PrivacyParams& params) {
  const double eps = params.epsilon();
  const double d = static_cast<double>(params.d());
  if (eps < 1.0) {
    const double em1 = std::expm1(eps);
    return (eps * std::exp(eps) - em1) * d / (em1 * em1);
  }
  // Divide through by e^{2 eps} so large eps does not overflow.
  const double q = -std::expm1(-eps);
  return d * (eps - 1.0 + std::exp(-eps)) * std::exp(-eps) / (q * q);
}

SubsetSizeChoice KStar(const PrivacyParams& params) {
  const double beta = BetaOptimal(params);
  const int64_t d = params.d();
  const int64_t lo = std::clamp<int64_t>(
      static_cast<int64_t>(std::floor(beta)), 1, d - 1);
  const int64_t hi = std::clamp<int64_t>(
      static_cast<int64_t>(std::ceil(beta)), 1, d - 1);
  const double d_real = static_cast<double>(d);
  const double at_lo =
      MutualInfoUnchecked(params.epsilon(), d_real, static_cast<double>(lo));
  const double at_hi =
      MutualInfoUnchecked(params.epsilon(), d_real, static_cast<double>(hi));
  if (at_hi > at_lo) return {beta, hi, at_hi};
  return {beta, lo, at_lo};
}

double MaxMutualInfo(const PrivacyParams& params) {
  return KStar(params).objective_value;
}

double MutualInfoDomainFreeBound(double epsilon) {
  if (epsilon < 0.1) {
    // The closed form cancels to O(eps^2) from O(eps) terms; the Taylor
    // series truncated after eps^8 is exact to double precision here.
    const double e2 = epsilon * epsilon;
    return e2 * (1.0 / 8 + e2 * (-1.0 / 576 + e2 * (1.0 / 25920 -
                                                    e2 / 1075200)));
  }
  const double em1 = std::expm1(epsilon);
  return std::log(em1 / epsilon) + epsilon / em1 - 1.0;
}

double MutualInfoQuadraticBound(double epsilon) {
  return epsilon * epsilon / 8.0;
}

absl::StatusOr<BrrMutualInfo> BrrMutualInformation(
    const PrivacyParams& params) {
  const double eps = params.epsilon();
  const int64_t d = params.d();
  const double d_real = static_cast<double>(d);
  const double half = 0.5 * eps;
  // ln(e^{eps/2} + 1)
  const double log_flip_norm = half + std::log1p(std::exp(-half));
  const double log_d = std::log(d_real);

  CompensatedSum series;
  for (int64_t k = 1; k < d; ++k) {
    const double kr = static_cast<double>(k);
    const double log_weight =
        internal::LogBinomial(d, k) + half * (d_real - kr - 1.0) +
        LogAddExp(std::log(kr) + eps, std::log(d_real - kr)) -
        d_real * log_flip_norm - log_d;
    series.Add(std::exp(log_weight) *
               MutualInfoUnchecked(eps, d_real, kr));
  }
  BrrMutualInfo result;
  result.value = series.Result();

  const double excluded =
      std::exp(half * (d_real - 1.0) - d_real * log_flip_norm) +
      std::exp(-half - d_real * log_flip_norm);
  result.bound = (1.0 - excluded) * MaxMutualInfo(params);

  if (!std::isfinite(result.value) || !std::isfinite(result.bound)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "BRR mutual information not representable at d=%d, eps=%g", d, eps));
  }
  if (result.value > result.bound * (1.0 + 1e-12) + 1e-300) {
    return absl::InternalError(absl::StrFormat(
        "BRR series %.17g exceeds its bound %.17g at d=%d, eps=%g",
        result.value, result.bound, d, eps));
  }
  return result;
}

}  // namespace ksubset
