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

#include <chrono>
#include <cmath>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "ksubset/estimation.h"
#include "ksubset/privacy_params.h"

namespace ksubset {
namespace {

std::set<std::string> FailedChecks(const VerificationReport& report) {
  std::set<std::string> failed;
  for (const CheckResult& c : report.checks) {
    if (!c.passed) failed.insert(c.name);
  }
  return failed;
}

TEST(VerifyTest, DefaultLevelPassesQuickly) {
  const auto start = std::chrono::steady_clock::now();
  const VerificationReport report = RunVerification(VerifyLevel::kDefault);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(FailedChecks(report).empty());
  EXPECT_GE(report.checks.size(), 10u);
  EXPECT_LT(seconds, 60.0);
}

TEST(VerifyTest, DeepLevelPasses) {
  const VerificationReport report = RunVerification(VerifyLevel::kDeep);
  EXPECT_TRUE(report.ok());
  for (const CheckResult& c : report.checks) {
    EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  }
}

TEST(VerifyTest, OffByOneInOtherHitRateIsCaught) {
  VerificationHooks hooks;
  // (k - 1) replaced by k in the numerator of h_k.
  hooks.ksubset_hit_rates = [](const PrivacyParams& p,
                               int64_t k) -> absl::StatusOr<HitRates> {
    const double e = std::exp(p.epsilon());
    const double d = static_cast<double>(p.d());
    const double kr = static_cast<double>(k);
    const double norm = kr * e + d - kr;
    const double g = kr * e / norm;
    const double h = (kr * e * kr + (d - kr) * kr) / (norm * (d - 1));
    return HitRates::Create(g, std::min(h, std::nextafter(g, 0.0)));
  };
  const std::set<std::string> failed =
      FailedChecks(RunVerification(VerifyLevel::kDefault, hooks));
  EXPECT_TRUE(failed.count("hit_rates_vs_channel"));
  EXPECT_TRUE(failed.count("estimator_monte_carlo"));
  EXPECT_TRUE(failed.count("size_mixture_dominance"));
  EXPECT_TRUE(failed.count("ksharp_bracket_exhaustive"));
  EXPECT_FALSE(failed.count("closed_form_mi_vs_brute_force"));
}

TEST(VerifyTest, ScaledOwnHitRateIsCaught) {
  VerificationHooks hooks;
  hooks.ksubset_hit_rates = [](const PrivacyParams& p,
                               int64_t k) -> absl::StatusOr<HitRates> {
    absl::StatusOr<HitRates> r = HitRatesKSubset(p, k);
    if (!r.ok()) return r;
    return HitRates::Create(r->g() * 0.97 + 0.03 * r->h(), r->h());
  };
  const std::set<std::string> failed =
      FailedChecks(RunVerification(VerifyLevel::kDefault, hooks));
  EXPECT_TRUE(failed.count("hit_rates_vs_channel"));
  EXPECT_TRUE(failed.count("estimator_monte_carlo"));
}

}  // namespace
}  // namespace ksubset
