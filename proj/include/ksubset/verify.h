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

// Oracle suite: every closed form checked against an independent route
// (explicit channels, brute-force mutual information, exhaustive scans,
// Monte Carlo). Backs the `verify` subcommand.

#ifndef KSUBSET_VERIFY_H_
#define KSUBSET_VERIFY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ksubset/estimation.h"
#include "ksubset/privacy_params.h"

namespace ksubset {

enum class VerifyLevel { kDefault, kDeep };

struct CheckResult {
  std::string name;
  bool passed = false;
  // Parameters and deltas of the first failures, or a summary on success.
  std::string detail;
  double seconds = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool ok() const;
};

// Replaceable pieces under test, so a deliberately broken implementation can
// be shown to trip the suite.
struct VerificationHooks {
  std::function<absl::StatusOr<HitRates>(const PrivacyParams&, int64_t)>
      ksubset_hit_rates = HitRatesKSubset;
};

VerificationReport RunVerification(VerifyLevel level,
                                   const VerificationHooks& hooks = {});

}  // namespace ksubset

#endif  // KSUBSET_VERIFY_H_
