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

#include "ksubset/privacy_params.h"

#include <cmath>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"

namespace ksubset {

absl::StatusOr<PrivacyParams> PrivacyParams::Create(double epsilon,
                                                    int64_t d) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive and finite, got %g",
                        epsilon));
  }
  if (d < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("domain size d must be at least 2, got %d", d));
  }
  return PrivacyParams(epsilon, d);
}

}  // namespace ksubset
