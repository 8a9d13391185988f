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

#ifndef KSUBSET_PRIVACY_PARAMS_H_
#define KSUBSET_PRIVACY_PARAMS_H_

#include <cstdint>

#include "absl/status/statusor.h"

namespace ksubset {

// Privacy budget and domain size. Every closed form in the library is a
// function of this pair. Construct through Create(), which enforces
// epsilon > 0 (finite) and d >= 2.
class PrivacyParams {
 public:
  static absl::StatusOr<PrivacyParams> Create(double epsilon, int64_t d);

  double epsilon() const { return epsilon_; }
  int64_t d() const { return d_; }

 private:
  PrivacyParams(double epsilon, int64_t d) : epsilon_(epsilon), d_(d) {}

  double epsilon_;
  int64_t d_;
};

}  // namespace ksubset

#endif  // KSUBSET_PRIVACY_PARAMS_H_
