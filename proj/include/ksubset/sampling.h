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

// Per-provider randomizers. Each runs in O(d) time and memory.
//
// View wire format: one view per line, members as ascending decimal indices
// separated by commas. An empty line is the empty set (BRR only).

#ifndef KSUBSET_SAMPLING_H_
#define KSUBSET_SAMPLING_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"

namespace ksubset {

// A private view: strictly increasing domain indices in [0, d).
struct SubsetView {
  std::vector<int64_t> members;

  friend bool operator==(const SubsetView&, const SubsetView&) = default;
};

// Probability that the k-subset randomizer keeps the true symbol:
// k e^eps / (k e^eps + d - k).
double KSubsetInclusionProbability(const PrivacyParams& params, int64_t k);

// k-subset randomizer. With probability KSubsetInclusionProbability the view
// is {x} plus k-1 symbols drawn uniformly without replacement from the rest
// of the domain; otherwise it is k such symbols. The draw walks the domain
// once with reservoir sampling (Algorithm R), skipping x.
absl::StatusOr<SubsetView> KSubsetRandomize(int64_t x,
                                            const PrivacyParams& params,
                                            int64_t k, RngStream& rng);

// Same, writing into `view` so callers can reuse its storage.
absl::Status KSubsetRandomizeInto(int64_t x, const PrivacyParams& params,
                                  int64_t k, RngStream& rng, SubsetView& view);

// Multivariate randomized response: keeps x with probability
// e^eps / (e^eps + d - 1), otherwise a uniform other symbol.
absl::StatusOr<int64_t> MrrRandomize(int64_t x, const PrivacyParams& params,
                                     RngStream& rng);

// Binary randomized response: flips each bit of the one-hot encoding of x
// independently with probability 1 / (e^{eps/2} + 1).
absl::StatusOr<SubsetView> BrrRandomize(int64_t x, const PrivacyParams& params,
                                        RngStream& rng);
absl::Status BrrRandomizeInto(int64_t x, const PrivacyParams& params,
                              RngStream& rng, SubsetView& view);

// Wire format helpers.
std::string FormatView(const SubsetView& view);
void AppendView(const SubsetView& view, std::string& out);
// Parses one line. Validates ordering, duplicates and the [0, d) range.
absl::StatusOr<SubsetView> ParseView(std::string_view line, int64_t d);

}  // namespace ksubset

#endif  // KSUBSET_SAMPLING_H_
