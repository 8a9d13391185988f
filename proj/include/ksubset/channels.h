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

// Explicit conditional-probability matrices for small domains, the
// pattern-weight ("staircase") representation of eps-LDP mechanisms, and a
// brute-force mutual information oracle used to check the closed forms.
//
// Output labels are subset bitmasks throughout: bit j of a label is set iff
// symbol j belongs to the output (for a staircase pattern column, iff row j
// carries the e^eps factor). Columns are ordered by ascending bitmask.

#ifndef KSUBSET_CHANNELS_H_
#define KSUBSET_CHANNELS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ksubset/privacy_params.h"

namespace ksubset {

// Largest domain for which 2^d or C(d, k) columns are materialized.
inline constexpr int64_t kMaxExplicitDomain = 20;

// Row-sum tolerance for a valid channel.
inline constexpr double kRowSumTolerance = 1e-12;

// Relative slack applied to e^eps in the LDP ratio check.
inline constexpr double kLdpRatioSlack = 1e-9;

class Channel {
 public:
  // `probs` is row-major, d rows by labels.size() columns.
  static absl::StatusOr<Channel> Create(int64_t d,
                                        std::vector<uint64_t> output_labels,
                                        std::vector<double> probs);

  int64_t d() const { return d_; }
  int64_t num_outputs() const {
    return static_cast<int64_t>(output_labels_.size());
  }
  const std::vector<uint64_t>& output_labels() const { return output_labels_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(int64_t x, int64_t z) const {
    return probs_[static_cast<size_t>(x * num_outputs() + z)];
  }

  // OK iff every entry is non-negative and every row sums to 1 within
  // `tolerance` (compensated summation).
  absl::Status CheckRows(double tolerance = kRowSumTolerance) const;

 private:
  Channel(int64_t d, std::vector<uint64_t> labels, std::vector<double> probs)
      : d_(d), output_labels_(std::move(labels)), probs_(std::move(probs)) {}

  int64_t d_;
  std::vector<uint64_t> output_labels_;
  std::vector<double> probs_;
};

// Weighted pattern columns: column c (a d-bit mask) contributes
// weights[c] * (e^eps if bit x of c is set else 1) to row x.
struct StaircaseMechanism {
  int64_t d = 0;
  double epsilon = 0.0;
  std::vector<double> weights;  // size 2^d, indexed by bitmask
};

// The k-subset mechanism: C(d, k) outputs, each size-k subset Z receiving
// (d e^eps / (k e^eps + d - k)) / C(d, k) if x is in Z and
// (d / (k e^eps + d - k)) / C(d, k) otherwise. Requires 1 <= k <= d-1.
absl::StatusOr<Channel> KSubsetChannel(const PrivacyParams& params, int64_t k);

// Multivariate randomized response, labelled by singleton bitmasks so it is
// column-for-column identical to KSubsetChannel(params, 1).
absl::StatusOr<Channel> MrrChannel(const PrivacyParams& params);

// Binary randomized response over all 2^d subsets. Accepts d >= 1.
absl::StatusOr<Channel> BrrChannel(double epsilon, int64_t d);
absl::StatusOr<Channel> BrrChannel(const PrivacyParams& params);

// I(X; Z) under a uniform prior, in nats, by direct summation. Columns with
// zero marginal are skipped and 0 log 0 = 0.
absl::StatusOr<double> BruteForceMutualInfo(const Channel& channel);

struct LdpReport {
  bool satisfied = true;
  // Largest max/min ratio over columns (infinity if a column mixes zero and
  // non-zero entries) and the column index where it occurs.
  double worst_ratio = 1.0;
  int64_t worst_column = -1;
};

// Checks max_x Q(z|x) / min_x Q(z|x) <= e^eps (1 + kLdpRatioSlack) for
// every column z.
LdpReport ValidateLdp(const Channel& channel, double epsilon);

absl::StatusOr<Channel> InducedChannel(const StaircaseMechanism& mechanism);

// The k-subset mechanism expressed as pattern weights.
absl::StatusOr<StaircaseMechanism> KSubsetStaircase(
    const PrivacyParams& params, int64_t k);

// Replaces the weights of every pattern class (columns with the same number
// of e^eps entries) by their class mean. Mutual information and validity
// are preserved.
absl::StatusOr<StaircaseMechanism> Amortize(
    const StaircaseMechanism& mechanism);

// Random valid mechanism with non-uniform weights inside its pattern
// classes, for exercising Amortize. Support is restricted to classes
// {1, 2} at d = 3 and {1, 2, 3} at d = 4. Class-2 (and class-3) weights are
// sampled, then the d singleton weights are solved from the row-sum
// constraints; draws with a negative solution are rejected. Returns
// ResourceExhausted if no draw succeeds within the retry budget.
absl::StatusOr<StaircaseMechanism> RandomValidStaircase(int64_t d,
                                                        double epsilon,
                                                        uint64_t seed);

// Debug dump: header row "x" followed by output labels as 0x-prefixed hex,
// then one row per input symbol.
std::string ChannelToCsv(const Channel& channel);

}  // namespace ksubset

#endif  // KSUBSET_CHANNELS_H_
