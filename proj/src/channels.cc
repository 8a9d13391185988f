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

#include "ksubset/channels.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"
#include "math_util.h"

namespace ksubset {

namespace {

using internal::CompensatedSum;

bool HasBit(uint64_t mask, int64_t bit) { return (mask >> bit) & 1U; }

// Next larger integer with the same popcount (Gosper's hack).
uint64_t NextSamePopcount(uint64_t v) {
  const uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

absl::Status CheckExplicitDomain(int64_t d) {
  if (d > kMaxExplicitDomain) {
    return absl::OutOfRangeError(absl::StrFormat(
        "explicit channels are limited to d <= %d, got d=%d",
        kMaxExplicitDomain, d));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Channel> Channel::Create(int64_t d,
                                        std::vector<uint64_t> output_labels,
                                        std::vector<double> probs) {
  if (d < 1) {
    return absl::InvalidArgumentError("channel needs at least one input row");
  }
  if (probs.size() != static_cast<size_t>(d) * output_labels.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "probability matrix has %d entries, expected %d x %d", probs.size(),
        d, output_labels.size()));
  }
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("channel entry is negative or non-finite: ", p));
    }
  }
  return Channel(d, std::move(output_labels), std::move(probs));
}

absl::Status Channel::CheckRows(double tolerance) const {
  for (int64_t x = 0; x < d_; ++x) {
    CompensatedSum row;
    for (int64_t z = 0; z < num_outputs(); ++z) row.Add(prob(x, z));
    if (std::abs(row.Result() - 1.0) > tolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "row %d sums to %.17g, not 1", x, row.Result()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Channel> KSubsetChannel(const PrivacyParams& params,
                                       int64_t k) {
  const int64_t d = params.d();
  if (k < 1 || k > d - 1) {
    return absl::OutOfRangeError(absl::StrFormat(
        "k-subset channel needs 1 <= k <= d-1, got k=%d, d=%d", k, d));
  }
  if (absl::Status s = CheckExplicitDomain(d); !s.ok()) return s;

  const double e = std::exp(params.epsilon());
  const double norm = static_cast<double>(k) * e + static_cast<double>(d - k);
  const double columns = static_cast<double>(internal::Binomial(d, k));
  const double p_in = static_cast<double>(d) * e / norm / columns;
  const double p_out = static_cast<double>(d) / norm / columns;

  std::vector<uint64_t> labels;
  labels.reserve(static_cast<size_t>(columns));
  const uint64_t end = uint64_t{1} << d;
  for (uint64_t mask = (uint64_t{1} << k) - 1; mask < end;
       mask = NextSamePopcount(mask)) {
    labels.push_back(mask);
  }
  std::vector<double> probs(static_cast<size_t>(d) * labels.size());
  for (int64_t x = 0; x < d; ++x) {
    for (size_t z = 0; z < labels.size(); ++z) {
      probs[static_cast<size_t>(x) * labels.size() + z] =
          HasBit(labels[z], x) ? p_in : p_out;
    }
  }
  return Channel::Create(d, std::move(labels), std::move(probs));
}

absl::StatusOr<Channel> MrrChannel(const PrivacyParams& params) {
  const int64_t d = params.d();
  if (d > 4096) {
    return absl::OutOfRangeError(
        absl::StrFormat("explicit MRR channel too large: d=%d", d));
  }
  const double e = std::exp(params.epsilon());
  const double norm = e + static_cast<double>(d - 1);
  std::vector<uint64_t> labels(static_cast<size_t>(d));
  std::vector<double> probs(static_cast<size_t>(d * d), 1.0 / norm);
  for (int64_t x = 0; x < d; ++x) {
    labels[static_cast<size_t>(x)] = uint64_t{1} << std::min<int64_t>(x, 63);
    probs[static_cast<size_t>(x * d + x)] = e / norm;
  }
  return Channel::Create(d, std::move(labels), std::move(probs));
}

absl::StatusOr<Channel> BrrChannel(double epsilon, int64_t d) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  if (d < 1) return absl::InvalidArgumentError("BRR needs d >= 1");
  if (absl::Status s = CheckExplicitDomain(d); !s.ok()) return s;

  const double half = 0.5 * epsilon;
  const double log_norm =
      static_cast<double>(d) * (half + std::log1p(std::exp(-half)));
  const uint64_t columns = uint64_t{1} << d;
  std::vector<uint64_t> labels(columns);
  std::vector<double> probs(static_cast<size_t>(d) * columns);
  for (uint64_t z = 0; z < columns; ++z) {
    labels[z] = z;
    const double size = static_cast<double>(std::popcount(z));
    const double p_in =
        std::exp(half * (static_cast<double>(d) - size + 1.0) - log_norm);
    const double p_out =
        std::exp(half * (static_cast<double>(d) - size - 1.0) - log_norm);
    for (int64_t x = 0; x < d; ++x) {
      probs[static_cast<size_t>(x) * columns + z] =
          HasBit(z, x) ? p_in : p_out;
    }
  }
  return Channel::Create(d, std::move(labels), std::move(probs));
}

absl::StatusOr<Channel> BrrChannel(const PrivacyParams& params) {
  return BrrChannel(params.epsilon(), params.d());
}

absl::StatusOr<double> BruteForceMutualInfo(const Channel& channel) {
  if (absl::Status s = channel.CheckRows(); !s.ok()) return s;
  const int64_t d = channel.d();
  const double prior = 1.0 / static_cast<double>(d);
  CompensatedSum info;
  for (int64_t z = 0; z < channel.num_outputs(); ++z) {
    CompensatedSum marginal_sum;
    for (int64_t x = 0; x < d; ++x) marginal_sum.Add(channel.prob(x, z));
    const double marginal = marginal_sum.Result() * prior;
    if (marginal <= 0.0) continue;
    for (int64_t x = 0; x < d; ++x) {
      const double q = channel.prob(x, z);
      if (q <= 0.0) continue;
      info.Add(prior * q * std::log(q / marginal));
    }
  }
  return info.Result();
}

LdpReport ValidateLdp(const Channel& channel, double epsilon) {
  LdpReport report;
  for (int64_t z = 0; z < channel.num_outputs(); ++z) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (int64_t x = 0; x < channel.d(); ++x) {
      hi = std::max(hi, channel.prob(x, z));
      lo = std::min(lo, channel.prob(x, z));
    }
    if (hi <= 0.0) continue;
    const double ratio =
        lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (report.worst_column < 0 || ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_column = z;
    }
  }
  report.satisfied =
      report.worst_ratio <= std::exp(epsilon) * (1.0 + kLdpRatioSlack);
  return report;
}

absl::StatusOr<Channel> InducedChannel(const StaircaseMechanism& mechanism) {
  const int64_t d = mechanism.d;
  if (d < 1) return absl::InvalidArgumentError("mechanism needs d >= 1");
  if (absl::Status s = CheckExplicitDomain(d); !s.ok()) return s;
  const uint64_t columns = uint64_t{1} << d;
  if (mechanism.weights.size() != columns) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected 2^%d = %d weights, got %d", d, columns,
        mechanism.weights.size()));
  }
  const double e = std::exp(mechanism.epsilon);
  std::vector<uint64_t> labels(columns);
  std::vector<double> probs(static_cast<size_t>(d) * columns);
  for (uint64_t c = 0; c < columns; ++c) {
    labels[c] = c;
    for (int64_t x = 0; x < d; ++x) {
      probs[static_cast<size_t>(x) * columns + c] =
          mechanism.weights[c] * (HasBit(c, x) ? e : 1.0);
    }
  }
  return Channel::Create(d, std::move(labels), std::move(probs));
}

absl::StatusOr<StaircaseMechanism> KSubsetStaircase(
    const PrivacyParams& params, int64_t k) {
  const int64_t d = params.d();
  if (k < 1 || k > d - 1) {
    return absl::OutOfRangeError(absl::StrFormat(
        "k-subset mechanism needs 1 <= k <= d-1, got k=%d, d=%d", k, d));
  }
  if (absl::Status s = CheckExplicitDomain(d); !s.ok()) return s;
  StaircaseMechanism mechanism{d, params.epsilon(), {}};
  mechanism.weights.assign(uint64_t{1} << d, 0.0);
  const double class_mass =
      static_cast<double>(d) /
      (static_cast<double>(k) * std::exp(params.epsilon()) +
       static_cast<double>(d - k));
  const double weight =
      class_mass / static_cast<double>(internal::Binomial(d, k));
  for (uint64_t c = 0; c < mechanism.weights.size(); ++c) {
    if (std::popcount(c) == k) mechanism.weights[c] = weight;
  }
  return mechanism;
}

absl::StatusOr<StaircaseMechanism> Amortize(
    const StaircaseMechanism& mechanism) {
  absl::StatusOr<Channel> channel = InducedChannel(mechanism);
  if (!channel.ok()) return channel.status();
  if (absl::Status s = channel->CheckRows(1e-9); !s.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("input mechanism is not valid: ", s.message()));
  }
  const int64_t d = mechanism.d;
  std::vector<CompensatedSum> class_sums(static_cast<size_t>(d + 1));
  for (uint64_t c = 0; c < mechanism.weights.size(); ++c) {
    class_sums[static_cast<size_t>(std::popcount(c))].Add(
        mechanism.weights[c]);
  }
  StaircaseMechanism amortized{d, mechanism.epsilon, mechanism.weights};
  for (uint64_t c = 0; c < amortized.weights.size(); ++c) {
    const int k = std::popcount(c);
    amortized.weights[c] = class_sums[static_cast<size_t>(k)].Result() /
                           static_cast<double>(internal::Binomial(d, k));
  }
  return amortized;
}

absl::StatusOr<StaircaseMechanism> RandomValidStaircase(int64_t d,
                                                        double epsilon,
                                                        uint64_t seed) {
  if (d != 3 && d != 4) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "random staircase generation supports d in {3, 4}, got %d", d));
  }
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  constexpr int kMaxAttempts = 100000;
  const double e = std::exp(epsilon);
  const uint64_t columns = uint64_t{1} << d;
  RngStream rng(seed);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Sampled weights: the non-singleton classes of the support.
    std::vector<double> weights(columns, 0.0);
    for (uint64_t c = 0; c < columns; ++c) {
      const int k = std::popcount(c);
      if (k >= 2 && k <= d - 1) weights[c] = rng.Uniform01();
    }
    std::vector<double> load(static_cast<size_t>(d), 0.0);
    for (uint64_t c = 0; c < columns; ++c) {
      for (int64_t x = 0; x < d; ++x) {
        load[static_cast<size_t>(x)] += weights[c] * (HasBit(c, x) ? e : 1.0);
      }
    }
    const double max_load = *std::max_element(load.begin(), load.end());
    const double u = rng.Uniform01();
    const double scale = u * u / max_load;
    double residual_total = 0.0;
    for (uint64_t c = 0; c < columns; ++c) weights[c] *= scale;
    for (double& l : load) {
      l = 1.0 - l * scale;
      residual_total += l;
    }
    // Row x: (e - 1) w_x + sum_j w_j = residual_x, with w_j the singletons.
    const double singleton_total =
        residual_total / (e - 1.0 + static_cast<double>(d));
    bool feasible = true;
    for (int64_t x = 0; x < d; ++x) {
      const double w =
          (load[static_cast<size_t>(x)] - singleton_total) / (e - 1.0);
      if (w < 0.0) {
        feasible = false;
        break;
      }
      weights[uint64_t{1} << x] = w;
    }
    if (!feasible) continue;

    bool asymmetric = false;
    for (int k = 1; k <= d - 1 && !asymmetric; ++k) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (uint64_t c = 0; c < columns; ++c) {
        if (std::popcount(c) != k) continue;
        lo = std::min(lo, weights[c]);
        hi = std::max(hi, weights[c]);
      }
      asymmetric = hi - lo > 1e-9 * std::max(1.0, hi);
    }
    if (!asymmetric) continue;
    return StaircaseMechanism{d, epsilon, std::move(weights)};
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "no valid staircase mechanism found in %d draws (d=%d, eps=%g)",
      kMaxAttempts, d, epsilon));
}

std::string ChannelToCsv(const Channel& channel) {
  std::string out = "x";
  for (uint64_t label : channel.output_labels()) {
    absl::StrAppend(&out, ",", absl::StrFormat("0x%x", label));
  }
  out += "\n";
  for (int64_t x = 0; x < channel.d(); ++x) {
    absl::StrAppend(&out, x);
    for (int64_t z = 0; z < channel.num_outputs(); ++z) {
      absl::StrAppend(&out, ",", absl::StrFormat("%.17g", channel.prob(x, z)));
    }
    out += "\n";
  }
  return out;
}

}  // namespace ksubset
