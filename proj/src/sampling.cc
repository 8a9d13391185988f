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

#include "ksubset/sampling.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"

namespace ksubset {

namespace {

absl::Status CheckSymbol(int64_t x, int64_t d) {
  if (x < 0 || x >= d) {
    return absl::OutOfRangeError(
        absl::StrFormat("symbol %d outside domain [0, %d)", x, d));
  }
  return absl::OkStatus();
}

}  // namespace

double KSubsetInclusionProbability(const PrivacyParams& params, int64_t k) {
  const double kr = static_cast<double>(k);
  const double rest = static_cast<double>(params.d() - k);
  // k e^eps / (k e^eps + d - k), written to stay finite for large eps.
  return kr / (kr + rest * std::exp(-params.epsilon()));
}

absl::Status KSubsetRandomizeInto(int64_t x, const PrivacyParams& params,
                                  int64_t k, RngStream& rng,
                                  SubsetView& view) {
  const int64_t d = params.d();
  if (k < 1 || k > d - 1) {
    return absl::OutOfRangeError(absl::StrFormat(
        "subset size k=%d outside [1, %d]", k, d - 1));
  }
  if (absl::Status s = CheckSymbol(x, d); !s.ok()) return s;

  const bool keep = rng.Bernoulli(KSubsetInclusionProbability(params, k));
  const int64_t wanted = keep ? k - 1 : k;

  std::vector<int64_t>& reservoir = view.members;
  reservoir.clear();
  uint64_t seen = 0;
  for (int64_t j = 0; j < d; ++j) {
    if (j == x) continue;
    if (static_cast<int64_t>(seen) < wanted) {
      reservoir.push_back(j);
    } else {
      const uint64_t slot = rng.UniformInt(seen + 1);
      if (slot < static_cast<uint64_t>(wanted)) reservoir[slot] = j;
    }
    ++seen;
  }
  if (keep) reservoir.push_back(x);
  std::sort(reservoir.begin(), reservoir.end());
  return absl::OkStatus();
}

absl::StatusOr<SubsetView> KSubsetRandomize(int64_t x,
                                            const PrivacyParams& params,
                                            int64_t k, RngStream& rng) {
  SubsetView view;
  if (absl::Status s = KSubsetRandomizeInto(x, params, k, rng, view);
      !s.ok()) {
    return s;
  }
  return view;
}

absl::StatusOr<int64_t> MrrRandomize(int64_t x, const PrivacyParams& params,
                                     RngStream& rng) {
  const int64_t d = params.d();
  if (absl::Status s = CheckSymbol(x, d); !s.ok()) return s;
  const double rest = static_cast<double>(d - 1);
  const double keep = 1.0 / (1.0 + rest * std::exp(-params.epsilon()));
  if (rng.Bernoulli(keep)) return x;
  const auto other =
      static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(d - 1)));
  return other < x ? other : other + 1;
}

absl::Status BrrRandomizeInto(int64_t x, const PrivacyParams& params,
                              RngStream& rng, SubsetView& view) {
  const int64_t d = params.d();
  if (absl::Status s = CheckSymbol(x, d); !s.ok()) return s;
  const double flip = 1.0 / (std::exp(0.5 * params.epsilon()) + 1.0);
  view.members.clear();
  for (int64_t j = 0; j < d; ++j) {
    const bool bit = (j == x) != rng.Bernoulli(flip);
    if (bit) view.members.push_back(j);
  }
  return absl::OkStatus();
}

absl::StatusOr<SubsetView> BrrRandomize(int64_t x, const PrivacyParams& params,
                                        RngStream& rng) {
  SubsetView view;
  if (absl::Status s = BrrRandomizeInto(x, params, rng, view); !s.ok()) {
    return s;
  }
  return view;
}

void AppendView(const SubsetView& view, std::string& out) {
  char buf[24];
  for (size_t i = 0; i < view.members.size(); ++i) {
    if (i > 0) out.push_back(',');
    const auto [end, ec] =
        std::to_chars(buf, buf + sizeof(buf), view.members[i]);
    out.append(buf, end);
  }
}

std::string FormatView(const SubsetView& view) {
  std::string out;
  AppendView(view, out);
  return out;
}

absl::StatusOr<SubsetView> ParseView(std::string_view line, int64_t d) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  SubsetView view;
  if (line.empty()) return view;
  const char* p = line.data();
  const char* const end = line.data() + line.size();
  while (true) {
    int64_t value = 0;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed view entry in \"", std::string(line), "\""));
    }
    if (value < 0 || value >= d) {
      return absl::OutOfRangeError(
          absl::StrFormat("view member %d outside [0, %d)", value, d));
    }
    if (!view.members.empty() && value <= view.members.back()) {
      return absl::InvalidArgumentError(
          "view members must be strictly increasing");
    }
    view.members.push_back(value);
    p = next;
    if (p == end) break;
    if (*p != ',') {
      return absl::InvalidArgumentError(
          absl::StrCat("unexpected character in view \"", std::string(line), "\""));
    }
    ++p;
  }
  return view;
}

}  // namespace ksubset
