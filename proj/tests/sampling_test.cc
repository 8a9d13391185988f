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

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "gtest/gtest.h"
#include "ksubset/channels.h"
#include "ksubset/privacy_params.h"
#include "ksubset/rng.h"
#include "test_oracles.h"

namespace ksubset {
namespace {

using ::ksubset::testing::ChiSquarePValue;

constexpr int kDraws = 1000000;
constexpr double kMinPValue = 1e-3;

PrivacyParams P(double eps, int64_t d) {
  return *PrivacyParams::Create(eps, d);
}

uint64_t Mask(const SubsetView& v) {
  uint64_t m = 0;
  for (int64_t j : v.members) m |= uint64_t{1} << j;
  return m;
}

// Goodness of fit of `draws` bitmask outcomes against row x of `channel`.
double FitPValue(const Channel& channel, int64_t x,
                 const std::map<uint64_t, double>& observed, int draws) {
  std::vector<double> obs, expected;
  double matched = 0.0;
  for (int64_t z = 0; z < channel.num_outputs(); ++z) {
    const auto it = observed.find(channel.output_labels()[z]);
    const double o = it == observed.end() ? 0.0 : it->second;
    matched += o;
    obs.push_back(o);
    expected.push_back(channel.prob(x, z) * draws);
  }
  if (matched != draws) return 0.0;  // outcome outside the channel support
  return ChiSquarePValue(obs, expected);
}

TEST(KSubsetRandomizeTest, RejectsBadArguments) {
  RngStream rng(1);
  EXPECT_FALSE(KSubsetRandomize(-1, P(1.0, 4), 2, rng).ok());
  EXPECT_FALSE(KSubsetRandomize(4, P(1.0, 4), 2, rng).ok());
  EXPECT_FALSE(KSubsetRandomize(0, P(1.0, 4), 0, rng).ok());
  EXPECT_FALSE(KSubsetRandomize(0, P(1.0, 4), 4, rng).ok());
}

TEST(KSubsetRandomizeTest, SizeSortedAndInRange) {
  RngStream rng(2);
  for (int64_t d : {2, 5, 33, 256}) {
    for (int64_t k : {int64_t{1}, d / 2, d - 1}) {
      if (k < 1) continue;
      for (int i = 0; i < 200; ++i) {
        const int64_t x = static_cast<int64_t>(rng.UniformInt(d));
        const SubsetView v = *KSubsetRandomize(x, P(0.7, d), k, rng);
        ASSERT_EQ(static_cast<int64_t>(v.members.size()), k);
        for (size_t j = 0; j < v.members.size(); ++j) {
          ASSERT_GE(v.members[j], 0);
          ASSERT_LT(v.members[j], d);
          if (j > 0) {
            ASSERT_LT(v.members[j - 1], v.members[j]);
          }
        }
      }
    }
  }
}

TEST(KSubsetRandomizeTest, BinaryKeepProbability) {
  const double eps = 1.0;
  RngStream rng(3);
  int kept = 0;
  for (int i = 0; i < kDraws; ++i) {
    kept += KSubsetRandomize(1, P(eps, 2), 1, rng)->members[0] == 1;
  }
  const double p = std::exp(eps) / (std::exp(eps) + 1);
  EXPECT_NEAR(kept, kDraws * p, 3 * std::sqrt(kDraws * p * (1 - p)));
}

TEST(KSubsetRandomizeTest, HitRateWithinThreeSigma) {
  const PrivacyParams p = P(1.0, 6);
  const int64_t k = 2;
  RngStream rng(4);
  int hits = 0;
  for (int i = 0; i < kDraws; ++i) {
    const SubsetView v = *KSubsetRandomize(3, p, k, rng);
    hits += (v.members[0] == 3 || v.members[1] == 3);
  }
  const double g = k * std::exp(1.0) / (k * std::exp(1.0) + 6 - k);
  EXPECT_DOUBLE_EQ(KSubsetInclusionProbability(p, k), g);
  EXPECT_NEAR(hits, kDraws * g, 3 * std::sqrt(kDraws * g * (1 - g)));
}

TEST(KSubsetRandomizeTest, ChiSquareAgainstChannelRow) {
  const PrivacyParams p = P(1.0, 5);
  const Channel ch = *KSubsetChannel(p, 2);
  for (int64_t x : {0, 4}) {
    RngStream rng(50 + x);
    std::map<uint64_t, double> counts;
    for (int i = 0; i < kDraws; ++i) ++counts[Mask(*KSubsetRandomize(x, p, 2, rng))];
    EXPECT_GT(FitPValue(ch, x, counts, kDraws), kMinPValue) << "x=" << x;
  }
}

TEST(KSubsetRandomizeTest, ComplementElementsUniform) {
  // Among views that do not contain x, and among the non-x members of views
  // that do, every other symbol appears equally often.
  const int64_t d = 9, k = 3, x = 4;
  RngStream rng(6);
  std::vector<double> counts(d, 0.0);
  double total = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const SubsetView v = *KSubsetRandomize(x, P(0.5, d), k, rng);
    for (int64_t j : v.members) {
      if (j != x) {
        ++counts[j];
        ++total;
      }
    }
  }
  EXPECT_EQ(counts[x], 0.0);
  // Each draw touches a symbol at most once, so per-symbol counts are
  // binomial in kDraws with probability mean/kDraws.
  const double mean = total / (d - 1);
  const double q = mean / kDraws;
  for (int64_t j = 0; j < d; ++j) {
    if (j == x) continue;
    EXPECT_NEAR(counts[j], mean, 3 * std::sqrt(kDraws * q * (1 - q))) << j;
  }
}

TEST(KSubsetRandomizeTest, DeterministicForSeed) {
  RngStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(*KSubsetRandomize(i % 20, P(1.0, 20), 5, a),
              *KSubsetRandomize(i % 20, P(1.0, 20), 5, b));
  }
}

TEST(MrrRandomizeTest, BinaryKeepProbability) {
  RngStream rng(7);
  int kept = 0;
  for (int i = 0; i < kDraws; ++i) kept += *MrrRandomize(0, P(1.0, 2), rng) == 0;
  const double p = std::exp(1.0) / (std::exp(1.0) + 1);
  EXPECT_NEAR(p, 0.7311, 1e-4);
  EXPECT_NEAR(kept, kDraws * p, 3 * std::sqrt(kDraws * p * (1 - p)));
}

TEST(MrrRandomizeTest, TinyEpsilonNearlyUniform) {
  RngStream rng(8);
  std::vector<double> counts(5, 0.0);
  for (int i = 0; i < kDraws; ++i) ++counts[*MrrRandomize(2, P(1e-9, 5), rng)];
  EXPECT_GT(ChiSquarePValue(counts, std::vector<double>(5, kDraws / 5.0)),
            kMinPValue);
}

TEST(MrrRandomizeTest, ChiSquareAgainstChannelRow) {
  const PrivacyParams p = P(0.5, 4);
  const Channel ch = *MrrChannel(p);
  RngStream rng(9);
  std::map<uint64_t, double> counts;
  for (int i = 0; i < kDraws; ++i) {
    ++counts[uint64_t{1} << *MrrRandomize(1, p, rng)];
  }
  EXPECT_GT(FitPValue(ch, 1, counts, kDraws), kMinPValue);
}

TEST(MrrRandomizeTest, RejectsOutOfRange) {
  RngStream rng(1);
  EXPECT_FALSE(MrrRandomize(3, P(1.0, 3), rng).ok());
}

TEST(BrrRandomizeTest, KeepBitProbability) {
  const double eps = 1.2;
  RngStream rng(10);
  int kept = 0;
  for (int i = 0; i < kDraws; ++i) {
    const SubsetView v = *BrrRandomize(2, P(eps, 5), rng);
    for (int64_t j : v.members) kept += j == 2;
  }
  const double p = std::exp(eps / 2) / (std::exp(eps / 2) + 1);
  EXPECT_NEAR(kept, kDraws * p, 3 * std::sqrt(kDraws * p * (1 - p)));
}

TEST(BrrRandomizeTest, HugeEpsilonIsIdentity) {
  RngStream rng(11);
  int exact = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    exact += BrrRandomize(3, P(40.0, 8), rng)->members == std::vector<int64_t>{3};
  }
  EXPECT_GT(exact, 0.999 * n);
}

TEST(BrrRandomizeTest, ChiSquareAgainstChannelRow) {
  const PrivacyParams p = P(1.0, 3);
  const Channel ch = *BrrChannel(p);
  RngStream rng(12);
  std::map<uint64_t, double> counts;
  for (int i = 0; i < kDraws; ++i) ++counts[Mask(*BrrRandomize(0, p, rng))];
  EXPECT_GT(FitPValue(ch, 0, counts, kDraws), kMinPValue);
}

TEST(ViewFormatTest, RoundTrip) {
  const SubsetView v{{0, 3, 17}};
  EXPECT_EQ(FormatView(v), "0,3,17");
  EXPECT_EQ(*ParseView("0,3,17", 18), v);
  EXPECT_EQ(*ParseView("0,3,17\r", 18), v);
  EXPECT_EQ(FormatView(SubsetView{}), "");
  EXPECT_TRUE(ParseView("", 4)->members.empty());
  std::string buf = "x\n";
  AppendView(v, buf);
  EXPECT_EQ(buf, "x\n0,3,17");
}

TEST(ViewFormatTest, RejectsMalformed) {
  EXPECT_FALSE(ParseView("0,3,17", 17).ok());
  EXPECT_FALSE(ParseView("3,0", 5).ok());
  EXPECT_FALSE(ParseView("1,1", 5).ok());
  EXPECT_FALSE(ParseView("1,", 5).ok());
  EXPECT_FALSE(ParseView(",1", 5).ok());
  EXPECT_FALSE(ParseView("1 2", 5).ok());
  EXPECT_FALSE(ParseView("-1", 5).ok());
  EXPECT_FALSE(ParseView("a", 5).ok());
}

}  // namespace
}  // namespace ksubset
