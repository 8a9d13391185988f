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

// Independent reference computations for tests. Everything here is written
// directly from the defining formulas in long double, without reusing any
// library code path.

#ifndef KSUBSET_TESTS_TEST_ORACLES_H_
#define KSUBSET_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace ksubset::testing {

using Matrix = std::vector<std::vector<long double>>;

inline constexpr double kEpsGrid[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};

inline long double BinomialL(int64_t n, int64_t k) {
  long double r = 1.0L;
  for (int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// I_k straight from its defining expression.
inline long double IkOracle(int64_t d, long double eps, int64_t k) {
  const long double e = std::exp(eps);
  const long double den = k * e + (d - k);
  long double total = 0.0L;
  if (k > 0) total += k * e * std::log(d * e / den);
  if (d - k > 0) total += (d - k) * std::log(d / den);
  return total / den;
}

// Uniform-prior mutual information of a row-stochastic matrix.
inline long double MiOracle(const Matrix& q) {
  const size_t d = q.size();
  const size_t m = q.front().size();
  long double mi = 0.0L;
  for (size_t z = 0; z < m; ++z) {
    long double marginal = 0.0L;
    for (size_t x = 0; x < d; ++x) marginal += q[x][z];
    marginal /= d;
    for (size_t x = 0; x < d; ++x) {
      if (q[x][z] > 0.0L) mi += q[x][z] / d * std::log(q[x][z] / marginal);
    }
  }
  return mi;
}

// Columns indexed by every bitmask of popcount k, in ascending order.
inline Matrix KSubsetMatrixOracle(int64_t d, long double eps, int64_t k,
                                  std::vector<uint64_t>* labels = nullptr) {
  const long double e = std::exp(eps);
  const long double c = BinomialL(d, k);
  const long double den = k * e + (d - k);
  Matrix q(d);
  if (labels) labels->clear();
  for (uint64_t mask = 0; mask < (uint64_t{1} << d); ++mask) {
    if (std::popcount(mask) != k) continue;
    if (labels) labels->push_back(mask);
    for (int64_t x = 0; x < d; ++x) {
      const bool in = (mask >> x) & 1;
      q[x].push_back((in ? d * e : d) / den / c);
    }
  }
  return q;
}

// Bit-flip channel: each indicator bit kept with probability
// e^{eps/2}/(e^{eps/2}+1). Built from per-bit products, not the closed form.
inline Matrix BrrMatrixOracle(int64_t d, long double eps) {
  const long double keep = std::exp(eps / 2) / (std::exp(eps / 2) + 1);
  Matrix q(d, std::vector<long double>(size_t{1} << d));
  for (int64_t x = 0; x < d; ++x) {
    for (uint64_t mask = 0; mask < (uint64_t{1} << d); ++mask) {
      long double p = 1.0L;
      for (int64_t b = 0; b < d; ++b) {
        const bool truth = (b == x);
        const bool out = (mask >> b) & 1;
        p *= (truth == out) ? keep : 1.0L - keep;
      }
      q[x][mask] = p;
    }
  }
  return q;
}

// Hit rates counted off the explicit k-subset matrix.
struct HitRateOracle {
  long double g;
  long double h;
};
inline HitRateOracle KSubsetHitRatesOracle(int64_t d, long double eps,
                                           int64_t k) {
  std::vector<uint64_t> labels;
  const Matrix q = KSubsetMatrixOracle(d, eps, k, &labels);
  HitRateOracle r{0.0L, 0.0L};
  for (size_t z = 0; z < labels.size(); ++z) {
    if (labels[z] & 1) r.g += q[0][z];
    if (labels[z] & 2) r.h += q[0][z];
  }
  return r;
}

// Upper-tail p-value of Pearson's statistic; bins with expected count 0 must
// have zero observations.
inline double ChiSquarePValue(const std::vector<double>& observed,
                              const std::vector<double>& expected) {
  double stat = 0.0;
  int dof = -1;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] > 0.0) return 0.0;
      continue;
    }
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
    ++dof;
  }
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Checks the KKT conditions of Euclidean projection onto the simplex:
// p = max(v - tau, 0) for a single tau, p >= 0, sum p = 1.
inline bool IsSimplexProjection(const std::vector<double>& v,
                                const std::vector<double>& p, double tol) {
  double sum = 0.0;
  double tau = 0.0;
  bool have_tau = false;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -tol) return false;
    sum += p[i];
    if (p[i] > tol) {
      const double t = v[i] - p[i];
      if (have_tau && std::abs(t - tau) > tol) return false;
      tau = t;
      have_tau = true;
    }
  }
  if (std::abs(sum - 1.0) > tol || !have_tau) return false;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= tol && v[i] > tau + tol) return false;
  }
  return true;
}

}  // namespace ksubset::testing

#endif  // KSUBSET_TESTS_TEST_ORACLES_H_
