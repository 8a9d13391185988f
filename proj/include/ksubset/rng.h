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

#ifndef KSUBSET_RNG_H_
#define KSUBSET_RNG_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ksubset {

// Deterministic pseudo-random stream: xoshiro256** (Blackman & Vigna) with
// its 256-bit state expanded from a 64-bit seed by SplitMix64. Every draw is
// defined in terms of 64-bit integer arithmetic only, so a given seed yields
// the same sequence on every platform. Satisfies
// std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = uint64_t;

  explicit RngStream(uint64_t seed);

  // Stream for a coordinate path below a master seed, e.g.
  // Derive(master, {rep, provider, tag}). The seed is
  //   h = mix(master); for each c: h = mix(h ^ mix(c + golden))
  // where mix is the SplitMix64 finalizer, so sibling paths are unrelated.
  static RngStream Derive(uint64_t master_seed,
                          std::initializer_list<uint64_t> path);
  static uint64_t DeriveSeed(uint64_t master_seed,
                             std::initializer_list<uint64_t> path);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return Next(); }
  uint64_t Next();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();

  // Uniform on [0, bound); bound must be positive. Lemire's nearly
  // divisionless method.
  uint64_t UniformInt(uint64_t bound);

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Standard exponential variate.
  double Exponential();

 private:
  std::array<uint64_t, 4> state_;
};

}  // namespace ksubset

#endif  // KSUBSET_RNG_H_
