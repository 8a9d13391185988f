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

// Monte Carlo harness for discrete distribution estimation: draw a true
// distribution, push n providers through each mechanism, estimate, project
// onto the simplex and average l1 / squared l2 errors over repetitions.
//
// Seeding: the distribution of repetition r comes from stream
// (master_seed, r, kThetaStream); provider i's secret from
// (master_seed, r, i, kSecretStream); its randomization under mechanism m
// from (master_seed, r, i, kMechanismStreamBase + m). Results therefore do
// not depend on the thread count or on which other mechanisms are run.

#ifndef KSUBSET_SIMULATION_H_
#define KSUBSET_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ksubset/rng.h"

namespace ksubset {

enum class Mechanism { kBrr = 0, kMrr = 1, kKssMi = 2, kKssL2 = 3 };

inline constexpr Mechanism kAllMechanisms[] = {
    Mechanism::kBrr, Mechanism::kMrr, Mechanism::kKssMi, Mechanism::kKssL2};

std::string_view MechanismName(Mechanism mechanism);
absl::StatusOr<Mechanism> ParseMechanism(std::string_view name);

inline constexpr uint64_t kThetaStream = 0x7468657461ULL;
inline constexpr uint64_t kSecretStream = 0x736563726574ULL;
inline constexpr uint64_t kMechanismStreamBase = 0x6D656368ULL;

struct ExperimentConfig {
  int64_t d = 0;
  double epsilon = 0.0;
  int64_t n = 10000;
  int64_t reps = 100;
  std::vector<Mechanism> mechanisms = {std::begin(kAllMechanisms),
                                       std::end(kAllMechanisms)};
  uint64_t master_seed = 1;
  // Fixed true distribution; when empty a fresh one is drawn per repetition.
  std::optional<std::vector<double>> fixed_theta;
  // Project estimates onto the simplex before measuring error.
  bool project = true;
  int threads = 1;
};

struct MechanismResult {
  Mechanism mechanism = Mechanism::kBrr;
  // Subset size for KSS_MI / KSS_L2, 1 for MRR, 0 for BRR (not applicable).
  int64_t k = 0;
  double mean_l2_sq = 0.0;
  double se_l2_sq = 0.0;
  double mean_l1 = 0.0;
  double se_l1 = 0.0;
};

struct ExperimentResult {
  int64_t d = 0;
  double epsilon = 0.0;
  int64_t n = 0;
  int64_t reps = 0;
  uint64_t master_seed = 0;
  std::vector<MechanismResult> mechanisms;

  const MechanismResult* Find(Mechanism mechanism) const;
};

// Uniform draw from the probability simplex (Dirichlet(1, ..., 1)) via
// normalized exponentials.
std::vector<double> RandomTheta(int64_t d, RngStream& rng);

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

struct GridRow {
  int64_t d;
  double epsilon;
};

// Every (d, eps) cell of the reference comparison grid, in table order.
std::vector<GridRow> ReferenceGrid();

// Parses row specs such as "d16e1.0".
absl::StatusOr<GridRow> ParseGridRow(std::string_view spec);

// Runs all four mechanisms on each row with `defaults` for n, reps, seed and
// threads.
absl::StatusOr<std::vector<ExperimentResult>> TableGrid(
    const std::vector<GridRow>& rows, const ExperimentConfig& defaults);

// Long-format CSV, one line per (row, mechanism):
// d,epsilon,mechanism,k,mean_l2_sq,se_l2_sq,mean_l1,se_l1,reps,n,master_seed
std::string ResultsCsv(const std::vector<ExperimentResult>& results);

// Wide, one line per row:
// d,epsilon,l2_brr,l2_mrr,l2_kss_mi,l2_kss_l2,l1_brr,l1_mrr,l1_kss_mi,
// l1_kss_l2,k_star,k_sharp
std::string TableCsv(const std::vector<ExperimentResult>& results);

}  // namespace ksubset

#endif  // KSUBSET_SIMULATION_H_
