/*
 Copyright 2026 The pbctl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef PBCTL_COVERAGE_HPP
#define PBCTL_COVERAGE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbctl/bounds.hpp"
#include "pbctl/cost.hpp"
#include "pbctl/posterior.hpp"
#include "pbctl/sysmodel.hpp"

namespace pbctl {

struct CoverageRecord {
  int repetition = 0;
  double bound = 0.0;
  double reference = 0.0;  // brute-force Gibbs expected cost of the posterior
  bool covered = false;
};

struct CoverageResult {
  double coverage = 0.0;
  int covered = 0;
  std::vector<CoverageRecord> records;
};

struct CoverageSetup {
  int n = 10;
  int horizon = 20;
  int repetitions = 200;
  int reference_trajectories = 2000;
};

/// Monte Carlo check of the finite-space bound. Each repetition draws a fresh
/// training set, learns P* (or uses `fixed` when given), certifies it with the
/// configured B_cost proxy and compares against a reference estimate of the
/// Gibbs expected cost. Reference costs C(K_j) are estimated once, on data
/// independent of every training set.
CoverageResult coverage_check(const SystemDistribution& dist, std::span<const MatrixXd> controllers,
                              const CostWeights& w, const FinitePosterior& P0,
                              const BoundConfig& config, const CoverageSetup& setup,
                              std::uint64_t seed,
                              const std::optional<FinitePosterior>& fixed = std::nullopt);

}  // namespace pbctl

#endif  // PBCTL_COVERAGE_HPP
