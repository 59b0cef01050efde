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

#ifndef PBCTL_EXPERIMENTS_HPP
#define PBCTL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pbctl/config.hpp"
#include "pbctl/learn.hpp"

namespace pbctl {

// Reproduction pipelines. Each returns its rows and, when `out` is given,
// writes them as CSV under that directory. Rows come out in sweep order.

struct Example1Row {
  int n = 0;
  BoundReport bound;
  CostEstimate posterior;
  CostEstimate prior;
};

/// Finite space, sweep over n: learn, certify, evaluate P* on a fixed test set.
std::vector<Example1Row> run_example1(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out = {});

struct Example2Row {
  int horizon = 0;
  CostEstimate prior;
  CostEstimate pac;
  double lqg = 0.0;
  double lambda_star = 0.0;
  double bound_total = 0.0;
};

/// Finite space on a fixed system, sweep over T: prior, learned posterior and
/// the finite-horizon optimal time-varying controller.
std::vector<Example2Row> run_example2(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out = {});

struct Example3Row {
  int n = 0;
  CostEstimate prior;
  CostEstimate posterior;
  double lambda = 0.0;
  BoundReport bound;
  InfiniteLearnResult learned;
};

/// Box space, sweep over n: each n restarts from the prior.
std::vector<Example3Row> run_example3(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out = {});

/// Dispatch on 1, 2 or 3; writes `<out>/example<k>.csv` and related files.
void reproduce_example(int which, const ExperimentConfig& cfg, std::uint64_t seed,
                       const std::filesystem::path& out);

/// Certifying B_cost proxy for a finite space, per the config flag.
BCostProxy certify_proxy(const ExperimentConfig& cfg, const ControllerSpace& space, int horizon,
                         double b_cost_hat);

/// Trace columns shared by learn-infinite and example 3.
std::vector<std::string> trace_header(int theta_dim);
std::vector<std::string> trace_cells(const IterationRecord& r);

}  // namespace pbctl

#endif  // PBCTL_EXPERIMENTS_HPP
