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

#ifndef PBCTL_LEARN_HPP
#define PBCTL_LEARN_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pbctl/bounds.hpp"
#include "pbctl/cost.hpp"
#include "pbctl/posterior.hpp"
#include "pbctl/sysmodel.hpp"

namespace pbctl {

// ---------------------------------------------------------------------------
// Finite controller space
// ---------------------------------------------------------------------------

/// P_j proportional to P0_j exp(-lambda cost_j), normalized in log space.
/// This is the exact minimizer of C~(P) + KL(P||P0)/lambda over the simplex.
FinitePosterior gibbs_posterior(const FinitePosterior& P0, const VectorXd& costs, double lambda);

/// Training objective C~(P) + lambda B^2/(8n) + (KL(P||P0) + ln(card/delta))/lambda.
double finite_objective(const FinitePosterior& P, const FinitePosterior& P0, const VectorXd& costs,
                        double lambda, double b_cost, int n, int card_gamma, double delta);

struct FiniteLearnResult {
  FinitePosterior posterior;
  double lambda_star = 0.0;
  /// (lambda, objective at P_lambda) for every lambda in Gamma, ascending in lambda.
  std::vector<std::pair<double, double>> per_lambda_objectives;
  VectorXd empirical_costs;
  double b_cost_hat = 0.0;
  /// Bound at (P*, lambda*) with the empirical B_cost proxy.
  BoundReport report;
};

/// Learns P* by minimizing the bound objective over lambda in gamma, with
/// B_cost replaced by its empirical estimate from the dataset.
FiniteLearnResult learn_finite(const Dataset& data, std::span<const MatrixXd> controllers,
                               const CostWeights& w, const FinitePosterior& P0,
                               const BoundConfig& config, std::span<const double> gamma);

// ---------------------------------------------------------------------------
// Infinite controller space
// ---------------------------------------------------------------------------

struct SgdConfig {
  double step_size = 1e-3;   // eta
  double smoothing = 0.05;   // h
  int iterations = 10;
  int mc_controllers = 10;   // L'
  int n_per_controller = 10;
  double sigma_min = 1e-4;
  /// Smallest admissible width upper - lower of a posterior coordinate.
  double min_width = 1e-3;

  void validate() const;
  bool operator==(const SgdConfig&) const = default;
};

/// phi = cost_hat + c_max sqrt(ln(2/delta')/(2L')) + lambda B^2/(8n) + (kl + ln(card/delta))/lambda.
double phi_objective(double cost_hat, double c_max, double b_cost_hat, double kl, double lambda,
                     int n, int mc_controllers, int card_gamma, double delta,
                     double delta_prime);

/// Two-point perturbation gradient estimate ((f(theta + h dir) - f(theta)) / h) dir.
VectorXd perturbation_gradient(double f_theta, double f_shifted, double smoothing,
                               const VectorXd& direction);

/// Maps arbitrary parameters back to a valid posterior whose support lies in
/// the prior's: box clamped into the prior box (keeping at least min_width),
/// sigma floored at sigma_min, mu clamped into the box.
TruncGaussPosterior project_posterior(const TruncGaussPosterior& P, const TruncGaussPosterior& prior,
                                      double sigma_min, double min_width);

struct IterationRecord {
  int iteration = 0;
  double phi_theta = 0.0;
  double phi_theta_prime = 0.0;
  double grad_norm = 0.0;
  double kl = 0.0;
  double b_cost_hat = 0.0;
  bool skipped = false;
  VectorXd theta;  // after the update
};

struct InfiniteLearnResult {
  TruncGaussPosterior posterior;
  double lambda = 0.0;
  double gain_bound = 0.0;
  std::vector<IterationRecord> trace;
};

/// Gain-norm bound used by the infinite-space terms: the configured value, or
/// the largest spectral norm over the prior's support box.
double resolve_gain_bound(const BoundConfig& config, const TruncGaussPosterior& prior);

/// Two-point perturbation gradient descent on the Monte Carlo bound objective.
/// lambda is fixed for the run to the element of gamma minimizing the objective at theta0.
InfiniteLearnResult learn_infinite(const SystemDistribution& dist, const TruncGaussPosterior& prior,
                                   const TruncGaussPosterior& theta0, const CostWeights& w,
                                   const BoundConfig& config, std::span<const double> gamma,
                                   const SgdConfig& sgd, int horizon, std::uint64_t seed);

/// Certifies a truncated-Gaussian posterior with a fresh batch of L' sampled
/// controllers and n trajectories each.
BoundReport certify_infinite(const SystemDistribution& dist, const TruncGaussPosterior& P,
                             const TruncGaussPosterior& prior, const CostWeights& w,
                             const BoundConfig& config, std::span<const double> gamma,
                             int mc_controllers, int n, int horizon, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of C(K) from n_trajectories fresh trajectories.
CostEstimate evaluate_controller(const SystemDistribution& dist, const MatrixXd& K,
                                 const CostWeights& w, int horizon, int n_trajectories,
                                 std::uint64_t seed);

/// Gibbs expected cost of a pmf: controllers are enumerated and weighted, not sampled.
CostEstimate evaluate_posterior(const SystemDistribution& dist, const FinitePosterior& P,
                                std::span<const MatrixXd> controllers, const CostWeights& w,
                                int horizon, int n_trajectories, std::uint64_t seed);

/// Gibbs expected cost of a truncated-Gaussian posterior: n_controllers draws,
/// each evaluated on n_trajectories trajectories.
CostEstimate evaluate_posterior(const SystemDistribution& dist, const TruncGaussPosterior& P,
                                const CostWeights& w, int horizon, int n_controllers,
                                int n_trajectories, std::uint64_t seed);

}  // namespace pbctl

#endif  // PBCTL_LEARN_HPP
