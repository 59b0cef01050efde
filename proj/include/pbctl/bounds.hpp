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

#ifndef PBCTL_BOUNDS_HPP
#define PBCTL_BOUNDS_HPP

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pbctl/cost.hpp"
#include "pbctl/posterior.hpp"
#include "pbctl/sysmodel.hpp"

namespace pbctl {

/// Nonnegative quantity stored by its logarithm, so powers like rho^{4T}
/// can be carried past the double range and reported as overflow.
struct LogValue {
  double log = -std::numeric_limits<double>::infinity();

  static LogValue from_linear(double v) { return {v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity()}; }
  bool overflows() const { return log > std::log(std::numeric_limits<double>::max()); }
  double linear() const { return overflows() ? std::numeric_limits<double>::infinity() : std::exp(log); }
};

/// log(sum_k exp(x_k)), ignoring -inf entries.
double log_sum_exp(std::span<const double> xs);

enum class BCostKind { Theoretical, Empirical };
std::string to_string(BCostKind kind);
BCostKind parse_bcost_kind(const std::string& s);

/// Variance proxy entering the lambda B^2 / (8n) term.
struct BCostProxy {
  BCostKind kind = BCostKind::Empirical;
  LogValue value;
};

struct FiniteSpace {
  std::vector<MatrixXd> gains;
};

/// Entrywise box lower <= K <= upper.
struct BoxSpace {
  MatrixXd lower;
  MatrixXd upper;
};

using ControllerSpace = std::variant<FiniteSpace, BoxSpace>;

/// Constants the bounds need from the system model: entry ranges of A and B,
/// the noise sub-Gaussian constant and the state dimension.
struct ModelConstants {
  Interval bounds_A;
  Interval bounds_B;
  double sigma_w = 0.0;
  int dim_x = 0;

  static ModelConstants from(const SystemDistribution& d) {
    return {d.bounds_A, d.bounds_B, d.sigma_w, d.dim_x};
  }
};

struct BoundConfig {
  std::vector<double> omega;
  double delta = 0.05;
  std::optional<double> delta_prime;
  double c_B = 1.0;
  /// Bound on the spectral norm of every gain; infinite-space bound only.
  std::optional<double> gain_bound;
  /// Intersect Omega with the interval on which the cost MGF bound holds.
  bool screen_lambdas = true;
  /// Proxy used when certifying (learning always uses the empirical one).
  BCostKind certify_with = BCostKind::Empirical;

  void validate() const;
  bool operator==(const BoundConfig&) const = default;
};

/// Thrown when no candidate lambda survives the admissibility screen.
class EmptyGammaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct RhoPair {
  double rho_z;  // ||Q||_F + ||K||^2 ||R||_F
  double rho_m;  // rho_A + rho_B ||K||
};

RhoPair rho_quantities(const MatrixXd& K, const CostWeights& w, Interval bounds_A,
                       Interval bounds_B);

/// Corner of the box whose spectral norm is largest.
MatrixXd max_norm_corner(const BoxSpace& box);

/// The gain(s) at which the supremum of the bound constants is attained.
std::vector<MatrixXd> extreme_gains(const ControllerSpace& space);

/// log B_cost for a single gain.
double log_b_cost(const MatrixXd& K, const CostWeights& w, const ModelConstants& c, int horizon);

/// Theoretical B_cost: supremum over the controller space, in log space.
LogValue b_cost_theoretical(const ControllerSpace& space, const CostWeights& w,
                            const ModelConstants& c, int horizon);

/// log of inf_K 1 / (4 sigma_w^2 rho_Z(K) rho_M(K)^{2T}).
double log_lambda_threshold(const ControllerSpace& space, const CostWeights& w,
                            const ModelConstants& c, int horizon);

/// Gamma = Omega intersected with (0, threshold), or Omega itself when
/// screening is disabled. Throws EmptyGammaError if nothing survives.
std::vector<double> admissible_lambdas(const BoundConfig& config, const ControllerSpace& space,
                                       const CostWeights& w, const ModelConstants& c,
                                       int horizon);

/// max_j 2 c_B sqrt(unbiased variance of controller j's trajectory costs).
double b_cost_empirical(std::span<const std::vector<double>> costs_per_controller, double c_B);
double b_cost_empirical(const Dataset& data, const CostWeights& w, double c_B);

/// Decomposed value of a PAC-Bayes bound.
struct BoundReport {
  int n = 0;
  double lambda_star = 0.0;
  double gibbs_empirical = 0.0;
  double mc_deviation = 0.0;
  LogValue lambda_term;
  double kl_term = 0.0;
  double total = 0.0;
  BCostProxy b_cost;
  bool overflow = false;

  static std::string csv_header();
  std::vector<std::string> csv_cells() const;
  std::string csv_row() const;
};

/// C~(P) + lambda B^2/(8n) + (KL(P||P0) + ln(card(Gamma)/delta)) / lambda.
/// Throws ConfigError if P is not absolutely continuous w.r.t. P0.
BoundReport finite_bound_rhs(const FinitePosterior& P, const FinitePosterior& P0,
                             const VectorXd& costs, double lambda, const BCostProxy& b, int n,
                             int card_gamma, double delta);

/// Smallest finite-space bound over lambda in Gamma (the bound holds
/// simultaneously for all of them).
BoundReport best_finite_bound(const FinitePosterior& P, const FinitePosterior& P0,
                              const VectorXd& costs, std::span<const double> gamma,
                              const BCostProxy& b, int n, double delta);

/// Range constants of the Monte Carlo deviation term.
struct RangeTerms {
  double rho_z_max;  // ||Q||_F + B_k^2 ||R||_F
  double energy;     // V(S) = max_j (1/n) sum_i sum_t ||x||^2
  double c_max;      // rho_z_max * V(S)
};

RangeTerms range_terms(const Dataset& data, double gain_bound, const CostWeights& w);

/// sqrt(ln(2/delta') / (2 L')).
double hoeffding_coefficient(int mc_controllers, double delta_prime);

/// Infinite-space bound: C~_{L'} + C_max sqrt(ln(2/delta')/(2L')) + lambda B^2/(8n) +
/// (KL + ln(card(Gamma)/delta)) / lambda. The dataset holds the L' sampled
/// controllers' trajectories; a gain with norm above gain_bound is an error.
BoundReport infinite_bound_rhs(double mc_cost, const Dataset& data, double gain_bound,
                               const CostWeights& w, double kl, double lambda,
                               const BCostProxy& b, int card_gamma, double delta,
                               double delta_prime);

}  // namespace pbctl

#endif  // PBCTL_BOUNDS_HPP
