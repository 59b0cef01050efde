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

#include "pbctl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbctl/csv.hpp"

namespace pbctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exponent * log(rho), with rho^0 = 1 even when rho = 0.
double log_pow(double exponent, double log_rho) { return exponent == 0.0 ? 0.0 : exponent * log_rho; }

double spectral_norm(const MatrixXd& K) {
  if (K.size() == 0) return 0.0;
  return Eigen::JacobiSVD<MatrixXd>(K).singularValues()(0);
}

}  // namespace

double log_sum_exp(std::span<const double> xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf || m == kInf) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::string to_string(BCostKind kind) {
  return kind == BCostKind::Theoretical ? "theoretical" : "empirical";
}

BCostKind parse_bcost_kind(const std::string& s) {
  if (s == "theoretical") return BCostKind::Theoretical;
  if (s == "empirical") return BCostKind::Empirical;
  throw ConfigError("unknown B_cost proxy '" + s + "' (expected theoretical|empirical)");
}

void BoundConfig::validate() const {
  if (omega.empty()) throw ConfigError("bound: omega must be nonempty");
  for (double l : omega)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("bound: omega entries must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("bound: delta must lie in (0,1)");
  if (delta_prime) {
    if (!(*delta_prime > 0.0 && *delta_prime < 1.0))
      throw ConfigError("bound: delta_prime must lie in (0,1)");
    if (!(delta + *delta_prime < 1.0)) throw ConfigError("bound: delta + delta_prime must be < 1");
  }
  if (!(c_B >= 1.0)) throw ConfigError("bound: c_B must be >= 1");
  if (gain_bound && !(*gain_bound > 0.0)) throw ConfigError("bound: gain_bound must be positive");
}

RhoPair rho_quantities(const MatrixXd& K, const CostWeights& w, Interval bounds_A,
                       Interval bounds_B) {
  const double k = spectral_norm(K);
  return {w.Q.norm() + k * k * w.R.norm(), bounds_A.max_abs() + bounds_B.max_abs() * k};
}

MatrixXd max_norm_corner(const BoxSpace& box) {
  require_dims(box.lower.rows() == box.upper.rows() && box.lower.cols() == box.upper.cols(),
               "box: lower and upper must have the same shape");
  if (box.lower.rows() == 1) {
    // Row gain: spectral norm is the Euclidean norm, maximized coordinatewise.
    MatrixXd K(1, box.lower.cols());
    for (Eigen::Index j = 0; j < K.cols(); ++j)
      K(0, j) = std::abs(box.lower(0, j)) >= std::abs(box.upper(0, j)) ? box.lower(0, j)
                                                                        : box.upper(0, j);
    return K;
  }
  const auto entries = box.lower.size();
  if (entries > 20) throw ConfigError("box: too many entries to enumerate corners (max 20)");
  MatrixXd best = box.lower;
  double best_norm = -1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << entries); ++mask) {
    MatrixXd K(box.lower.rows(), box.lower.cols());
    for (Eigen::Index e = 0; e < entries; ++e) {
      const auto r = e / K.cols(), c = e % K.cols();
      K(r, c) = (mask >> e) & 1 ? box.upper(r, c) : box.lower(r, c);
    }
    const double nrm = spectral_norm(K);
    if (nrm > best_norm) {
      best_norm = nrm;
      best = K;
    }
  }
  return best;
}

std::vector<MatrixXd> extreme_gains(const ControllerSpace& space) {
  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    if (f->gains.empty()) throw ConfigError("controller space: no gains");
    return f->gains;
  }
  const auto& box = std::get<BoxSpace>(space);
  if (!box.lower.allFinite() || !box.upper.allFinite())
    throw ConfigError("controller space: box must be bounded");
  return {max_norm_corner(box)};
}

double log_b_cost(const MatrixXd& K, const CostWeights& w, const ModelConstants& c, int horizon) {
  const RhoPair rho = rho_quantities(K, w, c.bounds_A, c.bounds_B);
  const double log_rho = std::log(rho.rho_m);
  const int T = horizon;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(T + 1) * (T + 2) / 2);
  for (int i = 0; i <= T; ++i) terms.push_back(std::log(128.0) + log_pow(4.0 * (T - i), log_rho));
  for (int i = 0; i <= T; ++i)
    for (int j = i + 1; j <= T; ++j)
      terms.push_back(std::log(64.0) + log_pow(4.0 * T - 2.0 * (i + j), log_rho));
  const double log_sum = log_sum_exp(terms);
  return 0.5 * (4.0 * std::log(c.sigma_w) + std::log(static_cast<double>(c.dim_x)) +
                2.0 * std::log(rho.rho_z) + log_sum);
}

LogValue b_cost_theoretical(const ControllerSpace& space, const CostWeights& w,
                            const ModelConstants& c, int horizon) {
  double best = -kInf;
  for (const MatrixXd& K : extreme_gains(space)) best = std::max(best, log_b_cost(K, w, c, horizon));
  return {best};
}

double log_lambda_threshold(const ControllerSpace& space, const CostWeights& w,
                            const ModelConstants& c, int horizon) {
  double lowest = kInf;
  for (const MatrixXd& K : extreme_gains(space)) {
    const RhoPair rho = rho_quantities(K, w, c.bounds_A, c.bounds_B);
    const double log_t = -(std::log(4.0) + 2.0 * std::log(c.sigma_w) + std::log(rho.rho_z) +
                           log_pow(2.0 * horizon, std::log(rho.rho_m)));
    lowest = std::min(lowest, log_t);
  }
  return lowest;
}

std::vector<double> admissible_lambdas(const BoundConfig& config, const ControllerSpace& space,
                                       const CostWeights& w, const ModelConstants& c,
                                       int horizon) {
  config.validate();
  std::vector<double> gamma;
  if (!config.screen_lambdas) {
    gamma = config.omega;
  } else {
    const double log_t = log_lambda_threshold(space, w, c, horizon);
    for (double l : config.omega)
      if (std::log(l) < log_t) gamma.push_back(l);
  }
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  if (gamma.empty())
    throw EmptyGammaError("no admissible lambda; enlarge omega toward smaller values");
  return gamma;
}

double b_cost_empirical(std::span<const std::vector<double>> costs_per_controller, double c_B) {
  double best = 0.0;
  for (const auto& costs : costs_per_controller) {
    const auto n = costs.size();
    if (n < 2) throw ConfigError("b_cost_empirical: need n >= 2 trajectories per controller");
    const double mean = std::accumulate(costs.begin(), costs.end(), 0.0) / n;
    double ss = 0.0;
    for (double c : costs) ss += (c - mean) * (c - mean);
    best = std::max(best, 2.0 * c_B * std::sqrt(ss / (n - 1)));
  }
  return best;
}

double b_cost_empirical(const Dataset& data, const CostWeights& w, double c_B) {
  std::vector<std::vector<double>> costs;
  costs.reserve(data.per_controller.size());
  for (const auto& block : data.per_controller) {
    if (block.empty()) throw ConfigError("b_cost_empirical: empty controller block");
    costs.push_back(trajectory_costs(block.front().gain, block, w));
  }
  return b_cost_empirical(costs, c_B);
}

std::string BoundReport::csv_header() {
  return "n,lambda_star,gibbs_empirical,mc_deviation,lambda_term,kl_term,total,b_cost_kind,"
         "b_cost_value,overflow_flag";
}

std::vector<std::string> BoundReport::csv_cells() const {
  return {std::to_string(n),
          format_number(lambda_star),
          format_number(gibbs_empirical),
          format_number(mc_deviation),
          format_number(lambda_term.linear()),
          format_number(kl_term),
          format_number(total),
          to_string(b_cost.kind),
          format_number(b_cost.value.linear()),
          overflow ? "1" : "0"};
}

std::string BoundReport::csv_row() const {
  std::string out;
  for (const std::string& c : csv_cells()) out += (out.empty() ? "" : ",") + c;
  return out;
}

namespace {

BoundReport assemble(int n, double lambda, double gibbs, double mc_dev, double kl,
                     const BCostProxy& b, int card_gamma, double delta) {
  if (!(lambda > 0.0)) throw ConfigError("bound: lambda must be > 0");
  if (n < 1) throw ConfigError("bound: n must be >= 1");
  if (card_gamma < 1) throw ConfigError("bound: card(Gamma) must be >= 1");
  BoundReport r;
  r.n = n;
  r.lambda_star = lambda;
  r.gibbs_empirical = gibbs;
  r.mc_deviation = mc_dev;
  r.b_cost = b;
  r.lambda_term = {std::log(lambda) + 2.0 * b.value.log - std::log(8.0 * n)};
  r.kl_term = (kl + std::log(card_gamma / delta)) / lambda;
  r.overflow = r.lambda_term.overflows() || b.value.overflows();
  r.total = r.overflow ? kInf : gibbs + mc_dev + r.lambda_term.linear() + r.kl_term;
  return r;
}

}  // namespace

BoundReport finite_bound_rhs(const FinitePosterior& P, const FinitePosterior& P0,
                             const VectorXd& costs, double lambda, const BCostProxy& b, int n,
                             int card_gamma, double delta) {
  const double kl = kl_finite(P, P0);
  if (std::isinf(kl)) throw ConfigError("bound: posterior is not absolutely continuous w.r.t. prior");
  return assemble(n, lambda, gibbs_empirical_cost(P.probs, costs), 0.0, kl, b, card_gamma, delta);
}

BoundReport best_finite_bound(const FinitePosterior& P, const FinitePosterior& P0,
                              const VectorXd& costs, std::span<const double> gamma,
                              const BCostProxy& b, int n, double delta) {
  if (gamma.empty()) throw EmptyGammaError("best_finite_bound: empty Gamma");
  const int card = static_cast<int>(gamma.size());
  BoundReport best = finite_bound_rhs(P, P0, costs, gamma[0], b, n, card, delta);
  for (std::size_t k = 1; k < gamma.size(); ++k) {
    BoundReport r = finite_bound_rhs(P, P0, costs, gamma[k], b, n, card, delta);
    if (r.total < best.total) best = r;
  }
  return best;
}

RangeTerms range_terms(const Dataset& data, double gain_bound, const CostWeights& w) {
  double energy = 0.0;
  for (const auto& block : data.per_controller) {
    if (block.empty()) continue;
    double s = 0.0;
    for (const Trajectory& X : block) s += X.states.squaredNorm();
    energy = std::max(energy, s / static_cast<double>(block.size()));
  }
  const double rho_z_max = w.Q.norm() + gain_bound * gain_bound * w.R.norm();
  return {rho_z_max, energy, rho_z_max * energy};
}

double hoeffding_coefficient(int mc_controllers, double delta_prime) {
  if (mc_controllers < 1) throw ConfigError("hoeffding: L' must be >= 1");
  return std::sqrt(std::log(2.0 / delta_prime) / (2.0 * mc_controllers));
}

BoundReport infinite_bound_rhs(double mc_cost, const Dataset& data, double gain_bound,
                               const CostWeights& w, double kl, double lambda,
                               const BCostProxy& b, int card_gamma, double delta,
                               double delta_prime) {
  for (const auto& block : data.per_controller)
    for (const Trajectory& X : block)
      if (spectral_norm(X.gain) > gain_bound * (1.0 + 1e-12))
        throw ConfigError("bound: sampled gain exceeds the gain-norm bound B_k");
  const RangeTerms range = range_terms(data, gain_bound, w);
  const double mc_dev = range.c_max * hoeffding_coefficient(data.num_controllers(), delta_prime);
  return assemble(data.samples_per_controller(), lambda, mc_cost, mc_dev, kl, b, card_gamma,
                  delta);
}

}  // namespace pbctl
