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

#include "pbctl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pbctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream tags; each names one independent family of substreams.
constexpr std::uint64_t kTagInitGains = 0x696e6974;
constexpr std::uint64_t kTagInitData = 0x69646174;
constexpr std::uint64_t kTagPerturb = 0x70657274;
constexpr std::uint64_t kTagGains = 0x6761696e;
constexpr std::uint64_t kTagData = 0x64617461;
constexpr std::uint64_t kTagCertGains = 0x63676169;
constexpr std::uint64_t kTagCertData = 0x63646174;
constexpr std::uint64_t kTagEvalGain = 0x6567616e;
constexpr std::uint64_t kTagEvalData = 0x65646174;

struct MeanStd {
  double mean;
  double stddev;  // unbiased; 0 for a single value
};

MeanStd mean_std(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::vector<MatrixXd> draw_gains(const TruncGaussPosterior& P, int count, std::uint64_t seed,
                                 std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  std::vector<MatrixXd> gains;
  gains.reserve(count);
  for (int j = 0; j < count; ++j) {
    Rng rng = Rng::substream(seed, {tag, a, b, static_cast<std::uint64_t>(j)});
    gains.push_back(sample_gain(P, rng));
  }
  return gains;
}

// Per-controller empirical costs and trajectory costs of one batch.
struct Batch {
  Dataset data;
  std::vector<std::vector<double>> trajectory_costs;
  std::vector<double> empirical_costs;
};

Batch evaluate_batch(const SystemDistribution& dist, std::span<const MatrixXd> gains,
                     const CostWeights& w, int n, int horizon, std::uint64_t seed) {
  Batch b;
  b.data = generate_dataset(dist, gains, n, horizon, seed);
  for (std::size_t j = 0; j < gains.size(); ++j) {
    b.trajectory_costs.push_back(trajectory_costs(gains[j], b.data.per_controller[j], w));
    const auto& c = b.trajectory_costs.back();
    b.empirical_costs.push_back(std::accumulate(c.begin(), c.end(), 0.0) / c.size());
  }
  return b;
}

Dataset concatenate(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.per_controller.insert(out.per_controller.end(), b.per_controller.begin(),
                            b.per_controller.end());
  return out;
}

}  // namespace

FinitePosterior gibbs_posterior(const FinitePosterior& P0, const VectorXd& costs, double lambda) {
  require_dims(P0.size() == costs.size(), "gibbs_posterior: length mismatch");
  if (!(lambda > 0.0)) throw ConfigError("gibbs_posterior: lambda must be > 0");
  std::vector<double> logw(P0.size());
  for (int j = 0; j < P0.size(); ++j)
    logw[j] = P0.probs(j) > 0.0 ? std::log(P0.probs(j)) - lambda * costs(j) : -kInf;
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) throw NumericalError("gibbs_posterior: all weights vanish");
  VectorXd p(P0.size());
  for (int j = 0; j < P0.size(); ++j) p(j) = std::exp(logw[j] - lse);
  p /= p.sum();
  return FinitePosterior{std::move(p)};
}

double finite_objective(const FinitePosterior& P, const FinitePosterior& P0, const VectorXd& costs,
                        double lambda, double b_cost, int n, int card_gamma, double delta) {
  return gibbs_empirical_cost(P.probs, costs) + lambda * b_cost * b_cost / (8.0 * n) +
         (kl_finite(P, P0) + std::log(card_gamma / delta)) / lambda;
}

FiniteLearnResult learn_finite(const Dataset& data, std::span<const MatrixXd> controllers,
                               const CostWeights& w, const FinitePosterior& P0,
                               const BoundConfig& config, std::span<const double> gamma) {
  config.validate();
  if (gamma.empty()) throw EmptyGammaError("learn_finite: empty Gamma");
  const int L = static_cast<int>(controllers.size());
  require_dims(data.num_controllers() == L && P0.size() == L,
               "learn_finite: dataset, controllers and prior must agree on L");
  const int n = data.samples_per_controller();

  std::vector<std::vector<double>> costs(L);
  VectorXd c_hat(L);
  for (int j = 0; j < L; ++j) {
    costs[j] = trajectory_costs(controllers[j], data.per_controller[j], w);
    c_hat(j) = std::accumulate(costs[j].begin(), costs[j].end(), 0.0) / n;
  }
  const double b_hat = b_cost_empirical(costs, config.c_B);
  const int card = static_cast<int>(gamma.size());

  FiniteLearnResult result{P0, 0.0, {}, c_hat, b_hat, {}};
  double best = kInf;
  for (double lambda : gamma) {
    FinitePosterior P = gibbs_posterior(P0, c_hat, lambda);
    const double obj = finite_objective(P, P0, c_hat, lambda, b_hat, n, card, config.delta);
    result.per_lambda_objectives.emplace_back(lambda, obj);
    if (obj < best) {
      best = obj;
      result.lambda_star = lambda;
      result.posterior = std::move(P);
    }
  }
  if (!std::isfinite(best)) throw NumericalError("learn_finite: objective is not finite for any lambda");
  result.report = finite_bound_rhs(result.posterior, P0, c_hat, result.lambda_star,
                                   {BCostKind::Empirical, LogValue::from_linear(b_hat)}, n, card,
                                   config.delta);
  return result;
}

void SgdConfig::validate() const {
  if (!(step_size >= 0.0)) throw ConfigError("sgd: step_size must be >= 0");
  if (!(smoothing > 0.0)) throw ConfigError("sgd: smoothing must be > 0");
  if (iterations < 1) throw ConfigError("sgd: iterations must be >= 1");
  if (mc_controllers < 1) throw ConfigError("sgd: mc_controllers must be >= 1");
  if (n_per_controller < 2) throw ConfigError("sgd: n_per_controller must be >= 2");
  if (!(sigma_min > 0.0)) throw ConfigError("sgd: sigma_min must be > 0");
  if (!(min_width > 0.0)) throw ConfigError("sgd: min_width must be > 0");
}

double phi_objective(double cost_hat, double c_max, double b_cost_hat, double kl, double lambda,
                     int n, int mc_controllers, int card_gamma, double delta,
                     double delta_prime) {
  if (!(lambda > 0.0)) throw ConfigError("phi_objective: lambda must be > 0");
  if (std::isinf(kl)) return kInf;
  return cost_hat + c_max * hoeffding_coefficient(mc_controllers, delta_prime) +
         lambda * b_cost_hat * b_cost_hat / (8.0 * n) +
         (kl + std::log(card_gamma / delta)) / lambda;
}

VectorXd perturbation_gradient(double f_theta, double f_shifted, double smoothing,
                               const VectorXd& direction) {
  return ((f_shifted - f_theta) / smoothing) * direction;
}

TruncGaussPosterior project_posterior(const TruncGaussPosterior& P, const TruncGaussPosterior& prior,
                                      double sigma_min, double min_width) {
  require_dims(P.dim() == prior.dim(), "project_posterior: dimension mismatch");
  TruncGaussPosterior out = P;
  out.gain_rows = prior.gain_rows;
  for (int i = 0; i < P.dim(); ++i) {
    const double lo0 = prior.lower(i), hi0 = prior.upper(i);
    const double width = std::min(min_width, hi0 - lo0);
    double lo = std::clamp(std::isfinite(P.lower(i)) ? P.lower(i) : lo0, lo0, hi0);
    double hi = std::clamp(std::isfinite(P.upper(i)) ? P.upper(i) : hi0, lo0, hi0);
    if (hi - lo < width) {
      // Re-centre a minimal interval on the midpoint, shifted to stay inside the prior box.
      const double mid = std::clamp(0.5 * (lo + hi), lo0 + 0.5 * width, hi0 - 0.5 * width);
      lo = mid - 0.5 * width;
      hi = mid + 0.5 * width;
    }
    out.lower(i) = lo;
    out.upper(i) = hi;
    out.sigma(i) = std::isfinite(P.sigma(i)) ? std::max(P.sigma(i), sigma_min) : prior.sigma(i);
    out.mu(i) = std::clamp(std::isfinite(P.mu(i)) ? P.mu(i) : prior.mu(i), lo, hi);
  }
  return out;
}

double resolve_gain_bound(const BoundConfig& config, const TruncGaussPosterior& prior) {
  if (config.gain_bound) return *config.gain_bound;
  BoxSpace box{prior.lower.reshaped<Eigen::RowMajor>(prior.gain_rows, prior.gain_cols()),
               prior.upper.reshaped<Eigen::RowMajor>(prior.gain_rows, prior.gain_cols())};
  const MatrixXd K = max_norm_corner(box);
  return Eigen::JacobiSVD<MatrixXd>(K).singularValues()(0);
}

namespace {

// Phi(P) for one batch, given the shared B_cost and C_max of the iteration.
double batch_phi(std::span<const double> empirical_costs, double c_max, double b_hat, double kl,
                 double lambda, int n, int card, const BoundConfig& config) {
  double total = 0.0;
  for (double c : empirical_costs)
    total += phi_objective(c, c_max, b_hat, kl, lambda, n, static_cast<int>(empirical_costs.size()),
                           card, config.delta, *config.delta_prime);
  return total / static_cast<double>(empirical_costs.size());
}

}  // namespace

InfiniteLearnResult learn_infinite(const SystemDistribution& dist, const TruncGaussPosterior& prior,
                                   const TruncGaussPosterior& theta0, const CostWeights& w,
                                   const BoundConfig& config, std::span<const double> gamma,
                                   const SgdConfig& sgd, int horizon, std::uint64_t seed) {
  config.validate();
  sgd.validate();
  prior.validate();
  theta0.validate();
  if (!config.delta_prime) throw ConfigError("learn_infinite: delta_prime is required");
  if (gamma.empty()) throw EmptyGammaError("learn_infinite: empty Gamma");
  if (!theta0.support_within(prior))
    throw ConfigError("learn_infinite: theta0 support must lie inside the prior support");

  const int n = sgd.n_per_controller;
  const int Lp = sgd.mc_controllers;
  const int card = static_cast<int>(gamma.size());
  const double gain_bound = resolve_gain_bound(config, prior);

  InfiniteLearnResult result{theta0, gamma.front(), gain_bound, {}};
  TruncGaussPosterior P = theta0;

  // Fix lambda from the objective at theta0.
  {
    const auto gains = draw_gains(P, Lp, seed, kTagInitGains, 0, 0);
    const Batch batch = evaluate_batch(dist, gains, w, n, horizon, derive_seed(seed, {kTagInitData}));
    const double b_hat = b_cost_empirical(batch.trajectory_costs, config.c_B);
    const double c_max = range_terms(batch.data, gain_bound, w).c_max;
    const double kl = kl_truncgauss(P, prior);
    double best = kInf;
    for (double lambda : gamma) {
      const double phi = batch_phi(batch.empirical_costs, c_max, b_hat, kl, lambda, n, card, config);
      if (phi < best) {
        best = phi;
        result.lambda = lambda;
      }
    }
  }
  const double lambda = result.lambda;

  const int dim = 4 * P.dim();
  bool any_update = false;
  for (int it = 1; it <= sgd.iterations; ++it) {
    const auto k = static_cast<std::uint64_t>(it);
    Rng perturb = Rng::substream(seed, {kTagPerturb, k});
    VectorXd delta_dir(dim);
    for (int i = 0; i < dim; ++i) delta_dir(i) = perturb.normal();

    const VectorXd theta = P.theta();
    const TruncGaussPosterior P_shift = project_posterior(
        TruncGaussPosterior::from_theta(theta + sgd.smoothing * delta_dir, P.gain_rows), prior,
        sgd.sigma_min, sgd.min_width);

    const auto gains = draw_gains(P, Lp, seed, kTagGains, k, 0);
    const auto gains_shift = draw_gains(P_shift, Lp, seed, kTagGains, k, 1);
    const Batch batch = evaluate_batch(dist, gains, w, n, horizon, derive_seed(seed, {kTagData, k, 0}));
    const Batch batch_shift =
        evaluate_batch(dist, gains_shift, w, n, horizon, derive_seed(seed, {kTagData, k, 1}));

    // B_cost and C_max come from the whole iteration dataset (both batches).
    std::vector<std::vector<double>> all_costs = batch.trajectory_costs;
    all_costs.insert(all_costs.end(), batch_shift.trajectory_costs.begin(),
                     batch_shift.trajectory_costs.end());
    const double b_hat = b_cost_empirical(all_costs, config.c_B);
    const double c_max = range_terms(concatenate(batch.data, batch_shift.data), gain_bound, w).c_max;

    const double kl = kl_truncgauss(P, prior);
    const double kl_shift = kl_truncgauss(P_shift, prior);
    IterationRecord rec;
    rec.iteration = it;
    rec.phi_theta = batch_phi(batch.empirical_costs, c_max, b_hat, kl, lambda, n, card, config);
    rec.phi_theta_prime =
        batch_phi(batch_shift.empirical_costs, c_max, b_hat, kl_shift, lambda, n, card, config);
    rec.b_cost_hat = b_hat;

    const VectorXd grad =
        perturbation_gradient(rec.phi_theta, rec.phi_theta_prime, sgd.smoothing, delta_dir);
    rec.grad_norm = grad.norm();
    if (!grad.allFinite()) {
      rec.skipped = true;
    } else {
      P = project_posterior(TruncGaussPosterior::from_theta(theta - sgd.step_size * grad, P.gain_rows),
                            prior, sgd.sigma_min, sgd.min_width);
      any_update = true;
    }
    rec.kl = kl_truncgauss(P, prior);
    rec.theta = P.theta();
    result.trace.push_back(std::move(rec));
  }
  if (!any_update) throw NumericalError("learn_infinite: every iteration produced a non-finite gradient");
  result.posterior = P;
  return result;
}

BoundReport certify_infinite(const SystemDistribution& dist, const TruncGaussPosterior& P,
                             const TruncGaussPosterior& prior, const CostWeights& w,
                             const BoundConfig& config, std::span<const double> gamma,
                             int mc_controllers, int n, int horizon, std::uint64_t seed) {
  config.validate();
  if (!config.delta_prime) throw ConfigError("certify_infinite: delta_prime is required");
  if (gamma.empty()) throw EmptyGammaError("certify_infinite: empty Gamma");
  const double gain_bound = resolve_gain_bound(config, prior);
  const auto gains = draw_gains(P, mc_controllers, seed, kTagCertGains, 0, 0);
  const Batch batch = evaluate_batch(dist, gains, w, n, horizon, derive_seed(seed, {kTagCertData}));
  const double mc_cost = mc_gibbs_cost(batch.empirical_costs);
  const double kl = kl_truncgauss(P, prior);

  BCostProxy b{config.certify_with, {}};
  if (config.certify_with == BCostKind::Empirical) {
    b.value = LogValue::from_linear(b_cost_empirical(batch.trajectory_costs, config.c_B));
  } else {
    BoxSpace box{prior.lower.reshaped<Eigen::RowMajor>(prior.gain_rows, prior.gain_cols()),
                 prior.upper.reshaped<Eigen::RowMajor>(prior.gain_rows, prior.gain_cols())};
    b.value = b_cost_theoretical(box, w, ModelConstants::from(dist), horizon);
  }
  const int card = static_cast<int>(gamma.size());
  BoundReport best;
  best.total = kInf;
  bool first = true;
  for (double lambda : gamma) {
    BoundReport r = infinite_bound_rhs(mc_cost, batch.data, gain_bound, w, kl, lambda, b, card,
                                       config.delta, *config.delta_prime);
    if (first || r.total < best.total) best = r;
    first = false;
  }
  return best;
}

CostEstimate evaluate_controller(const SystemDistribution& dist, const MatrixXd& K,
                                 const CostWeights& w, int horizon, int n_trajectories,
                                 std::uint64_t seed) {
  if (n_trajectories < 1) throw ConfigError("evaluate: n_trajectories must be >= 1");
  std::vector<double> costs;
  costs.reserve(n_trajectories);
  for (int i = 0; i < n_trajectories; ++i) {
    Rng rng = trajectory_stream(seed, K, i);
    costs.push_back(quadratic_cost(K, sample_trajectory(dist, K, horizon, rng), w));
  }
  const MeanStd s = mean_std(costs);
  return {s.mean, s.stddev / std::sqrt(static_cast<double>(n_trajectories))};
}

CostEstimate evaluate_posterior(const SystemDistribution& dist, const FinitePosterior& P,
                                std::span<const MatrixXd> controllers, const CostWeights& w,
                                int horizon, int n_trajectories, std::uint64_t seed) {
  require_dims(P.size() == static_cast<int>(controllers.size()),
               "evaluate_posterior: pmf and controller list differ in length");
  CostEstimate out;
  double var = 0.0;
  for (int j = 0; j < P.size(); ++j) {
    const double p = P.probs(j);
    if (p == 0.0) continue;
    const CostEstimate e = evaluate_controller(dist, controllers[j], w, horizon, n_trajectories,
                                               derive_seed(seed, {kTagEvalData}));
    out.mean += p * e.mean;
    var += p * p * e.std_error * e.std_error;
  }
  out.std_error = std::sqrt(var);
  return out;
}

CostEstimate evaluate_posterior(const SystemDistribution& dist, const TruncGaussPosterior& P,
                                const CostWeights& w, int horizon, int n_controllers,
                                int n_trajectories, std::uint64_t seed) {
  if (n_controllers < 1) throw ConfigError("evaluate: n_controllers must be >= 1");
  std::vector<double> means;
  means.reserve(n_controllers);
  CostEstimate single;
  for (int c = 0; c < n_controllers; ++c) {
    Rng rng = Rng::substream(seed, {kTagEvalGain, static_cast<std::uint64_t>(c)});
    const MatrixXd K = sample_gain(P, rng);
    single = evaluate_controller(dist, K, w, horizon, n_trajectories,
                                 derive_seed(seed, {kTagEvalData, static_cast<std::uint64_t>(c)}));
    means.push_back(single.mean);
  }
  if (n_controllers == 1) return single;
  const MeanStd s = mean_std(means);
  return {s.mean, s.stddev / std::sqrt(static_cast<double>(n_controllers))};
}

}  // namespace pbctl
