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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pbctl/config.hpp"
#include "pbctl/learn.hpp"
#include "support.hpp"

using namespace pbctl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

// C~(P) + KL(P||P0)/lambda on the probability simplex, by enumeration.
double simplex_grid_min(const VectorXd& p0, const VectorXd& c, double lambda, double step) {
  const int m = static_cast<int>(std::lround(1.0 / step));
  double best = kInf;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; i + j <= m; ++j) {
      const double p[3] = {i * step, j * step, (m - i - j) * step};
      double v = 0.0;
      for (int k = 0; k < 3; ++k) {
        v += p[k] * c(k);
        if (p[k] > 0) v += p[k] * std::log(p[k] / p0(k)) / lambda;
      }
      best = std::min(best, v);
    }
  return best;
}

}  // namespace

TEST_CASE("Gibbs posterior limits") {
  const FinitePosterior P0 = FinitePosterior::from_probs(vec({0.2, 0.3, 0.5}));
  CHECK(gibbs_posterior(P0, vec({2.0, 2.0, 2.0}), 3.0).probs.isApprox(P0.probs, 1e-14));
  const FinitePosterior sharp = gibbs_posterior(P0, vec({1.0, 2.0, 3.0}), 20.0);
  CHECK(sharp.probs(0) >= 1.0 - 1e-6);
  // Huge costs must not underflow the normalization.
  const FinitePosterior far = gibbs_posterior(P0, vec({1e6, 1e6 + 1, 1e6 + 2}), 1.0);
  CHECK(far.probs.sum() == doctest::Approx(1.0));
  CHECK(far.probs(0) > far.probs(1));
}

TEST_CASE("Gibbs posterior matches the simplex grid") {
  const FinitePosterior P0 = FinitePosterior::uniform(3);
  const VectorXd c = vec({1.0, 2.0, 3.0});
  const FinitePosterior P = gibbs_posterior(P0, c, 1.0);
  const double closed = gibbs_empirical_cost(P.probs, c) + kl_finite(P, P0);
  CHECK(closed <= simplex_grid_min(P0.probs, c, 1.0, 1e-3) + 1e-6);
  CHECK(closed >= simplex_grid_min(P0.probs, c, 1.0, 1e-3) - 1e-3);
}

TEST_CASE("Gibbs posterior beats random pmfs") {
  Rng rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd p0(6), c(6);
    for (int j = 0; j < 6; ++j) {
      p0(j) = 0.05 + rng.uniform();
      c(j) = 10 * rng.uniform();
    }
    const FinitePosterior P0 = FinitePosterior::from_probs(p0 / p0.sum());
    const double lambda = 0.1 + 3 * rng.uniform();
    const FinitePosterior G = gibbs_posterior(P0, c, lambda);
    const double best = finite_objective(G, P0, c, lambda, 2.0, 10, 5, 0.05);
    for (int k = 0; k < 1000; ++k) {
      VectorXd q(6);
      for (int j = 0; j < 6; ++j) q(j) = -std::log(rng.uniform());
      const FinitePosterior Q = FinitePosterior::from_probs(q / q.sum());
      REQUIRE(best <= finite_objective(Q, P0, c, lambda, 2.0, 10, 5, 0.05) + 1e-12);
    }
  }
}

TEST_CASE("finite learning") {
  const ExperimentConfig cfg = preset("example1");
  const std::vector<MatrixXd> gains = cfg.controller_space.grid->gains();
  const FinitePosterior P0 = cfg.finite_prior();
  const Dataset data = generate_dataset(cfg.system, gains, 20, cfg.horizon, 5);
  const FiniteLearnResult r = learn_finite(data, gains, cfg.weights, P0, cfg.bound, cfg.bound.omega);

  double min_obj = kInf;
  for (const auto& [lambda, obj] : r.per_lambda_objectives) min_obj = std::min(min_obj, obj);
  CHECK(r.report.total == doctest::Approx(min_obj).epsilon(1e-14));
  CHECK(r.per_lambda_objectives.size() == cfg.bound.omega.size());
  for (double lambda : cfg.bound.omega)
    CHECK(r.report.total <= finite_objective(P0, P0, r.empirical_costs, lambda, r.b_cost_hat, 20, 5,
                                             cfg.bound.delta));
  CHECK(r.b_cost_hat == doctest::Approx(b_cost_empirical(data, cfg.weights, cfg.bound.c_B)));

  // Deterministic in the dataset.
  const FiniteLearnResult again = learn_finite(data, gains, cfg.weights, P0, cfg.bound, cfg.bound.omega);
  CHECK(again.posterior.probs == r.posterior.probs);

  const std::vector<MatrixXd> one{gains.front()};
  const Dataset single = generate_dataset(cfg.system, one, 5, cfg.horizon, 5);
  CHECK(learn_finite(single, one, cfg.weights, FinitePosterior::uniform(1), cfg.bound, cfg.bound.omega)
            .posterior.probs(0) == 1.0);
  CHECK_THROWS_AS(learn_finite(data, gains, cfg.weights, P0, cfg.bound, std::vector<double>{}),
                  EmptyGammaError);
}

TEST_CASE("learned pmf improves on the prior out of sample") {
  const ExperimentConfig cfg = preset("example1");
  const std::vector<MatrixXd> gains = cfg.controller_space.grid->gains();
  const FinitePosterior P0 = cfg.finite_prior();
  const Dataset data = generate_dataset(cfg.system, gains, 100, cfg.horizon, 21);
  const FiniteLearnResult r = learn_finite(data, gains, cfg.weights, P0, cfg.bound, cfg.bound.omega);
  const CostEstimate post = evaluate_posterior(cfg.system, r.posterior, gains, cfg.weights, cfg.horizon, 1000, 8);
  const CostEstimate prior = evaluate_posterior(cfg.system, P0, gains, cfg.weights, cfg.horizon, 1000, 8);
  CHECK(post.mean < prior.mean);
}

TEST_CASE("phi objective") {
  const double base = phi_objective(0.0, 0.0, 2.0, 0.0, 1.5, 10, 10, 4, 0.5, 0.25);
  CHECK(base == doctest::Approx(std::log(4 / 0.5) / 1.5 + 1.5 * 4.0 / 80.0));
  CHECK(phi_objective(0.0, 0.0, 2.0, kInf, 1.5, 10, 10, 4, 0.5, 0.25) == kInf);
  const double with_range = phi_objective(0.0, 3.0, 2.0, 0.0, 1.5, 10, 10, 4, 0.5, 0.25);
  CHECK(with_range - base == doctest::Approx(3.0 * std::sqrt(std::log(8.0) / 20.0)));
}

TEST_CASE("projection back into the prior support") {
  const ExperimentConfig cfg = preset("example3");
  const TruncGaussPosterior& prior = cfg.gauss_prior();
  TruncGaussPosterior P = prior;
  P.lower << -5.0, -1.0;
  P.upper << 5.0, -1.0;
  P.sigma << -1.0, std::numeric_limits<double>::quiet_NaN();
  P.mu << 3.0, -7.0;
  const TruncGaussPosterior out = project_posterior(P, prior, 1e-4, 1e-3);
  CHECK(out.support_within(prior));
  CHECK(out.lower(0) == prior.lower(0));
  CHECK(out.upper(0) == prior.upper(0));
  CHECK(out.upper(1) - out.lower(1) == doctest::Approx(1e-3));
  CHECK(out.sigma(0) == 1e-4);
  CHECK(out.sigma(1) == prior.sigma(1));
  CHECK(out.mu(0) == out.upper(0));
  CHECK(out.mu(1) == out.lower(1));
  CHECK_NOTHROW(out.validate());
}

TEST_CASE("perturbation gradient descends a quadratic") {
  // f(mu) = (mu - 1.5)^2, two-point estimates with Gaussian directions.
  const double target = 1.5;
  double mean_final = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    VectorXd mu = VectorXd::Zero(1);
    for (int it = 0; it < 200; ++it) {
      VectorXd dir(1);
      dir(0) = rng.normal();
      const auto f = [&](const VectorXd& x) { return (x(0) - target) * (x(0) - target); };
      mu -= 0.05 * perturbation_gradient(f(mu), f(mu + 0.01 * dir), 0.01, dir);
    }
    mean_final += mu(0) / 20.0;
  }
  CHECK(std::abs(mean_final - target) < 0.1);
}

TEST_CASE("infinite learning") {
  ExperimentConfig cfg = preset("example3");
  const TruncGaussPosterior& prior = cfg.gauss_prior();
  SgdConfig sgd = *cfg.sgd;
  sgd.iterations = 4;
  const auto run = [&](const SgdConfig& s, std::uint64_t seed) {
    return learn_infinite(cfg.system, prior, prior, cfg.weights, cfg.bound, cfg.bound.omega, s,
                          cfg.horizon, seed);
  };

  const InfiniteLearnResult r = run(sgd, 4);
  REQUIRE(r.trace.size() == 4);
  for (const IterationRecord& rec : r.trace) {
    const TruncGaussPosterior snap = TruncGaussPosterior::from_theta(rec.theta, prior.gain_rows);
    CHECK(snap.support_within(prior));
    CHECK(std::isfinite(rec.kl));
  }
  CHECK(std::find(cfg.bound.omega.begin(), cfg.bound.omega.end(), r.lambda) != cfg.bound.omega.end());
  CHECK(run(sgd, 4).posterior == r.posterior);

  SgdConfig frozen = sgd;
  frozen.step_size = 0.0;
  CHECK(run(frozen, 4).posterior == prior);

  TruncGaussPosterior outside = prior;
  outside.upper(0) = 1.0;
  CHECK_THROWS_AS(learn_infinite(cfg.system, prior, outside, cfg.weights, cfg.bound, cfg.bound.omega,
                                 sgd, cfg.horizon, 1),
                  ConfigError);
}

TEST_CASE("evaluation") {
  const SystemDistribution zero = testing::fixed_system(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 1), 0.0);
  const CostWeights w{MatrixXd::Identity(2, 2), MatrixXd::Constant(1, 1, 0.1)};
  const std::vector<MatrixXd> gains{MatrixXd::Constant(1, 2, 0.3), MatrixXd::Constant(1, 2, -0.2)};
  CHECK(evaluate_posterior(zero, FinitePosterior::uniform(2), gains, w, 10, 50, 1).mean == 0.0);

  const ExperimentConfig cfg = preset("example1");
  const CostEstimate point = evaluate_posterior(cfg.system, FinitePosterior::point_mass(2, 1), gains,
                                                cfg.weights, 20, 200, 3);
  const std::vector<MatrixXd> alone{gains[1]};
  const CostEstimate direct = evaluate_posterior(cfg.system, FinitePosterior::uniform(1), alone,
                                                 cfg.weights, 20, 200, 3);
  CHECK(point.mean == direct.mean);
  CHECK(point.std_error == direct.std_error);

  // Two independent estimates bracket each other most of the time.
  int bracketed = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const CostEstimate a = evaluate_posterior(cfg.system, FinitePosterior::uniform(2), gains, cfg.weights, 20, 50, 2 * s);
    const CostEstimate b = evaluate_posterior(cfg.system, FinitePosterior::uniform(2), gains, cfg.weights, 20, 50, 2 * s + 1);
    if (std::abs(a.mean - b.mean) <= 3 * a.std_error) ++bracketed;
  }
  CHECK(bracketed >= 95);
}
