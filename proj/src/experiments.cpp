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

#include "pbctl/experiments.hpp"

#include <fstream>
#include <sstream>

#include "pbctl/csv.hpp"
#include "pbctl/lqg.hpp"

namespace pbctl {

namespace {

constexpr std::uint64_t kTagTrain = 0x74726169;
constexpr std::uint64_t kTagTest = 0x74657374;
constexpr std::uint64_t kTagLearn = 0x6c65726e;
constexpr std::uint64_t kTagCert = 0x63657274;
constexpr std::uint64_t kTagPrior = 0x70726972;

std::vector<std::string> split_header(const std::string& h) {
  std::vector<std::string> out;
  std::stringstream ss(h);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void write_effective_config(const ExperimentConfig& cfg, std::uint64_t seed,
                            const std::filesystem::path& out) {
  ExperimentConfig effective = cfg;
  effective.seed = seed;
  std::ofstream f(out / "config.json", std::ios::binary);
  if (!f) throw IoError("cannot write " + (out / "config.json").string());
  f << serialize_config(effective);
}

CsvMetadata meta_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  return {seed, config_hash(cfg)};
}

}  // namespace

BCostProxy certify_proxy(const ExperimentConfig& cfg, const ControllerSpace& space, int horizon,
                         double b_cost_hat) {
  if (cfg.bound.certify_with == BCostKind::Empirical)
    return {BCostKind::Empirical, LogValue::from_linear(b_cost_hat)};
  return {BCostKind::Theoretical,
          b_cost_theoretical(space, cfg.weights, ModelConstants::from(cfg.system), horizon)};
}

std::vector<std::string> trace_header(int theta_dim) {
  std::vector<std::string> h{"iteration", "phi_theta", "phi_theta_prime", "grad_norm",
                             "kl",        "b_hat",     "skipped"};
  for (int i = 0; i < theta_dim; ++i) h.push_back("theta_" + std::to_string(i));
  return h;
}

std::vector<std::string> trace_cells(const IterationRecord& r) {
  std::vector<std::string> c{std::to_string(r.iteration), format_number(r.phi_theta),
                             format_number(r.phi_theta_prime), format_number(r.grad_norm),
                             format_number(r.kl), format_number(r.b_cost_hat),
                             r.skipped ? "1" : "0"};
  for (Eigen::Index i = 0; i < r.theta.size(); ++i) c.push_back(format_number(r.theta(i)));
  return c;
}

std::vector<Example1Row> run_example1(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out) {
  cfg.validate();
  if (!cfg.controller_space.grid) throw ConfigError("example1: needs a grid controller space");
  const int T = cfg.horizon;
  const std::vector<MatrixXd> gains = cfg.controller_space.grid->gains();
  const ControllerSpace space = FiniteSpace{gains};
  const FinitePosterior P0 = cfg.finite_prior();
  const std::vector<double> gamma =
      admissible_lambdas(cfg.bound, space, cfg.weights, ModelConstants::from(cfg.system), T);

  // One training stream for the whole sweep: the n-sample set extends the
  // smaller ones, so the curve reflects n rather than resampling noise.
  const std::uint64_t train_seed = derive_seed(seed, {kTagTrain});
  const std::uint64_t test_seed = derive_seed(seed, {kTagTest});
  const int n_test = cfg.evaluation.test_trajectories;
  const CostEstimate prior = evaluate_posterior(cfg.system, P0, gains, cfg.weights, T, n_test, test_seed);

  std::vector<Example1Row> rows;
  for (int n : cfg.sweep.samples) {
    const Dataset data = generate_dataset(cfg.system, gains, n, T, train_seed);
    const FiniteLearnResult learned = learn_finite(data, gains, cfg.weights, P0, cfg.bound, gamma);
    Example1Row row;
    row.n = n;
    row.bound = best_finite_bound(learned.posterior, P0, learned.empirical_costs, gamma,
                                  certify_proxy(cfg, space, T, learned.b_cost_hat), n, cfg.bound.delta);
    row.posterior =
        evaluate_posterior(cfg.system, learned.posterior, gains, cfg.weights, T, n_test, test_seed);
    row.prior = prior;
    rows.push_back(row);
  }

  if (out) {
    std::filesystem::create_directories(*out);
    CsvWriter csv(*out / "example1.csv", meta_for(cfg, seed),
                  cat({"n", "bound_total", "expected_cost", "std_error", "cost_prior", "prior_std_error"},
                      split_header(BoundReport::csv_header())));
    for (const Example1Row& r : rows)
      csv.row(cat({std::to_string(r.n), format_number(r.bound.total), format_number(r.posterior.mean),
                   format_number(r.posterior.std_error), format_number(r.prior.mean),
                   format_number(r.prior.std_error)},
                  r.bound.csv_cells()));
    write_effective_config(cfg, seed, *out);
  }
  return rows;
}

std::vector<Example2Row> run_example2(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out) {
  cfg.validate();
  if (!cfg.controller_space.grid) throw ConfigError("example2: needs a grid controller space");
  if (!cfg.system.std_A.isZero() || !cfg.system.std_B.isZero())
    throw ConfigError("example2: the system must be deterministic (zero std_A and std_B)");
  if (cfg.sweep.samples.empty()) throw ConfigError("example2: sweep.samples must give n");
  const int n = cfg.sweep.samples.front();
  const std::vector<MatrixXd> gains = cfg.controller_space.grid->gains();
  const ControllerSpace space = FiniteSpace{gains};
  const FinitePosterior P0 = cfg.finite_prior();
  const int n_test = cfg.evaluation.test_trajectories;
  const MatrixXd& A = cfg.system.mean_A;
  const MatrixXd& B = cfg.system.mean_B;

  std::vector<Example2Row> rows;
  for (int T : cfg.sweep.horizons) {
    const auto t = static_cast<std::uint64_t>(T);
    const std::vector<double> gamma =
        admissible_lambdas(cfg.bound, space, cfg.weights, ModelConstants::from(cfg.system), T);
    const Dataset data = generate_dataset(cfg.system, gains, n, T, derive_seed(seed, {kTagTrain, t}));
    const FiniteLearnResult learned = learn_finite(data, gains, cfg.weights, P0, cfg.bound, gamma);
    const std::uint64_t test_seed = derive_seed(seed, {kTagTest, t});

    Example2Row row;
    row.horizon = T;
    row.prior = evaluate_posterior(cfg.system, P0, gains, cfg.weights, T, n_test, test_seed);
    row.pac = evaluate_posterior(cfg.system, learned.posterior, gains, cfg.weights, T, n_test, test_seed);
    row.lqg = lqg_expected_cost(riccati_solve(A, B, cfg.weights, T), cfg.system.noise_covariance());
    row.lambda_star = learned.lambda_star;
    row.bound_total = best_finite_bound(learned.posterior, P0, learned.empirical_costs, gamma,
                                        certify_proxy(cfg, space, T, learned.b_cost_hat), n,
                                        cfg.bound.delta)
                          .total;
    rows.push_back(row);
  }

  if (out) {
    std::filesystem::create_directories(*out);
    CsvWriter csv(*out / "example2.csv", meta_for(cfg, seed),
                  {"T", "cost_prior", "prior_std_error", "cost_pac", "pac_std_error", "cost_lqg",
                   "lambda_star", "bound_total"});
    for (const Example2Row& r : rows)
      csv.row({std::to_string(r.horizon), format_number(r.prior.mean), format_number(r.prior.std_error),
               format_number(r.pac.mean), format_number(r.pac.std_error), format_number(r.lqg),
               format_number(r.lambda_star), format_number(r.bound_total)});
    write_effective_config(cfg, seed, *out);
  }
  return rows;
}

std::vector<Example3Row> run_example3(const ExperimentConfig& cfg, std::uint64_t seed,
                                      const std::optional<std::filesystem::path>& out) {
  cfg.validate();
  if (!cfg.controller_space.box) throw ConfigError("example3: needs a box controller space");
  const int T = cfg.horizon;
  const BoxSpec& box = *cfg.controller_space.box;
  const ControllerSpace space = BoxSpace{box.lower, box.upper};
  const TruncGaussPosterior& prior = cfg.gauss_prior();
  const std::vector<double> gamma =
      admissible_lambdas(cfg.bound, space, cfg.weights, ModelConstants::from(cfg.system), T);
  const int n_c = cfg.evaluation.test_controllers;
  const int n_t = cfg.evaluation.test_trajectories;
  const CostEstimate prior_cost =
      evaluate_posterior(cfg.system, prior, cfg.weights, T, n_c, n_t, derive_seed(seed, {kTagPrior}));

  std::vector<Example3Row> rows;
  for (int n : cfg.sweep.samples) {
    const auto nn = static_cast<std::uint64_t>(n);
    SgdConfig sgd = *cfg.sgd;
    sgd.n_per_controller = n;
    Example3Row row;
    row.n = n;
    row.learned = learn_infinite(cfg.system, prior, prior, cfg.weights, cfg.bound, gamma, sgd, T,
                                 derive_seed(seed, {kTagLearn, nn}));
    row.lambda = row.learned.lambda;
    row.prior = prior_cost;
    row.posterior = evaluate_posterior(cfg.system, row.learned.posterior, cfg.weights, T, n_c, n_t,
                                       derive_seed(seed, {kTagTest, nn}));
    row.bound = certify_infinite(cfg.system, row.learned.posterior, prior, cfg.weights, cfg.bound,
                                 gamma, sgd.mc_controllers, n, T, derive_seed(seed, {kTagCert, nn}));
    rows.push_back(std::move(row));
  }

  if (out) {
    std::filesystem::create_directories(*out);
    const CsvMetadata meta = meta_for(cfg, seed);
    CsvWriter csv(*out / "example3.csv", meta,
                  {"n", "cost_prior", "prior_std_error", "cost_posterior", "posterior_std_error",
                   "lambda", "bound_total"});
    for (const Example3Row& r : rows)
      csv.row({std::to_string(r.n), format_number(r.prior.mean), format_number(r.prior.std_error),
               format_number(r.posterior.mean), format_number(r.posterior.std_error),
               format_number(r.lambda), format_number(r.bound.total)});
    const int dim = rows.empty() ? 0 : static_cast<int>(rows.front().learned.posterior.theta().size());
    CsvWriter trace(*out / "example3_trace.csv", meta, cat({"n", "lambda"}, trace_header(dim)));
    for (const Example3Row& r : rows)
      for (const IterationRecord& rec : r.learned.trace)
        trace.row(cat({std::to_string(r.n), format_number(r.lambda)}, trace_cells(rec)));
    write_effective_config(cfg, seed, *out);
  }
  return rows;
}

void reproduce_example(int which, const ExperimentConfig& cfg, std::uint64_t seed,
                       const std::filesystem::path& out) {
  switch (which) {
    case 1: run_example1(cfg, seed, out); break;
    case 2: run_example2(cfg, seed, out); break;
    case 3: run_example3(cfg, seed, out); break;
    default: throw ConfigError("reproduce-example: expected 1, 2 or 3");
  }
}

}  // namespace pbctl
