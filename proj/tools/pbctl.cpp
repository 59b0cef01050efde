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

// pbctl: learn state-feedback controllers by minimizing PAC-Bayes bounds,
// certify them, and reproduce the reference experiments.
//
// Exit codes: 0 ok, 2 usage, 3 malformed config, 4 empty lambda set,
// 5 numerical failure, 6 I/O, 1 anything else. Failures print one line
//   pbctl: error[<category>]: <message>
// on stderr.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pbctl/config.hpp"
#include "pbctl/coverage.hpp"
#include "pbctl/csv.hpp"
#include "pbctl/experiments.hpp"
#include "pbctl/lqg.hpp"

namespace fs = std::filesystem;
using namespace pbctl;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kConfig = 3, kEmptyGamma = 4, kNumerical = 5, kIo = 6 };

int fail(Exit code, const char* category, const std::string& msg) {
  std::string line = msg;
  for (char& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "pbctl: error[" << category << "]: " << line << '\n';
  return code;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
}

struct Run {
  ExperimentConfig cfg;
  std::uint64_t seed;
  fs::path out;
  CsvMetadata meta;
};

Run prepare(const Common& c, const std::optional<ExperimentConfig>& fallback = std::nullopt) {
  Run r;
  r.cfg = c.config.empty() ? *fallback : load_config(c.config);
  r.seed = c.seed.value_or(r.cfg.seed);
  r.out = c.out.empty() ? fs::path(r.cfg.output_dir) : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(r.out, ec);
  if (ec) throw IoError("cannot create " + r.out.string() + ": " + ec.message());
  r.cfg.seed = r.seed;
  r.meta = {r.seed, config_hash(r.cfg)};
  std::ofstream f(r.out / "config.json", std::ios::binary);
  if (!f) throw IoError("cannot write " + (r.out / "config.json").string());
  f << serialize_config(r.cfg);
  return r;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  f << text;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

std::vector<double> gamma_for(const ExperimentConfig& cfg) {
  return admissible_lambdas(cfg.bound, cfg.controller_space.materialize(), cfg.weights,
                            ModelConstants::from(cfg.system), cfg.horizon);
}

// Gains for simulate: the grid, or draws from the prior for a box space.
std::vector<MatrixXd> simulation_gains(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.controller_space.grid) return cfg.controller_space.grid->gains();
  std::vector<MatrixXd> gains;
  for (int j = 0; j < cfg.sgd->mc_controllers; ++j) {
    Rng rng = Rng::substream(seed, {0x73696d67, static_cast<std::uint64_t>(j)});
    gains.push_back(sample_gain(cfg.gauss_prior(), rng));
  }
  return gains;
}

void write_gains(const fs::path& p, const std::vector<MatrixXd>& gains, const CsvMetadata& meta) {
  std::vector<std::string> cols{"controller_index"};
  const auto rows = gains.front().rows(), cols_k = gains.front().cols();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols_k; ++k)
      cols.push_back("k_" + std::to_string(i) + "_" + std::to_string(k));
  CsvWriter csv(p, meta, cols);
  for (std::size_t j = 0; j < gains.size(); ++j) {
    std::vector<std::string> cells{std::to_string(j)};
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index k = 0; k < cols_k; ++k) cells.push_back(format_number(gains[j](i, k)));
    csv.row(cells);
  }
}

void write_report(const fs::path& p, const BoundReport& r, const CsvMetadata& meta) {
  CsvWriter csv(p, meta, split(BoundReport::csv_header()));
  csv.row(r.csv_cells());
}

int cmd_simulate(const Common& c) {
  const Run r = prepare(c);
  const auto gains = simulation_gains(r.cfg, r.seed);
  const Dataset data =
      generate_dataset(r.cfg.system, gains, r.cfg.samples_per_controller, r.cfg.horizon, r.seed);
  write_gains(r.out / "controllers.csv", gains, r.meta);
  write_dataset_csv(r.out / "dataset.csv", data, r.meta);
  return kOk;
}

int cmd_learn_finite(const Common& c) {
  const Run r = prepare(c);
  if (!r.cfg.controller_space.grid) throw ConfigError("learn-finite: needs a grid controller space");
  const auto gains = r.cfg.controller_space.grid->gains();
  const auto gamma = gamma_for(r.cfg);
  const Dataset data =
      generate_dataset(r.cfg.system, gains, r.cfg.samples_per_controller, r.cfg.horizon, r.seed);
  const FiniteLearnResult res =
      learn_finite(data, gains, r.cfg.weights, r.cfg.finite_prior(), r.cfg.bound, gamma);

  write_text(r.out / "posterior.json", serialize_posterior(res.posterior));
  write_report(r.out / "bound.csv", res.report, r.meta);
  CsvWriter obj(r.out / "objectives.csv", r.meta, {"lambda", "objective", "selected"});
  for (const auto& [lambda, value] : res.per_lambda_objectives)
    obj.row({format_number(lambda), format_number(value), lambda == res.lambda_star ? "1" : "0"});
  CsvWriter post(r.out / "posterior.csv", r.meta, {"controller_index", "probability", "empirical_cost"});
  for (int j = 0; j < res.posterior.size(); ++j)
    post.row({std::to_string(j), format_number(res.posterior.probs(j)),
              format_number(res.empirical_costs(j))});
  return kOk;
}

int cmd_learn_infinite(const Common& c) {
  const Run r = prepare(c);
  if (!r.cfg.controller_space.box) throw ConfigError("learn-infinite: needs a box controller space");
  const auto gamma = gamma_for(r.cfg);
  const TruncGaussPosterior& prior = r.cfg.gauss_prior();
  SgdConfig sgd = *r.cfg.sgd;
  sgd.n_per_controller = r.cfg.samples_per_controller;
  const InfiniteLearnResult res = learn_infinite(r.cfg.system, prior, prior, r.cfg.weights,
                                                 r.cfg.bound, gamma, sgd, r.cfg.horizon, r.seed);
  const BoundReport report =
      certify_infinite(r.cfg.system, res.posterior, prior, r.cfg.weights, r.cfg.bound, gamma,
                       sgd.mc_controllers, sgd.n_per_controller, r.cfg.horizon,
                       derive_seed(r.seed, {0x63657274}));

  write_text(r.out / "posterior.json", serialize_posterior(res.posterior));
  write_report(r.out / "bound.csv", report, r.meta);
  // lambda is fixed for the whole run; every trace row repeats it.
  std::vector<std::string> cols{"lambda"};
  for (const std::string& h : trace_header(static_cast<int>(res.posterior.theta().size()))) cols.push_back(h);
  CsvWriter trace(r.out / "trace.csv", r.meta, cols);
  for (const IterationRecord& rec : res.trace) {
    std::vector<std::string> cells{format_number(res.lambda)};
    for (const std::string& v : trace_cells(rec)) cells.push_back(v);
    trace.row(cells);
  }
  CsvWriter lam(r.out / "lambda.csv", r.meta, {"lambda", "gain_bound"});
  lam.row(std::vector<double>{res.lambda, res.gain_bound});
  return kOk;
}

int cmd_lqg(const Common& c) {
  const Run r = prepare(c);
  const SystemDistribution& s = r.cfg.system;
  if (!s.std_A.isZero() || !s.std_B.isZero())
    throw ConfigError("lqg-baseline: the system must be deterministic (zero std_A and std_B)");
  const auto sol = riccati_solve(s.mean_A, s.mean_B, r.cfg.weights, r.cfg.horizon);
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < s.dim_u; ++i)
    for (int k = 0; k < s.dim_x; ++k) cols.push_back("k_" + std::to_string(i) + "_" + std::to_string(k));
  CsvWriter gains(r.out / "lqg_gains.csv", r.meta, cols);
  for (int t = 0; t < sol.horizon(); ++t) {
    std::vector<std::string> cells{std::to_string(t)};
    for (int i = 0; i < s.dim_u; ++i)
      for (int k = 0; k < s.dim_x; ++k) cells.push_back(format_number(sol.gains[t](i, k)));
    gains.row(cells);
  }
  CsvWriter cost(r.out / "lqg_cost.csv", r.meta, {"T", "cost_lqg"});
  cost.row({std::to_string(r.cfg.horizon),
            format_number(lqg_expected_cost(sol, s.noise_covariance()))});
  return kOk;
}

int cmd_bound(const Common& c, const std::string& posterior_path) {
  const Run r = prepare(c);
  const PosteriorFile pf = load_posterior(posterior_path);
  const auto gamma = gamma_for(r.cfg);
  BoundReport report;
  if (r.cfg.controller_space.grid) {
    if (!pf.finite) throw ConfigError("bound: a grid space needs a pmf posterior");
    const auto gains = r.cfg.controller_space.grid->gains();
    if (pf.finite->size() != static_cast<int>(gains.size()))
      throw ConfigError("bound: posterior length does not match the grid");
    const int n = r.cfg.samples_per_controller;
    const Dataset data = generate_dataset(r.cfg.system, gains, n, r.cfg.horizon, r.seed);
    VectorXd costs(gains.size());
    for (std::size_t j = 0; j < gains.size(); ++j)
      costs(j) = empirical_cost(gains[j], data.per_controller[j], r.cfg.weights);
    const double b_hat = b_cost_empirical(data, r.cfg.weights, r.cfg.bound.c_B);
    report = best_finite_bound(*pf.finite, r.cfg.finite_prior(), costs, gamma,
                               certify_proxy(r.cfg, r.cfg.controller_space.materialize(),
                                             r.cfg.horizon, b_hat),
                               n, r.cfg.bound.delta);
  } else {
    if (!pf.truncated_gaussian) throw ConfigError("bound: a box space needs a truncated_gaussian posterior");
    const int Lp = r.cfg.sgd->mc_controllers;
    report = certify_infinite(r.cfg.system, *pf.truncated_gaussian, r.cfg.gauss_prior(), r.cfg.weights,
                              r.cfg.bound, gamma, Lp, r.cfg.samples_per_controller, r.cfg.horizon,
                              r.seed);
  }
  write_report(r.out / "bound.csv", report, r.meta);
  return kOk;
}

int cmd_coverage(const Common& c, std::optional<int> reps, std::optional<double> delta) {
  Run r = prepare(c);
  if (reps) r.cfg.coverage.repetitions = *reps;
  if (delta) r.cfg.bound.delta = *delta;
  r.cfg.validate();
  if (reps || delta) {
    r.meta.config_hash = config_hash(r.cfg);
    write_text(r.out / "config.json", serialize_config(r.cfg));
  }
  if (!r.cfg.controller_space.grid) throw ConfigError("coverage: needs a grid controller space");
  const auto gains = r.cfg.controller_space.grid->gains();
  const CoverageSetup setup{r.cfg.samples_per_controller, r.cfg.horizon, r.cfg.coverage.repetitions,
                            r.cfg.coverage.reference_trajectories};
  const CoverageResult res =
      coverage_check(r.cfg.system, gains, r.cfg.weights, r.cfg.finite_prior(), r.cfg.bound, setup, r.seed);
  CsvWriter csv(r.out / "coverage.csv", r.meta, {"repetition", "bound", "reference", "covered"});
  for (const CoverageRecord& rec : res.records)
    csv.row({std::to_string(rec.repetition), format_number(rec.bound), format_number(rec.reference),
             rec.covered ? "1" : "0"});
  CsvWriter summary(r.out / "coverage_summary.csv", r.meta, {"repetitions", "covered", "coverage", "delta"});
  summary.row({std::to_string(setup.repetitions), std::to_string(res.covered), format_number(res.coverage),
               format_number(r.cfg.bound.delta)});
  std::cout << "coverage=" << format_number(res.coverage) << '\n';
  return kOk;
}

int cmd_reproduce(const Common& c, int which) {
  const ExperimentConfig base = preset("example" + std::to_string(which));
  const Run r = prepare(c, base);
  reproduce_example(which, r.cfg, r.seed, r.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-Bayes controller learning for stochastic linear systems"};
  app.set_version_flag("--version", std::string(PBCTL_VERSION));
  app.require_subcommand(1);

  Common common;
  std::string posterior_path;
  std::optional<int> reps;
  std::optional<double> delta;
  int example = 0;

  auto* simulate = app.add_subcommand("simulate", "generate a trajectory dataset");
  add_common(simulate, common, true);
  auto* learn_fin = app.add_subcommand("learn-finite", "learn a pmf over a finite controller grid");
  add_common(learn_fin, common, true);
  auto* learn_inf = app.add_subcommand("learn-infinite", "learn a truncated-Gaussian posterior over a gain box");
  add_common(learn_inf, common, true);
  auto* lqg = app.add_subcommand("lqg-baseline", "finite-horizon optimal controller for a fixed system");
  add_common(lqg, common, true);
  auto* bound = app.add_subcommand("bound", "certify a given posterior");
  add_common(bound, common, true);
  bound->add_option("--posterior", posterior_path, "posterior file (JSON)")->required();
  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of the finite-space bound");
  add_common(coverage, common, true);
  coverage->add_option("--reps", reps, "repetitions (overrides the config)");
  coverage->add_option("--delta", delta, "confidence parameter (overrides the config)");
  auto* reproduce = app.add_subcommand("reproduce-example", "run a reference experiment");
  add_common(reproduce, common, false);
  reproduce->add_option("example", example, "1, 2 or 3")->required()->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    return fail(kUsage, "usage", msg);
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*learn_fin) return cmd_learn_finite(common);
    if (*learn_inf) return cmd_learn_infinite(common);
    if (*lqg) return cmd_lqg(common);
    if (*bound) return cmd_bound(common, posterior_path);
    if (*coverage) return cmd_coverage(common, reps, delta);
    if (*reproduce) return cmd_reproduce(common, example);
  } catch (const EmptyGammaError& e) {
    return fail(kEmptyGamma, "empty_gamma", e.what());
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const DimensionError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const NumericalError& e) {
    return fail(kNumerical, "numerical", e.what());
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  } catch (const std::exception& e) {
    return fail(kOther, "internal", e.what());
  }
  return fail(kUsage, "usage", "no subcommand given");
}
