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

#include "pbctl/config.hpp"

#include <fstream>
#include <sstream>

namespace pbctl {

using nlohmann::json;

namespace {

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Every accessor names the offending key so a malformed file fails with a
// message a user can act on.
const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

MatrixXd matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ConfigError(where + ": rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = num(j[i][k], where);
  }
  return m;
}

VectorXd vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = num(j[i], where);
  return v;
}

std::vector<int> ints_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<int> v;
  for (const auto& e : j) v.push_back(integer(e, where));
  return v;
}

Interval interval_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [lower, upper]");
  return {num(j[0], where), num(j[1], where)};
}

json tg_json(const TruncGaussPosterior& p) {
  return {{"mu", vector_json(p.mu)},
          {"sigma", vector_json(p.sigma)},
          {"lower", vector_json(p.lower)},
          {"upper", vector_json(p.upper)},
          {"gain_rows", p.gain_rows}};
}

TruncGaussPosterior tg_from(const json& j, const std::string& where) {
  TruncGaussPosterior p;
  p.mu = vector_from(field(j, "mu", where), where + ".mu");
  p.sigma = vector_from(field(j, "sigma", where), where + ".sigma");
  p.lower = vector_from(field(j, "lower", where), where + ".lower");
  p.upper = vector_from(field(j, "upper", where), where + ".upper");
  p.gain_rows = j.contains("gain_rows") ? integer(j["gain_rows"], where + ".gain_rows") : 1;
  return p;
}

json system_json(const SystemDistribution& s) {
  return {{"dim_x", s.dim_x},
          {"dim_u", s.dim_u},
          {"mean_A", matrix_json(s.mean_A)},
          {"mean_B", matrix_json(s.mean_B)},
          {"std_A", matrix_json(s.std_A)},
          {"std_B", matrix_json(s.std_B)},
          {"bounds_A", {s.bounds_A.lower, s.bounds_A.upper}},
          {"bounds_B", {s.bounds_B.lower, s.bounds_B.upper}},
          {"noise_std", vector_json(s.noise_std)},
          {"sigma_w", s.sigma_w}};
}

SystemDistribution system_from(const json& j) {
  const std::string w = "system";
  SystemDistribution s;
  s.dim_x = integer(field(j, "dim_x", w), w + ".dim_x");
  s.dim_u = integer(field(j, "dim_u", w), w + ".dim_u");
  s.mean_A = matrix_from(field(j, "mean_A", w), w + ".mean_A");
  s.mean_B = matrix_from(field(j, "mean_B", w), w + ".mean_B");
  // Omitted standard deviations mean a deterministic system.
  s.std_A = j.contains("std_A") ? matrix_from(j["std_A"], w + ".std_A")
                                : MatrixXd::Zero(s.mean_A.rows(), s.mean_A.cols());
  s.std_B = j.contains("std_B") ? matrix_from(j["std_B"], w + ".std_B")
                                : MatrixXd::Zero(s.mean_B.rows(), s.mean_B.cols());
  s.bounds_A = interval_from(field(j, "bounds_A", w), w + ".bounds_A");
  s.bounds_B = interval_from(field(j, "bounds_B", w), w + ".bounds_B");
  s.noise_std = vector_from(field(j, "noise_std", w), w + ".noise_std");
  s.sigma_w = num(field(j, "sigma_w", w), w + ".sigma_w");
  return s;
}

json bound_json(const BoundConfig& b) {
  json j{{"omega", b.omega},
         {"delta", b.delta},
         {"c_B", b.c_B},
         {"screen_lambdas", b.screen_lambdas},
         {"certify_with", to_string(b.certify_with)}};
  if (b.delta_prime) j["delta_prime"] = *b.delta_prime;
  if (b.gain_bound) j["gain_bound"] = *b.gain_bound;
  return j;
}

BoundConfig bound_from(const json& j) {
  const std::string w = "bound";
  BoundConfig b;
  const json& om = field(j, "omega", w);
  if (!om.is_array()) throw ConfigError("bound.omega: expected an array");
  for (const auto& e : om) b.omega.push_back(num(e, "bound.omega"));
  if (j.contains("delta")) b.delta = num(j["delta"], "bound.delta");
  if (j.contains("delta_prime")) b.delta_prime = num(j["delta_prime"], "bound.delta_prime");
  if (j.contains("c_B")) b.c_B = num(j["c_B"], "bound.c_B");
  if (j.contains("gain_bound")) b.gain_bound = num(j["gain_bound"], "bound.gain_bound");
  if (j.contains("screen_lambdas")) {
    if (!j["screen_lambdas"].is_boolean()) throw ConfigError("bound.screen_lambdas: expected a boolean");
    b.screen_lambdas = j["screen_lambdas"].get<bool>();
  }
  if (j.contains("certify_with")) {
    if (!j["certify_with"].is_string()) throw ConfigError("bound.certify_with: expected a string");
    b.certify_with = parse_bcost_kind(j["certify_with"].get<std::string>());
  }
  return b;
}

json sgd_json(const SgdConfig& s) {
  return {{"step_size", s.step_size},         {"smoothing", s.smoothing},
          {"iterations", s.iterations},       {"mc_controllers", s.mc_controllers},
          {"n_per_controller", s.n_per_controller}, {"sigma_min", s.sigma_min},
          {"min_width", s.min_width}};
}

SgdConfig sgd_from(const json& j) {
  SgdConfig s;
  if (j.contains("step_size")) s.step_size = num(j["step_size"], "sgd.step_size");
  if (j.contains("smoothing")) s.smoothing = num(j["smoothing"], "sgd.smoothing");
  if (j.contains("iterations")) s.iterations = integer(j["iterations"], "sgd.iterations");
  if (j.contains("mc_controllers")) s.mc_controllers = integer(j["mc_controllers"], "sgd.mc_controllers");
  if (j.contains("n_per_controller"))
    s.n_per_controller = integer(j["n_per_controller"], "sgd.n_per_controller");
  if (j.contains("sigma_min")) s.sigma_min = num(j["sigma_min"], "sgd.sigma_min");
  if (j.contains("min_width")) s.min_width = num(j["min_width"], "sgd.min_width");
  return s;
}

GridSpec grid(int rows, int cols, std::vector<GridAxis> axes) { return {rows, cols, std::move(axes)}; }

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index k = 0;
    for (double v : r) m(i, k++) = v;
    ++i;
  }
  return m;
}

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(xs.size());
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Shared setup: d_x = 2, d_u = 1, Q = I, R = 0.1, T = 20, delta = 0.05.
ExperimentConfig base() {
  ExperimentConfig c;
  c.horizon = 20;
  c.weights = {MatrixXd::Identity(2, 2), mat({{0.1}})};
  c.system.dim_x = 2;
  c.system.dim_u = 1;
  return c;
}

ExperimentConfig example1() {
  ExperimentConfig c = base();
  c.name = "example1";
  SystemDistribution& s = c.system;
  s.mean_A = mat({{0.12, -0.25}, {0.21, 0.05}});
  s.mean_B = mat({{0.18}, {-0.27}});
  s.std_A = mat({{0.05, 0.08}, {0.03, 0.1}});
  s.std_B = mat({{0.07}, {0.02}});
  s.bounds_A = {-0.3, 0.3};
  s.bounds_B = {-0.3, 0.3};
  s.noise_std = vec({0.42, 0.47});
  s.sigma_w = 0.5;
  c.controller_space.grid = grid(1, 2, {{0.0, 0.3, 5}, {-0.6, -0.3, 5}});
  c.bound.omega = {2.85, 3.76, 4.94, 6.51, 8.56};
  c.bound.delta = 0.05;
  c.samples_per_controller = 10;
  c.evaluation = {25, 100};
  c.sweep.samples = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  c.sweep.horizons = {20};
  c.coverage = {200, 2000};
  c.seed = 1;
  c.output_dir = "out/example1";
  return c;
}

ExperimentConfig example2() {
  ExperimentConfig c = base();
  c.name = "example2";
  SystemDistribution& s = c.system;
  s.mean_A = mat({{-1.02, -0.29}, {-0.45, -0.84}});
  s.mean_B = mat({{0.8}, {-1.27}});
  s.std_A = MatrixXd::Zero(2, 2);
  s.std_B = MatrixXd::Zero(2, 1);
  s.bounds_A = {-2.0, 2.0};
  s.bounds_B = {-2.0, 2.0};
  s.noise_std = vec({0.45, 0.45});
  s.sigma_w = 0.5;
  c.controller_space.grid = grid(1, 2, {{0.75, 1.25, 5}, {-1.0, -0.5, 5}});
  c.bound.omega = {0.0956, 0.0276, 0.0027, 0.0019, 2.65e-4, 1e-4, 4.79e-5};
  c.bound.delta = 0.05;
  c.bound.screen_lambdas = false;
  c.samples_per_controller = 10;
  c.evaluation = {25, 1000};
  c.sweep.samples = {10};
  c.sweep.horizons = {5, 10, 15, 20};
  c.seed = 2;
  c.output_dir = "out/example2";
  return c;
}

ExperimentConfig example3() {
  ExperimentConfig c = base();
  c.name = "example3";
  SystemDistribution& s = c.system;
  s.mean_A = mat({{-0.37, -0.25}, {-0.01, -0.06}});
  s.mean_B = mat({{0.08}, {-0.9}});
  s.std_A = mat({{0.04, 0.07}, {0.02, 0.09}});
  s.std_B = mat({{0.06}, {0.03}});
  s.bounds_A = {-1.0, 1.0};
  s.bounds_B = {-1.0, 1.0};
  s.noise_std = vec({0.22, 0.24});
  s.sigma_w = 0.25;
  TruncGaussPosterior prior;
  prior.mu = vec({-0.5, -1.5});
  prior.sigma = vec({0.25, 0.25});
  prior.lower = vec({-0.575, -1.625});
  prior.upper = vec({0.25, -0.25});
  prior.gain_rows = 1;
  c.controller_space.box = BoxSpec{prior.lower.transpose(), prior.upper.transpose()};
  c.prior.truncated_gaussian = prior;
  c.bound.omega = {2.85, 3.76, 4.94, 6.51, 8.56};
  c.bound.delta = 0.5;
  c.bound.delta_prime = 0.25;
  c.bound.screen_lambdas = false;
  SgdConfig sgd;
  sgd.step_size = 1e-3;
  sgd.smoothing = 0.05;
  sgd.iterations = 10;
  sgd.mc_controllers = 10;
  c.sgd = sgd;
  c.samples_per_controller = 10;
  c.evaluation = {100, 100};
  c.sweep.samples = {10, 20, 30, 40, 50};
  c.sweep.horizons = {20};
  c.seed = 3;
  c.output_dir = "out/example3";
  return c;
}

}  // namespace

std::vector<MatrixXd> GridSpec::gains() const {
  require_dims(static_cast<int>(axes.size()) == rows * cols,
               "grid: need one axis per gain entry");
  std::vector<MatrixXd> out;
  std::vector<int> idx(axes.size(), 0);
  while (true) {
    MatrixXd K(rows, cols);
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const GridAxis& ax = axes[a];
      const double v = ax.count == 1 ? ax.lower
                                     : ax.lower + (ax.upper - ax.lower) * idx[a] / (ax.count - 1);
      K(static_cast<Eigen::Index>(a) / cols, static_cast<Eigen::Index>(a) % cols) = v;
    }
    out.push_back(std::move(K));
    int a = static_cast<int>(axes.size()) - 1;
    while (a >= 0 && ++idx[a] == axes[a].count) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

ControllerSpace ControllerSpaceSpec::materialize() const {
  if (grid) return FiniteSpace{grid->gains()};
  if (box) return BoxSpace{box->lower, box->upper};
  throw ConfigError("controller_space: neither grid nor box given");
}

void ExperimentConfig::validate() const {
  system.validate();
  weights.validate();
  require_dims(weights.Q.rows() == system.dim_x && weights.R.rows() == system.dim_u,
               "weights: Q must be dim_x x dim_x and R dim_u x dim_u");
  if (horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (controller_space.grid.has_value() == controller_space.box.has_value())
    throw ConfigError("controller_space: exactly one of grid or box is required");
  if (controller_space.grid) {
    const GridSpec& g = *controller_space.grid;
    if (g.rows != system.dim_u || g.cols != system.dim_x)
      throw ConfigError("controller_space.grid: gain shape must be dim_u x dim_x");
    if (static_cast<int>(g.axes.size()) != g.rows * g.cols)
      throw ConfigError("controller_space.grid: need one axis per gain entry");
    for (const GridAxis& a : g.axes)
      if (a.count < 1 || a.lower > a.upper)
        throw ConfigError("controller_space.grid: axes need count >= 1 and lower <= upper");
    if (prior.truncated_gaussian)
      throw ConfigError("prior: a grid space takes a pmf prior, not a truncated Gaussian");
    if (prior.probs) {
      long long card = 1;
      for (const GridAxis& a : g.axes) card *= a.count;
      if (prior.probs->size() != card) throw ConfigError("prior.probs: one entry per grid gain");
      FinitePosterior::from_probs(*prior.probs);
    }
  } else {
    const BoxSpec& b = *controller_space.box;
    if (b.lower.rows() != system.dim_u || b.lower.cols() != system.dim_x ||
        b.upper.rows() != system.dim_u || b.upper.cols() != system.dim_x)
      throw ConfigError("controller_space.box: gain shape must be dim_u x dim_x");
    if ((b.lower.array() > b.upper.array()).any())
      throw ConfigError("controller_space.box: lower must not exceed upper");
    if (!prior.truncated_gaussian) throw ConfigError("prior: a box space needs a truncated_gaussian prior");
    const TruncGaussPosterior& p = *prior.truncated_gaussian;
    p.validate();
    if (p.gain_rows != system.dim_u || p.dim() != system.dim_u * system.dim_x)
      throw ConfigError("prior.truncated_gaussian: shape must match the gain");
    const VectorXd lo = b.lower.reshaped<Eigen::RowMajor>();
    const VectorXd hi = b.upper.reshaped<Eigen::RowMajor>();
    if ((p.lower.array() < lo.array()).any() || (p.upper.array() > hi.array()).any())
      throw ConfigError("prior.truncated_gaussian: support must lie inside the box");
    if (!sgd) throw ConfigError("sgd: required for a box controller space");
    if (!bound.delta_prime) throw ConfigError("bound.delta_prime: required for a box controller space");
  }
  bound.validate();
  if (sgd) sgd->validate();
  if (samples_per_controller < 2) throw ConfigError("samples_per_controller: must be >= 2");
  if (evaluation.test_controllers < 1 || evaluation.test_trajectories < 1)
    throw ConfigError("evaluation: counts must be >= 1");
  for (int n : sweep.samples)
    if (n < 2) throw ConfigError("sweep.samples: every n must be >= 2");
  for (int T : sweep.horizons)
    if (T < 1) throw ConfigError("sweep.horizons: every T must be >= 1");
  if (coverage.repetitions < 1 || coverage.reference_trajectories < 1)
    throw ConfigError("coverage: counts must be >= 1");
}

FinitePosterior ExperimentConfig::finite_prior() const {
  if (!controller_space.grid) throw ConfigError("prior: the controller space is not finite");
  if (prior.probs) return FinitePosterior::from_probs(*prior.probs);
  int card = 1;
  for (const GridAxis& a : controller_space.grid->axes) card *= a.count;
  return FinitePosterior::uniform(card);
}

const TruncGaussPosterior& ExperimentConfig::gauss_prior() const {
  if (!prior.truncated_gaussian) throw ConfigError("prior: no truncated_gaussian prior configured");
  return *prior.truncated_gaussian;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return name == o.name && system == o.system && horizon == o.horizon && weights == o.weights &&
         controller_space == o.controller_space && prior == o.prior && bound == o.bound &&
         sgd == o.sgd && samples_per_controller == o.samples_per_controller &&
         evaluation == o.evaluation && sweep == o.sweep && coverage == o.coverage &&
         seed == o.seed && output_dir == o.output_dir;
}

json to_json(const ExperimentConfig& c) {
  json space;
  if (c.controller_space.grid) {
    const GridSpec& g = *c.controller_space.grid;
    json axes = json::array();
    for (const GridAxis& a : g.axes) axes.push_back({{"lower", a.lower}, {"upper", a.upper}, {"count", a.count}});
    space["grid"] = {{"rows", g.rows}, {"cols", g.cols}, {"axes", axes}};
  }
  if (c.controller_space.box)
    space["box"] = {{"lower", matrix_json(c.controller_space.box->lower)},
                    {"upper", matrix_json(c.controller_space.box->upper)}};
  json prior = json::object();
  if (c.prior.probs) prior["probs"] = vector_json(*c.prior.probs);
  if (c.prior.truncated_gaussian) prior["truncated_gaussian"] = tg_json(*c.prior.truncated_gaussian);

  json j{{"name", c.name},
         {"system", system_json(c.system)},
         {"horizon", c.horizon},
         {"weights", {{"Q", matrix_json(c.weights.Q)}, {"R", matrix_json(c.weights.R)}}},
         {"controller_space", space},
         {"prior", prior},
         {"bound", bound_json(c.bound)},
         {"samples_per_controller", c.samples_per_controller},
         {"evaluation",
          {{"test_controllers", c.evaluation.test_controllers},
           {"test_trajectories", c.evaluation.test_trajectories}}},
         {"sweep", {{"samples", c.sweep.samples}, {"horizons", c.sweep.horizons}}},
         {"coverage",
          {{"repetitions", c.coverage.repetitions},
           {"reference_trajectories", c.coverage.reference_trajectories}}},
         {"seed", c.seed},
         {"output_dir", c.output_dir}};
  if (c.sgd) j["sgd"] = sgd_json(*c.sgd);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("name: expected a string");
    c.name = j["name"].get<std::string>();
  }
  c.system = system_from(field(j, "system", "config"));
  c.horizon = integer(field(j, "horizon", "config"), "horizon");
  const json& w = field(j, "weights", "config");
  c.weights.Q = matrix_from(field(w, "Q", "weights"), "weights.Q");
  c.weights.R = matrix_from(field(w, "R", "weights"), "weights.R");

  const json& space = field(j, "controller_space", "config");
  if (space.contains("grid")) {
    const json& g = space["grid"];
    GridSpec spec;
    spec.rows = integer(field(g, "rows", "controller_space.grid"), "controller_space.grid.rows");
    spec.cols = integer(field(g, "cols", "controller_space.grid"), "controller_space.grid.cols");
    const json& axes = field(g, "axes", "controller_space.grid");
    if (!axes.is_array()) throw ConfigError("controller_space.grid.axes: expected an array");
    for (const auto& a : axes) {
      const std::string where = "controller_space.grid.axes";
      spec.axes.push_back({num(field(a, "lower", where), where), num(field(a, "upper", where), where),
                           integer(field(a, "count", where), where)});
    }
    c.controller_space.grid = spec;
  }
  if (space.contains("box")) {
    const json& b = space["box"];
    c.controller_space.box =
        BoxSpec{matrix_from(field(b, "lower", "controller_space.box"), "controller_space.box.lower"),
                matrix_from(field(b, "upper", "controller_space.box"), "controller_space.box.upper")};
  }
  if (j.contains("prior")) {
    const json& p = j["prior"];
    if (!p.is_object()) throw ConfigError("prior: expected an object");
    if (p.contains("probs")) c.prior.probs = vector_from(p["probs"], "prior.probs");
    if (p.contains("truncated_gaussian"))
      c.prior.truncated_gaussian = tg_from(p["truncated_gaussian"], "prior.truncated_gaussian");
  }
  c.bound = bound_from(field(j, "bound", "config"));
  if (j.contains("sgd") && !j["sgd"].is_null()) c.sgd = sgd_from(j["sgd"]);
  if (j.contains("samples_per_controller"))
    c.samples_per_controller = integer(j["samples_per_controller"], "samples_per_controller");
  if (j.contains("evaluation")) {
    const json& e = j["evaluation"];
    if (e.contains("test_controllers"))
      c.evaluation.test_controllers = integer(e["test_controllers"], "evaluation.test_controllers");
    if (e.contains("test_trajectories"))
      c.evaluation.test_trajectories = integer(e["test_trajectories"], "evaluation.test_trajectories");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (s.contains("samples")) c.sweep.samples = ints_from(s["samples"], "sweep.samples");
    if (s.contains("horizons")) c.sweep.horizons = ints_from(s["horizons"], "sweep.horizons");
  }
  if (j.contains("coverage")) {
    const json& s = j["coverage"];
    if (s.contains("repetitions")) c.coverage.repetitions = integer(s["repetitions"], "coverage.repetitions");
    if (s.contains("reference_trajectories"))
      c.coverage.reference_trajectories =
          integer(s["reference_trajectories"], "coverage.reference_trajectories");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "example1") c = example1();
  else if (name == "example2") c = example2();
  else if (name == "example3") c = example3();
  else throw ConfigError("preset: unknown name '" + name + "'");
  c.validate();
  return c;
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3"}; }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("preset: expected a string");
    json merged = to_json(preset(j["preset"].get<std::string>()));
    json patch = j;
    patch.erase("preset");
    merged.merge_patch(patch);
    return config_from_json(merged);
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string serialize_posterior(const FinitePosterior& P) {
  return json{{"probs", vector_json(P.probs)}}.dump(2) + "\n";
}

std::string serialize_posterior(const TruncGaussPosterior& P) {
  return json{{"truncated_gaussian", tg_json(P)}}.dump(2) + "\n";
}

PosteriorFile parse_posterior(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("posterior: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("posterior: top level must be an object");
  PosteriorFile out;
  if (j.contains("probs")) out.finite = FinitePosterior::from_probs(vector_from(j["probs"], "posterior.probs"));
  if (j.contains("truncated_gaussian")) {
    out.truncated_gaussian = tg_from(j["truncated_gaussian"], "posterior.truncated_gaussian");
    out.truncated_gaussian->validate();
  }
  if (out.finite.has_value() == out.truncated_gaussian.has_value())
    throw ConfigError("posterior: exactly one of probs or truncated_gaussian is required");
  return out;
}

PosteriorFile load_posterior(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("posterior: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_posterior(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  // Where results go does not change what they are.
  json j = to_json(c);
  j.erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pbctl
