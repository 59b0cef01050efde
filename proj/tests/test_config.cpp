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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pbctl/config.hpp"
#include "pbctl/csv.hpp"
#include "pbctl/experiments.hpp"

using namespace pbctl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pbctl_test_config_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("presets validate and round trip") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const ExperimentConfig c = preset(name);
    CHECK_NOTHROW(c.validate());
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK_THROWS_AS(preset("example4"), ConfigError);
}

TEST_CASE("preset contents") {
  const ExperimentConfig e1 = preset("example1");
  CHECK(e1.bound.omega == std::vector<double>{2.85, 3.76, 4.94, 6.51, 8.56});
  CHECK(e1.bound.delta == 0.05);
  CHECK(e1.system.sigma_w == 0.5);
  CHECK(e1.controller_space.grid->gains().size() == 25);
  const ExperimentConfig e2 = preset("example2");
  CHECK(e2.system.std_A.isZero());
  CHECK(e2.bound.omega.back() == 4.79e-5);
  const ExperimentConfig e3 = preset("example3");
  CHECK(e3.bound.delta == 0.5);
  CHECK(*e3.bound.delta_prime == 0.25);
  CHECK(e3.sgd->mc_controllers == 10);
  CHECK(e3.sgd->iterations == 10);
  CHECK(e3.gauss_prior().mu == (VectorXd(2) << -0.5, -1.5).finished());
  CHECK(e3.sweep.samples == std::vector<int>{10, 20, 30, 40, 50});
}

TEST_CASE("grid enumeration varies the last axis fastest") {
  GridSpec g{1, 2, {{0.0, 1.0, 2}, {-1.0, 1.0, 3}}};
  const std::vector<MatrixXd> gains = g.gains();
  REQUIRE(gains.size() == 6);
  CHECK(gains[0] == (MatrixXd(1, 2) << 0.0, -1.0).finished());
  CHECK(gains[1] == (MatrixXd(1, 2) << 0.0, 0.0).finished());
  CHECK(gains[3] == (MatrixXd(1, 2) << 1.0, -1.0).finished());
  CHECK(gains[5] == (MatrixXd(1, 2) << 1.0, 1.0).finished());
}

TEST_CASE("preset overrides merge field by field") {
  const ExperimentConfig c =
      parse_config(R"({"preset": "example1", "bound": {"delta": 0.1}, "seed": 9,
                       "controller_space": {"grid": {"axes": [{"lower": 0, "upper": 0.3, "count": 3},
                                                              {"lower": -0.6, "upper": -0.3, "count": 3}]}}})");
  CHECK(c.bound.delta == 0.1);
  CHECK(c.bound.omega == preset("example1").bound.omega);
  CHECK(c.seed == 9);
  CHECK(c.controller_space.grid->gains().size() == 9);
  CHECK(c.system == preset("example1").system);
}

TEST_CASE("malformed configs name the offending key") {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{not json").find("invalid JSON") != std::string::npos);
  CHECK(message("[1, 2]").find("top level") != std::string::npos);
  CHECK(message(R"({"preset": "nope"})").find("nope") != std::string::npos);
  CHECK(message(R"({"preset": "example1", "bound": {"delta": 2}})").find("delta") != std::string::npos);
  CHECK(message(R"({"preset": "example1", "horizon": 0})").find("horizon") != std::string::npos);
  CHECK(message(R"({"preset": "example1", "seed": -1})").find("seed") != std::string::npos);
  CHECK(message(R"({"preset": "example1", "bound": {"certify_with": "x"}})").find("x") != std::string::npos);
  CHECK_THROWS_AS(parse_config(R"({"preset": "example1", "system": {"noise_std": [0.42]}})"), DimensionError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("hash ignores the output directory only") {
  ExperimentConfig a = preset("example1");
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("posterior files round trip") {
  const FinitePosterior P = FinitePosterior::from_probs((VectorXd(3) << 0.2, 0.3, 0.5).finished());
  const PosteriorFile f = parse_posterior(serialize_posterior(P));
  REQUIRE(f.finite);
  CHECK(f.finite->probs == P.probs);
  const TruncGaussPosterior G = preset("example3").gauss_prior();
  const PosteriorFile g = parse_posterior(serialize_posterior(G));
  REQUIRE(g.truncated_gaussian);
  CHECK(*g.truncated_gaussian == G);
  CHECK_THROWS_AS(parse_posterior("{}"), ConfigError);
  CHECK_THROWS_AS(parse_posterior(R"({"probs": [0.5, 0.7]})"), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(metadata_line({7, 0xabc}) == std::string("# pbctl ") + PBCTL_VERSION + " seed=7 config=0000000000000abc");

  const fs::path dir = scratch("csv");
  {
    CsvWriter w(dir / "t.csv", {3, 1}, {"a", "b"});
    w.row(std::vector<double>{1.5, 2.0});
    w.row(std::vector<std::string>{"x", "y"});
    CHECK_THROWS(w.row(std::vector<double>{1.0}));
  }
  const std::string text = slurp(dir / "t.csv");
  CHECK(text == metadata_line({3, 1}) + "\na,b\n1.5,2\nx,y\n");
  CHECK(text.find('\r') == std::string::npos);
  CHECK_THROWS_AS(CsvWriter(dir / "missing" / "t.csv", {}, {"a"}), IoError);
}

TEST_CASE("example pipelines write their tables") {
  ExperimentConfig c = preset("example1");
  c.sweep.samples = {10, 20};
  const fs::path dir = scratch("ex1");
  const auto rows = run_example1(c, 4, dir);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(r.bound.total >= r.posterior.mean);
  std::istringstream csv(slurp(dir / "example1.csv"));
  std::string meta, header, line;
  std::getline(csv, meta);
  std::getline(csv, header);
  CHECK(meta == metadata_line({4, config_hash(c)}));
  CHECK(header.rfind("n,bound_total,expected_cost,std_error", 0) == 0);
  int count = 0;
  while (std::getline(csv, line)) ++count;
  CHECK(count == 2);
  ExperimentConfig written = load_config(dir / "config.json");
  CHECK(written.seed == 4);
  written.seed = c.seed;
  CHECK(written == c);

  CHECK_THROWS_AS(run_example2(preset("example1"), 1), ConfigError);
  CHECK_THROWS_AS(run_example3(preset("example1"), 1), ConfigError);
  CHECK_THROWS_AS(reproduce_example(4, c, 1, dir), ConfigError);
}

TEST_CASE("example 2 orders prior, learned and optimal costs") {
  const auto rows = run_example2(preset("example2"), 2);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CAPTURE(r.horizon);
    CHECK(r.pac.mean <= r.prior.mean);
    CHECK(r.lqg <= r.pac.mean + 3 * r.pac.std_error);
  }
}

TEST_CASE("example 3 prior cost does not depend on n") {
  ExperimentConfig c = preset("example3");
  c.sweep.samples = {10, 20};
  c.sgd->iterations = 3;
  const auto rows = run_example3(c, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].prior.mean == rows[1].prior.mean);
  for (const auto& r : rows) CHECK(r.posterior.mean < 50.0);
}
