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

#ifndef PBCTL_CONFIG_HPP
#define PBCTL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbctl/bounds.hpp"
#include "pbctl/cost.hpp"
#include "pbctl/learn.hpp"
#include "pbctl/posterior.hpp"
#include "pbctl/sysmodel.hpp"

namespace pbctl {

/// `count` evenly spaced values from lower to upper (inclusive).
struct GridAxis {
  double lower = 0.0;
  double upper = 0.0;
  int count = 1;
  bool operator==(const GridAxis&) const = default;
};

/// Cartesian grid over the entries of a rows x cols gain, one axis per entry
/// in row-major order. Enumeration varies the last axis fastest.
struct GridSpec {
  int rows = 1;
  int cols = 1;
  std::vector<GridAxis> axes;

  std::vector<MatrixXd> gains() const;
  bool operator==(const GridSpec&) const = default;
};

struct BoxSpec {
  MatrixXd lower;
  MatrixXd upper;
  bool operator==(const BoxSpec& o) const { return lower == o.lower && upper == o.upper; }
};

/// Exactly one of grid or box.
struct ControllerSpaceSpec {
  std::optional<GridSpec> grid;
  std::optional<BoxSpec> box;

  bool finite() const { return grid.has_value(); }
  ControllerSpace materialize() const;
  bool operator==(const ControllerSpaceSpec&) const = default;
};

/// Prior over the controller space: a pmf for a grid (uniform when probs is
/// absent) or a truncated Gaussian for a box.
struct PriorSpec {
  std::optional<VectorXd> probs;
  std::optional<TruncGaussPosterior> truncated_gaussian;

  bool operator==(const PriorSpec& o) const {
    return probs == o.probs && truncated_gaussian == o.truncated_gaussian;
  }
};

struct EvaluationSpec {
  int test_controllers = 100;
  int test_trajectories = 100;
  bool operator==(const EvaluationSpec&) const = default;
};

/// Sweep points of the reproduction pipelines.
struct SweepSpec {
  std::vector<int> samples;   // n
  std::vector<int> horizons;  // T
  bool operator==(const SweepSpec&) const = default;
};

struct CoverageSpec {
  int repetitions = 200;
  /// Trajectories per controller for the reference estimate of C(K).
  int reference_trajectories = 2000;
  bool operator==(const CoverageSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  SystemDistribution system;
  int horizon = 20;
  CostWeights weights;
  ControllerSpaceSpec controller_space;
  PriorSpec prior;
  BoundConfig bound;
  std::optional<SgdConfig> sgd;
  int samples_per_controller = 10;
  EvaluationSpec evaluation;
  SweepSpec sweep;
  CoverageSpec coverage;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ConfigError / DimensionError on the first violated invariant.
  void validate() const;

  FinitePosterior finite_prior() const;
  const TruncGaussPosterior& gauss_prior() const;

  bool operator==(const ExperimentConfig&) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Named presets "example1", "example2", "example3".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Accepts a full config, or {"preset": name, ...} whose remaining keys are
/// merged into the preset as a JSON merge patch.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& c);

/// Learned or user-supplied posterior, stored as {"probs": [...]} or
/// {"truncated_gaussian": {...}}.
struct PosteriorFile {
  std::optional<FinitePosterior> finite;
  std::optional<TruncGaussPosterior> truncated_gaussian;
};

std::string serialize_posterior(const FinitePosterior& P);
std::string serialize_posterior(const TruncGaussPosterior& P);
PosteriorFile parse_posterior(const std::string& text);
PosteriorFile load_posterior(const std::filesystem::path& path);

/// FNV-1a of the compact serialization, output_dir excluded.
std::uint64_t config_hash(const ExperimentConfig& c);

}  // namespace pbctl

#endif  // PBCTL_CONFIG_HPP
