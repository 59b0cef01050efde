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

#ifndef PBCTL_SYSMODEL_HPP
#define PBCTL_SYSMODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pbctl/random.hpp"
#include "pbctl/types.hpp"

namespace pbctl {

/// Generative model of the unknown plant x(t+1) = A x(t) + B u(t) + w(t).
///
/// Entries of A and B are independent Gaussians N(mean, std^2) truncated to
/// bounds_A / bounds_B; noise entries are independent N(0, noise_std^2).
/// sigma_w is the sub-Gaussian constant assumed for the noise and must
/// dominate every noise_std entry.
struct SystemDistribution {
  int dim_x = 0;
  int dim_u = 0;
  MatrixXd mean_A;
  MatrixXd mean_B;
  MatrixXd std_A;
  MatrixXd std_B;
  Interval bounds_A;
  Interval bounds_B;
  VectorXd noise_std;
  double sigma_w = 0.0;

  /// Throws ConfigError / DimensionError when an invariant is violated.
  void validate() const;

  MatrixXd noise_covariance() const { return noise_std.array().square().matrix().asDiagonal(); }

  bool operator==(const SystemDistribution& other) const;
};

struct SystemSample {
  MatrixXd A;
  MatrixXd B;
};

/// Realized closed-loop trajectory. Column t-1 of `states` holds x(t) for
/// t = 1..T; x(0) = 0 is implicit.
struct Trajectory {
  MatrixXd states;
  MatrixXd gain;

  int horizon() const { return static_cast<int>(states.cols()); }
};

/// n trajectories for each of L controllers, all with the same horizon.
struct Dataset {
  std::vector<std::vector<Trajectory>> per_controller;
  int horizon = 0;

  int num_controllers() const { return static_cast<int>(per_controller.size()); }
  int samples_per_controller() const {
    return per_controller.empty() ? 0 : static_cast<int>(per_controller.front().size());
  }
};

SystemSample sample_system(const SystemDistribution& dist, Rng& rng);

/// Noise sequence w(0)..w(T-1) as the columns of a dim_x x T matrix.
MatrixXd sample_noise(const SystemDistribution& dist, int horizon, Rng& rng);

/// Closed-loop states x(1)..x(T) under u(t) = K x(t) from x(0) = 0, one column per step.
template <typename DA, typename DB, typename DK, typename DW>
Mat<typename DA::Scalar> simulate_states(const Eigen::MatrixBase<DA>& A,
                                         const Eigen::MatrixBase<DB>& B,
                                         const Eigen::MatrixBase<DK>& K,
                                         const Eigen::MatrixBase<DW>& W) {
  using Scalar = typename DA::Scalar;
  const auto dx = A.rows();
  require_dims(A.cols() == dx && B.rows() == dx && K.rows() == B.cols() && K.cols() == dx &&
                   W.rows() == dx,
               "simulate: inconsistent A/B/K/W shapes");
  Mat<Scalar> X(dx, W.cols());
  Vec<Scalar> x = Vec<Scalar>::Zero(dx);
  for (Eigen::Index t = 0; t < W.cols(); ++t) {
    const Vec<Scalar> u = K * x;
    x = A * x + B * u + W.col(t);
    X.col(t) = x;
  }
  return X;
}

Trajectory simulate(const MatrixXd& A, const MatrixXd& B, const MatrixXd& K, const MatrixXd& W);

/// Draws (A, B, W) from one stream and rolls out the closed loop.
Trajectory sample_trajectory(const SystemDistribution& dist, const MatrixXd& K, int horizon,
                             Rng& rng);

/// Substream key identifying a gain by its entries, so a controller receives
/// the same trajectories regardless of its position in a list.
std::uint64_t gain_key(const MatrixXd& K);

/// Stream for trajectory i of controller K under master seed `seed`.
Rng trajectory_stream(std::uint64_t seed, const MatrixXd& K, int trajectory_index);

/// n trajectories per controller, each from an independent (A, B, W) draw.
/// Deterministic in `seed`; the first m trajectories of an n-sample dataset
/// equal the m-sample dataset built from the same seed.
Dataset generate_dataset(const SystemDistribution& dist, std::span<const MatrixXd> controllers,
                         int n, int horizon, std::uint64_t seed);

}  // namespace pbctl

#endif  // PBCTL_SYSMODEL_HPP
