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

#include "pbctl/sysmodel.hpp"

#include <bit>

#include "pbctl/truncated_normal.hpp"

namespace pbctl {

namespace {

constexpr std::uint64_t kTrajectoryTag = 0x7472616aULL;

MatrixXd sample_truncated(const MatrixXd& mean, const MatrixXd& stddev, Interval bounds,
                          Rng& rng) {
  MatrixXd out(mean.rows(), mean.cols());
  // Row-major draw order, independent of Eigen's storage order.
  for (Eigen::Index i = 0; i < mean.rows(); ++i)
    for (Eigen::Index j = 0; j < mean.cols(); ++j)
      out(i, j) = sample(TruncatedNormal{mean(i, j), stddev(i, j), bounds.lower, bounds.upper}, rng);
  return out;
}

}  // namespace

void SystemDistribution::validate() const {
  if (dim_x < 1 || dim_u < 1) throw ConfigError("system: dim_x and dim_u must be positive");
  require_dims(mean_A.rows() == dim_x && mean_A.cols() == dim_x, "system: mean_A must be dim_x x dim_x");
  require_dims(std_A.rows() == dim_x && std_A.cols() == dim_x, "system: std_A must be dim_x x dim_x");
  require_dims(mean_B.rows() == dim_x && mean_B.cols() == dim_u, "system: mean_B must be dim_x x dim_u");
  require_dims(std_B.rows() == dim_x && std_B.cols() == dim_u, "system: std_B must be dim_x x dim_u");
  require_dims(noise_std.size() == dim_x, "system: noise_std must have dim_x entries");
  if (bounds_A.lower > bounds_A.upper || bounds_B.lower > bounds_B.upper)
    throw ConfigError("system: bounds must satisfy lower <= upper");
  if ((mean_A.array() < bounds_A.lower).any() || (mean_A.array() > bounds_A.upper).any())
    throw ConfigError("system: mean_A entries must lie inside bounds_A");
  if ((mean_B.array() < bounds_B.lower).any() || (mean_B.array() > bounds_B.upper).any())
    throw ConfigError("system: mean_B entries must lie inside bounds_B");
  if ((std_A.array() < 0).any() || (std_B.array() < 0).any() || (noise_std.array() < 0).any())
    throw ConfigError("system: standard deviations must be nonnegative");
  if (!(sigma_w > 0)) throw ConfigError("system: sigma_w must be positive");
  if ((noise_std.array() > sigma_w).any())
    throw ConfigError("system: noise_std entries must not exceed sigma_w");
}

bool SystemDistribution::operator==(const SystemDistribution& o) const {
  return dim_x == o.dim_x && dim_u == o.dim_u && mean_A == o.mean_A && mean_B == o.mean_B &&
         std_A == o.std_A && std_B == o.std_B && bounds_A == o.bounds_A &&
         bounds_B == o.bounds_B && noise_std == o.noise_std && sigma_w == o.sigma_w;
}

SystemSample sample_system(const SystemDistribution& dist, Rng& rng) {
  SystemSample s;
  s.A = sample_truncated(dist.mean_A, dist.std_A, dist.bounds_A, rng);
  s.B = sample_truncated(dist.mean_B, dist.std_B, dist.bounds_B, rng);
  return s;
}

MatrixXd sample_noise(const SystemDistribution& dist, int horizon, Rng& rng) {
  if (horizon < 1) throw ConfigError("sample_noise: horizon must be >= 1");
  MatrixXd W(dist.dim_x, horizon);
  for (int t = 0; t < horizon; ++t)
    for (int k = 0; k < dist.dim_x; ++k) W(k, t) = dist.noise_std(k) * rng.normal();
  return W;
}

Trajectory simulate(const MatrixXd& A, const MatrixXd& B, const MatrixXd& K, const MatrixXd& W) {
  return Trajectory{simulate_states(A, B, K, W), K};
}

Trajectory sample_trajectory(const SystemDistribution& dist, const MatrixXd& K, int horizon,
                             Rng& rng) {
  const SystemSample sys = sample_system(dist, rng);
  const MatrixXd W = sample_noise(dist, horizon, rng);
  return simulate(sys.A, sys.B, K, W);
}

std::uint64_t gain_key(const MatrixXd& K) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(K.rows()) << 32 |
                          static_cast<std::uint64_t>(K.cols()));
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      // +0.0 and -0.0 describe the same gain.
      const double v = K(i, j) == 0.0 ? 0.0 : K(i, j);
      h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    }
  return h;
}

Rng trajectory_stream(std::uint64_t seed, const MatrixXd& K, int trajectory_index) {
  return Rng::substream(seed, {kTrajectoryTag, gain_key(K),
                               static_cast<std::uint64_t>(trajectory_index)});
}

Dataset generate_dataset(const SystemDistribution& dist, std::span<const MatrixXd> controllers,
                         int n, int horizon, std::uint64_t seed) {
  if (n < 1) throw ConfigError("generate_dataset: n must be >= 1");
  if (horizon < 1) throw ConfigError("generate_dataset: horizon must be >= 1");
  Dataset data;
  data.horizon = horizon;
  data.per_controller.resize(controllers.size());
  for (std::size_t j = 0; j < controllers.size(); ++j) {
    const MatrixXd& K = controllers[j];
    require_dims(K.rows() == dist.dim_u && K.cols() == dist.dim_x,
                 "generate_dataset: controller must be dim_u x dim_x");
    auto& block = data.per_controller[j];
    block.reserve(n);
    for (int i = 0; i < n; ++i) {
      Rng rng = trajectory_stream(seed, K, i);
      block.push_back(sample_trajectory(dist, K, horizon, rng));
    }
  }
  return data;
}

}  // namespace pbctl
