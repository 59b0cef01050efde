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

#include "pbctl/cost.hpp"

#include <Eigen/Eigenvalues>

namespace pbctl {

void CostWeights::validate() const {
  require_dims(Q.rows() == Q.cols() && R.rows() == R.cols(), "weights: Q and R must be square");
  if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm()) ||
      (R - R.transpose()).norm() > 1e-12 * (1.0 + R.norm()))
    throw ConfigError("weights: Q and R must be symmetric");
  const Eigen::SelfAdjointEigenSolver<MatrixXd> q_eig(Q, Eigen::EigenvaluesOnly);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> r_eig(R, Eigen::EigenvaluesOnly);
  if (q_eig.eigenvalues().minCoeff() < -1e-10) throw ConfigError("weights: Q must be PSD");
  if (!(r_eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("weights: R must be PD");
}

std::vector<double> trajectory_costs(const MatrixXd& K, std::span<const Trajectory> trajectories,
                                     const CostWeights& w) {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const Trajectory& X : trajectories) out.push_back(quadratic_cost(K, X, w));
  return out;
}

double empirical_cost(const MatrixXd& K, std::span<const Trajectory> trajectories,
                      const CostWeights& w) {
  if (trajectories.empty()) throw ConfigError("empirical_cost: no trajectories");
  const std::vector<double> c = trajectory_costs(K, trajectories, w);
  return std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
}

double gibbs_empirical_cost(const VectorXd& probs, const VectorXd& costs) {
  require_dims(probs.size() == costs.size(), "gibbs_empirical_cost: length mismatch");
  double total = 0.0;
  // Zero-probability controllers contribute nothing even if their cost is infinite.
  for (Eigen::Index j = 0; j < probs.size(); ++j)
    if (probs(j) > 0.0) total += probs(j) * costs(j);
  return total;
}

double mc_gibbs_cost(std::span<const double> sampled_costs) {
  if (sampled_costs.empty()) throw ConfigError("mc_gibbs_cost: no sampled controllers");
  return std::accumulate(sampled_costs.begin(), sampled_costs.end(), 0.0) /
         static_cast<double>(sampled_costs.size());
}

ClosedLoopMatrices closed_loop_matrices(const MatrixXd& M, const MatrixXd& Z, const MatrixXd& Q,
                                        int horizon) {
  require_dims(M.rows() == M.cols() && Z.rows() == M.rows() && Z.cols() == M.cols() &&
                   Q.rows() == M.rows() && Q.cols() == M.cols(),
               "closed_loop_matrices: shape mismatch");
  const auto dx = M.rows();
  ClosedLoopMatrices out{M, Z, {}, {}};
  std::vector<MatrixXd> powers(static_cast<std::size_t>(horizon) + 1);
  powers[0] = MatrixXd::Identity(dx, dx);
  for (int p = 1; p <= horizon; ++p) powers[p] = M * powers[p - 1];

  auto weight = [&](int t) -> const MatrixXd& { return t < horizon ? Z : Q; };
  auto term = [&](int t, int i, int j) -> MatrixXd {
    return powers[t - 1 - i].transpose() * weight(t) * powers[t - 1 - j];
  };

  out.H_diag.assign(horizon, MatrixXd::Zero(dx, dx));
  for (int i = 0; i < horizon; ++i)
    for (int t = i + 1; t <= horizon; ++t) out.H_diag[i] += term(t, i, i);
  for (int i = 0; i < horizon; ++i)
    for (int j = i + 1; j < horizon; ++j) {
      MatrixXd H = MatrixXd::Zero(dx, dx);
      for (int t = j + 1; t <= horizon; ++t) H += term(t, i, j);
      out.H_cross.emplace(std::pair{i, j}, std::move(H));
    }
  return out;
}

double noise_expansion_cost(const MatrixXd& M, const MatrixXd& Z, const MatrixXd& Q,
                            const MatrixXd& W) {
  const int T = static_cast<int>(W.cols());
  require_dims(W.rows() == M.rows(), "noise_expansion_cost: W must have dim_x rows");
  const ClosedLoopMatrices H = closed_loop_matrices(M, Z, Q, T);
  double total = 0.0;
  for (int i = 0; i < T; ++i) total += W.col(i).dot(H.H_diag[i] * W.col(i));
  for (const auto& [ij, Hij] : H.H_cross) {
    const auto [i, j] = ij;
    total += W.col(i).dot(Hij * W.col(j)) + W.col(j).dot(Hij.transpose() * W.col(i));
  }
  return total;
}

}  // namespace pbctl
