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

#ifndef PBCTL_COST_HPP
#define PBCTL_COST_HPP

#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "pbctl/sysmodel.hpp"
#include "pbctl/types.hpp"

namespace pbctl {

/// State and input weights of the quadratic cost: Q >= 0, R > 0.
struct CostWeights {
  MatrixXd Q;
  MatrixXd R;

  void validate() const;
  bool operator==(const CostWeights& o) const { return Q == o.Q && R == o.R; }
};

/// sum_{t=0}^{T-1} [x'Qx + (Kx)'R(Kx)] + x(T)'Q x(T) with x(0) = 0.
template <typename DK, typename DX, typename DQ, typename DR>
typename DX::Scalar quadratic_cost(const Eigen::MatrixBase<DK>& K, const Eigen::MatrixBase<DX>& X,
                                   const Eigen::MatrixBase<DQ>& Q,
                                   const Eigen::MatrixBase<DR>& R) {
  using Scalar = typename DX::Scalar;
  const auto dx = X.rows();
  require_dims(Q.rows() == dx && Q.cols() == dx && K.cols() == dx && R.rows() == K.rows() &&
                   R.cols() == K.rows(),
               "quadratic_cost: inconsistent K/X/Q/R shapes");
  const Eigen::Index T = X.cols();
  Scalar total(0);
  Vec<Scalar> x = Vec<Scalar>::Zero(dx);  // x(0)
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec<Scalar> u = K * x;
    total += x.dot(Q * x) + u.dot(R * u);
    x = X.col(t);
  }
  total += x.dot(Q * x);
  return total;
}

inline double quadratic_cost(const MatrixXd& K, const Trajectory& X, const CostWeights& w) {
  return quadratic_cost(K, X.states, w.Q, w.R);
}

/// Mean quadratic cost over trajectories generated with K.
double empirical_cost(const MatrixXd& K, std::span<const Trajectory> trajectories,
                      const CostWeights& w);

/// Per-trajectory costs of one controller's block.
std::vector<double> trajectory_costs(const MatrixXd& K, std::span<const Trajectory> trajectories,
                                     const CostWeights& w);

/// Posterior-weighted mean of per-controller empirical costs.
double gibbs_empirical_cost(const VectorXd& probs, const VectorXd& costs);

/// Plain mean of empirical costs of controllers drawn i.i.d. from a posterior.
double mc_gibbs_cost(std::span<const double> sampled_costs);

/// Matrices that express the quadratic cost directly as a quadratic form in the noise.
struct ClosedLoopMatrices {
  MatrixXd M;                                    // A + B K
  MatrixXd Z;                                    // Q + K' R K
  std::vector<MatrixXd> H_diag;                  // H_0 .. H_{T-1}
  std::map<std::pair<int, int>, MatrixXd> H_cross;  // H_ij for i < j
};

/// H_i = sum_{t=i+1}^{T} D_{t,ii}, H_ij = sum_{t=j+1}^{T} D_{t,ij} with
/// D_{t,ij} = (M^{t-1-i})' W_t M^{t-1-j}; W_t = Z for t < T and Q at t = T.
ClosedLoopMatrices closed_loop_matrices(const MatrixXd& M, const MatrixXd& Z, const MatrixXd& Q,
                                        int horizon);

/// Cost evaluated from the noise alone:
/// sum_i w_i'H_i w_i + sum_{i<j} (w_i'H_ij w_j + w_j'H_ij' w_i).
/// Quadratic in T; intended as an independent check of simulate + quadratic_cost.
double noise_expansion_cost(const MatrixXd& M, const MatrixXd& Z, const MatrixXd& Q,
                            const MatrixXd& W);

}  // namespace pbctl

#endif  // PBCTL_COST_HPP
