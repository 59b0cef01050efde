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

#ifndef PBCTL_LQG_HPP
#define PBCTL_LQG_HPP

#include <vector>

#include "pbctl/cost.hpp"
#include "pbctl/types.hpp"

namespace pbctl {

/// Time-varying gains K(0)..K(T-1) (u = K(t) x, sign included) and value
/// matrices P(0)..P(T) of the finite-horizon state-feedback problem.
template <typename Scalar>
struct RiccatiSolution {
  std::vector<Mat<Scalar>> gains;
  std::vector<Mat<Scalar>> value_matrices;

  int horizon() const { return static_cast<int>(gains.size()); }
};

/// Backward Riccati recursion from P(T) = Q:
///   K(t) = -(R + B'P(t+1)B)^{-1} B'P(t+1)A
///   P(t) = Q + A'P(t+1)A + A'P(t+1)B K(t)
template <typename DA, typename DB, typename DQ, typename DR>
RiccatiSolution<typename DA::Scalar> riccati_solve(const Eigen::MatrixBase<DA>& A,
                                                   const Eigen::MatrixBase<DB>& B,
                                                   const Eigen::MatrixBase<DQ>& Q,
                                                   const Eigen::MatrixBase<DR>& R, int horizon) {
  using Scalar = typename DA::Scalar;
  const auto dx = A.rows();
  require_dims(A.cols() == dx && B.rows() == dx && Q.rows() == dx && Q.cols() == dx &&
                   R.rows() == B.cols() && R.cols() == B.cols(),
               "riccati_solve: inconsistent A/B/Q/R shapes");
  if (horizon < 0) throw ConfigError("riccati_solve: horizon must be >= 0");
  RiccatiSolution<Scalar> sol;
  sol.gains.resize(horizon);
  sol.value_matrices.resize(horizon + 1);
  sol.value_matrices[horizon] = Q;
  for (int t = horizon - 1; t >= 0; --t) {
    const Mat<Scalar>& next = sol.value_matrices[t + 1];
    const Mat<Scalar> S = R + B.transpose() * next * B;
    const Eigen::LLT<Mat<Scalar>> llt(S);
    if (llt.info() != Eigen::Success || !(llt.rcond() > Scalar(1e-12)))
      throw NumericalError("riccati_solve: R + B'PB is numerically singular");
    const Mat<Scalar> K = -llt.solve(B.transpose() * next * A);
    Mat<Scalar> P = Q + A.transpose() * next * A + A.transpose() * next * B * K;
    sol.value_matrices[t] = Scalar(0.5) * (P + P.transpose());
    sol.gains[t] = K;
  }
  return sol;
}

inline RiccatiSolution<double> riccati_solve(const MatrixXd& A, const MatrixXd& B,
                                             const CostWeights& w, int horizon) {
  return riccati_solve(A, B, w.Q, w.R, horizon);
}

/// Expected cost from x(0) = 0 under zero-mean noise with covariance noise_cov:
/// sum_{t=0}^{T-1} trace(P(t+1) noise_cov).
template <typename Scalar, typename DS>
Scalar lqg_expected_cost(const RiccatiSolution<Scalar>& sol, const Eigen::MatrixBase<DS>& noise_cov) {
  Scalar total(0);
  for (int t = 0; t < sol.horizon(); ++t) total += (sol.value_matrices[t + 1] * noise_cov).trace();
  return total;
}

/// Closed-loop states under time-varying gains, x(0) = 0.
template <typename Scalar, typename DA, typename DB, typename DW>
Mat<Scalar> simulate_time_varying(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B,
                                  const std::vector<Mat<Scalar>>& gains,
                                  const Eigen::MatrixBase<DW>& W) {
  require_dims(static_cast<Eigen::Index>(gains.size()) == W.cols(),
               "simulate_time_varying: one gain per noise column required");
  Mat<Scalar> X(A.rows(), W.cols());
  Vec<Scalar> x = Vec<Scalar>::Zero(A.rows());
  for (Eigen::Index t = 0; t < W.cols(); ++t) {
    x = A * x + B * (gains[t] * x) + W.col(t);
    X.col(t) = x;
  }
  return X;
}

/// Quadratic cost of a trajectory generated with time-varying gains.
template <typename Scalar>
Scalar time_varying_cost(const std::vector<Mat<Scalar>>& gains, const Mat<Scalar>& X,
                         const CostWeights& w) {
  Scalar total(0);
  Vec<Scalar> x = Vec<Scalar>::Zero(X.rows());
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    const Vec<Scalar> u = gains[t] * x;
    total += x.dot(w.Q * x) + u.dot(w.R * u);
    x = X.col(t);
  }
  return total + x.dot(w.Q * x);
}

}  // namespace pbctl

#endif  // PBCTL_LQG_HPP
