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

#ifndef PBCTL_TESTS_SUPPORT_HPP
#define PBCTL_TESTS_SUPPORT_HPP

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbctl/random.hpp"
#include "pbctl/sysmodel.hpp"

namespace pbctl::testing {

inline MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = scale * rng.normal();
  return m;
}

/// Symmetric positive semidefinite (definite when `ridge` > 0).
inline MatrixXd random_psd(Rng& rng, Eigen::Index n, double ridge) {
  const MatrixXd G = random_matrix(rng, n, n, 1.0);
  return G * G.transpose() / static_cast<double>(n) + ridge * MatrixXd::Identity(n, n);
}

/// Deterministic system x+ = A x + B u + w with i.i.d. N(0, s^2) noise.
inline SystemDistribution fixed_system(const MatrixXd& A, const MatrixXd& B, double noise_std) {
  SystemDistribution d;
  d.dim_x = static_cast<int>(A.rows());
  d.dim_u = static_cast<int>(B.cols());
  d.mean_A = A;
  d.mean_B = B;
  d.std_A = MatrixXd::Zero(A.rows(), A.cols());
  d.std_B = MatrixXd::Zero(B.rows(), B.cols());
  const double ra = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
  const double rb = B.size() ? B.cwiseAbs().maxCoeff() : 0.0;
  d.bounds_A = {-ra, ra};
  d.bounds_B = {-rb, rb};
  d.noise_std = VectorXd::Constant(A.rows(), noise_std);
  d.sigma_w = noise_std;
  return d;
}

/// k-th raw moment of N(mean, sd^2) restricted to [lo, hi], by adaptive
/// Gauss-Kronrod quadrature of the unnormalized density.
inline double truncated_moment_quadrature(double mean, double sd, double lo, double hi, int k) {
  using boost::math::quadrature::gauss_kronrod;
  auto density = [&](double x) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z);
  };
  const double mass = gauss_kronrod<double, 61>::integrate(density, lo, hi, 15, 1e-14);
  const double num = gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::pow(x, k) * density(x); }, lo, hi, 15, 1e-14);
  return num / mass;
}

/// KL(p || q) for univariate truncated normals by quadrature over p's support.
inline double kl_quadrature(double mp, double sp, double lp, double up, double mq, double sq,
                            double lq, double uq) {
  using boost::math::quadrature::gauss_kronrod;
  // Normalizers from erf, independent of the library's tail-safe routines.
  auto mass = [](double m, double s, double l, double u) {
    return 0.5 * (std::erf((u - m) / (s * std::sqrt(2.0))) - std::erf((l - m) / (s * std::sqrt(2.0))));
  };
  const double log_root_2pi = 0.5 * std::log(2.0 * M_PI);
  const double log_zp = std::log(mass(mp, sp, lp, up) * sp) + log_root_2pi;
  const double log_zq = std::log(mass(mq, sq, lq, uq) * sq) + log_root_2pi;
  auto integrand = [&](double x) {
    const double zp = (x - mp) / sp;
    const double zq = (x - mq) / sq;
    const double log_p = -0.5 * zp * zp - log_zp;
    const double log_q = -0.5 * zq * zq - log_zq;
    return std::exp(log_p) * (log_p - log_q);
  };
  return gauss_kronrod<double, 61>::integrate(integrand, lp, up, 20, 1e-15);
}

}  // namespace pbctl::testing

#endif  // PBCTL_TESTS_SUPPORT_HPP
