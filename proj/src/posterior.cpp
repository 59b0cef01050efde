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

#include "pbctl/posterior.hpp"

#include <cmath>
#include <limits>

namespace pbctl {

FinitePosterior FinitePosterior::from_probs(VectorXd probs) {
  if (probs.size() == 0) throw ConfigError("pmf: empty");
  if (!probs.allFinite() || (probs.array() < 0.0).any())
    throw ConfigError("pmf: entries must be finite and nonnegative");
  const double total = probs.sum();
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("pmf: entries must sum to 1");
  probs /= total;
  return FinitePosterior{std::move(probs)};
}

FinitePosterior FinitePosterior::uniform(int size) {
  if (size < 1) throw ConfigError("pmf: empty");
  return FinitePosterior{VectorXd::Constant(size, 1.0 / size)};
}

FinitePosterior FinitePosterior::point_mass(int size, int index) {
  if (index < 0 || index >= size) throw ConfigError("pmf: point-mass index out of range");
  VectorXd p = VectorXd::Zero(size);
  p(index) = 1.0;
  return FinitePosterior{std::move(p)};
}

double kl_finite(const FinitePosterior& P, const FinitePosterior& P0) {
  require_dims(P.size() == P0.size(), "kl_finite: length mismatch");
  double kl = 0.0;
  for (int j = 0; j < P.size(); ++j) {
    const double p = P.probs(j);
    if (p == 0.0) continue;
    if (P0.probs(j) == 0.0) return std::numeric_limits<double>::infinity();
    kl += p * std::log(p / P0.probs(j));
  }
  return std::max(kl, 0.0);
}

void TruncGaussPosterior::validate() const {
  const auto d = mu.size();
  require_dims(d > 0 && sigma.size() == d && lower.size() == d && upper.size() == d,
               "truncated-Gaussian posterior: parameter vectors must share one length");
  if (gain_rows < 1 || d % gain_rows != 0)
    throw DimensionError("truncated-Gaussian posterior: gain_rows must divide the dimension");
  if (!(sigma.array() > 0.0).all()) throw ConfigError("truncated-Gaussian posterior: sigma must be > 0");
  if (!(lower.array() < upper.array()).all())
    throw ConfigError("truncated-Gaussian posterior: lower < upper required");
  if (!mu.allFinite()) throw ConfigError("truncated-Gaussian posterior: mu must be finite");
}

bool TruncGaussPosterior::support_within(const TruncGaussPosterior& other) const {
  return dim() == other.dim() && (lower.array() >= other.lower.array()).all() &&
         (upper.array() <= other.upper.array()).all();
}

VectorXd TruncGaussPosterior::theta() const {
  VectorXd t(4 * dim());
  t << mu, sigma, lower, upper;
  return t;
}

TruncGaussPosterior TruncGaussPosterior::from_theta(const VectorXd& theta, int gain_rows) {
  require_dims(theta.size() % 4 == 0, "from_theta: length must be a multiple of 4");
  const auto d = theta.size() / 4;
  return {theta.segment(0, d), theta.segment(d, d), theta.segment(2 * d, d),
          theta.segment(3 * d, d), gain_rows};
}

MatrixXd sample_gain(const TruncGaussPosterior& P, Rng& rng) {
  MatrixXd K(P.gain_rows, P.gain_cols());
  for (int r = 0; r < K.rows(); ++r)
    for (int c = 0; c < K.cols(); ++c) K(r, c) = sample(P.entry(r * K.cols() + c), rng);
  return K;
}

double kl_truncgauss(const TruncGaussPosterior& P, const TruncGaussPosterior& P0) {
  require_dims(P.dim() == P0.dim(), "kl_truncgauss: dimension mismatch");
  double kl = 0.0;
  for (int i = 0; i < P.dim(); ++i) kl += kl_divergence(P.entry(i), P0.entry(i));
  return kl;
}

}  // namespace pbctl
