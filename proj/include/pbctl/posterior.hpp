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

#ifndef PBCTL_POSTERIOR_HPP
#define PBCTL_POSTERIOR_HPP

#include "pbctl/random.hpp"
#include "pbctl/truncated_normal.hpp"
#include "pbctl/types.hpp"

namespace pbctl {

/// Probability mass function over a finite list of controllers.
struct FinitePosterior {
  VectorXd probs;

  /// Validates nonnegativity and unit mass. Inputs off by at most 1e-12 are
  /// renormalized; anything further off is rejected.
  static FinitePosterior from_probs(VectorXd probs);
  static FinitePosterior uniform(int size);
  static FinitePosterior point_mass(int size, int index);

  int size() const { return static_cast<int>(probs.size()); }
};

/// KL(P || P0) with 0 ln 0 = 0; +inf when P puts mass where P0 has none.
double kl_finite(const FinitePosterior& P, const FinitePosterior& P0);

/// Product of independent truncated Gaussians over the entries of a
/// gain_rows x gain_cols gain, flattened row-major.
struct TruncGaussPosterior {
  VectorXd mu;
  VectorXd sigma;
  VectorXd lower;
  VectorXd upper;
  int gain_rows = 1;

  int dim() const { return static_cast<int>(mu.size()); }
  int gain_cols() const { return dim() / gain_rows; }
  TruncatedNormal entry(int i) const { return {mu(i), sigma(i), lower(i), upper(i)}; }

  void validate() const;
  /// True if [lower, upper] lies inside the other distribution's box in every coordinate.
  bool support_within(const TruncGaussPosterior& other) const;

  /// Flattened parameter vector theta = (mu, sigma, lower, upper).
  VectorXd theta() const;
  static TruncGaussPosterior from_theta(const VectorXd& theta, int gain_rows);

  bool operator==(const TruncGaussPosterior& o) const {
    return mu == o.mu && sigma == o.sigma && lower == o.lower && upper == o.upper &&
           gain_rows == o.gain_rows;
  }
};

/// One gain drawn entrywise, reshaped to gain_rows x gain_cols.
MatrixXd sample_gain(const TruncGaussPosterior& P, Rng& rng);

/// Sum of per-entry closed-form KLs; +inf if P's support leaves P0's.
double kl_truncgauss(const TruncGaussPosterior& P, const TruncGaussPosterior& P0);

}  // namespace pbctl

#endif  // PBCTL_POSTERIOR_HPP
