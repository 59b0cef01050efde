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

#ifndef PBCTL_TRUNCATED_NORMAL_HPP
#define PBCTL_TRUNCATED_NORMAL_HPP

#include "pbctl/random.hpp"

namespace pbctl {

/// log of the standard normal density.
double log_normal_pdf(double z);

/// log Phi(z), accurate far into the lower tail.
double log_normal_cdf(double z);

/// log(Phi(b) - Phi(a)) for a < b, without cancellation in either tail.
double log_normal_cdf_diff(double a, double b);

/// Phi^{-1}(p) for p in (0, 1).
double standard_normal_quantile(double p);

/// Phi^{-1}(exp(log_p)); stays finite for log_p far below the double range of p.
double standard_normal_log_quantile(double log_p);

/// Univariate Gaussian N(mean, stddev^2) restricted to [lower, upper].
///
/// The bounds may be infinite. A zero stddev denotes the point mass at
/// clamp(mean, lower, upper).
struct TruncatedNormal {
  double mean = 0.0;
  double stddev = 1.0;
  double lower = 0.0;
  double upper = 0.0;

  bool degenerate() const { return !(stddev > 0.0); }
  double alpha() const { return (lower - mean) / stddev; }
  double beta() const { return (upper - mean) / stddev; }
};

/// log of the probability mass the untruncated Gaussian puts on [lower, upper].
double log_normalizer(const TruncatedNormal& d);

struct TruncatedMoments {
  double mean;
  double variance;
  /// E[((x - mean_parameter) / stddev)^2], needed by the KL divergence.
  double standardized_second_moment;
};

/// Closed-form mean and variance of the truncated distribution.
TruncatedMoments moments(const TruncatedNormal& d);

/// Quantile function of the truncated distribution (inverse-CDF map of u in (0,1)).
double inverse_cdf(const TruncatedNormal& d, double u);

/// One draw; consumes exactly one uniform from the stream.
double sample(const TruncatedNormal& d, Rng& rng);

/// KL(p || q). Returns +inf when the support of p is not contained in that of q.
double kl_divergence(const TruncatedNormal& p, const TruncatedNormal& q);

}  // namespace pbctl

#endif  // PBCTL_TRUNCATED_NORMAL_HPP
