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

#include "pbctl/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace pbctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

// log(1 - exp(x)) for x <= 0.
double log1mexp(double x) {
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// Phi(b) - Phi(a) for a < 0 < b, via erf so that neither term cancels.
double straddling_mass(double a, double b) {
  return 0.5 * (std::erf(b / std::numbers::sqrt2) - std::erf(a / std::numbers::sqrt2));
}

}  // namespace

double log_normal_pdf(double z) {
  if (std::isinf(z)) return -kInf;
  return -0.5 * z * z - kLogSqrt2Pi;
}

double log_normal_cdf(double z) {
  if (z == -kInf) return -kInf;
  if (z == kInf) return 0.0;
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z > -36.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // Asymptotic Mills-ratio series; the truncation error is below 1e-13 here.
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return log_normal_pdf(z) - std::log(-z) + std::log(series);
}

double log_normal_cdf_diff(double a, double b) {
  if (!(a < b)) return -kInf;
  if (a >= 0.0) return log_normal_cdf_diff(-b, -a);
  if (b > 0.0) return std::log(straddling_mass(a, b));
  const double log_b = log_normal_cdf(b);
  return log_b + log1mexp(log_normal_cdf(a) - log_b);
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0)) return -kInf;
  if (!(p < 1.0)) return kInf;
  if (p < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double standard_normal_log_quantile(double log_p) {
  if (log_p >= 0.0) return kInf;
  if (log_p > -700.0) {
    if (log_p < -std::numbers::ln2) return standard_normal_quantile(std::exp(log_p));
    return -standard_normal_quantile(-std::expm1(log_p));
  }
  // Newton iteration on log Phi(z) = log_p, started from the leading asymptotic term.
  double z = -std::sqrt(-2.0 * log_p - std::log(-4.0 * std::numbers::pi * log_p));
  for (int it = 0; it < 50; ++it) {
    const double lc = log_normal_cdf(z);
    const double slope = std::exp(log_normal_pdf(z) - lc);
    const double step = (lc - log_p) / slope;
    z -= step;
    if (std::abs(step) < 1e-14 * std::abs(z)) break;
  }
  return z;
}

double log_normalizer(const TruncatedNormal& d) {
  return log_normal_cdf_diff(d.alpha(), d.beta());
}

TruncatedMoments moments(const TruncatedNormal& d) {
  if (d.degenerate()) {
    const double m = std::clamp(d.mean, d.lower, d.upper);
    return {m, 0.0, 0.0};
  }
  const double a = d.alpha();
  const double b = d.beta();
  const double log_z = log_normal_cdf_diff(a, b);
  const double ra = std::exp(log_normal_pdf(a) - log_z);
  const double rb = std::exp(log_normal_pdf(b) - log_z);
  const double a_ra = std::isinf(a) ? 0.0 : a * ra;
  const double b_rb = std::isinf(b) ? 0.0 : b * rb;
  const double mean_z = ra - rb;
  const double second_z = 1.0 + a_ra - b_rb;
  const double var_z = std::max(0.0, second_z - mean_z * mean_z);
  return {d.mean + d.stddev * mean_z, d.stddev * d.stddev * var_z, second_z};
}

double inverse_cdf(const TruncatedNormal& d, double u) {
  if (d.degenerate()) return std::clamp(d.mean, d.lower, d.upper);
  double a = d.alpha();
  double b = d.beta();
  // Work on the side of zero that carries less mass so tail probabilities
  // are represented relative to a small number rather than to one.
  const bool reflect = a + b > 0.0;
  if (reflect) {
    std::swap(a, b);
    a = -a;
    b = -b;
    u = 1.0 - u;
  }
  double z;
  if (b <= 0.0) {
    const double log_b = log_normal_cdf(b);
    const double ratio = std::exp(log_normal_cdf(a) - log_b);
    z = standard_normal_log_quantile(log_b + std::log(ratio + u * (1.0 - ratio)));
  } else {
    const double mass = straddling_mass(a, b);
    const double lower_cdf = std::exp(log_normal_cdf(a));
    const double p = lower_cdf + u * mass;
    if (p <= 0.5) {
      z = standard_normal_quantile(p);
    } else {
      const double q = std::exp(log_normal_cdf(-b)) + (1.0 - u) * mass;
      z = -standard_normal_quantile(q);
    }
  }
  z = std::clamp(z, a, b);
  if (reflect) z = -z;
  return std::clamp(d.mean + d.stddev * z, d.lower, d.upper);
}

double sample(const TruncatedNormal& d, Rng& rng) { return inverse_cdf(d, rng.uniform()); }

double kl_divergence(const TruncatedNormal& p, const TruncatedNormal& q) {
  if (p.lower < q.lower || p.upper > q.upper) return kInf;
  if (p.degenerate() || q.degenerate()) {
    if (p.degenerate() && q.degenerate() &&
        std::clamp(p.mean, p.lower, p.upper) == std::clamp(q.mean, q.lower, q.upper))
      return 0.0;
    return kInf;
  }
  const TruncatedMoments mp = moments(p);
  const double centered_q = mp.mean - q.mean;
  const double second_about_q = mp.variance + centered_q * centered_q;
  const double kl = log_normalizer(q) - log_normalizer(p) + std::log(q.stddev / p.stddev) -
                    0.5 * mp.standardized_second_moment +
                    0.5 * second_about_q / (q.stddev * q.stddev);
  return std::max(kl, 0.0);
}

}  // namespace pbctl
