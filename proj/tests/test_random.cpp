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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "pbctl/random.hpp"
#include "pbctl/truncated_normal.hpp"
#include "support.hpp"

using namespace pbctl;

TEST_CASE("derive_seed is a pure function of seed and path") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, {}) != derive_seed(1, {0}));
}

TEST_CASE("streams replay and uniforms stay in the open interval") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(7);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(s2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("normal cdf helpers are tail safe") {
  CHECK(std::exp(log_normal_cdf(0.0)) == doctest::Approx(0.5));
  CHECK(std::exp(log_normal_cdf(1.0)) == doctest::Approx(0.5 * std::erfc(-1.0 / std::sqrt(2.0))));
  // log Phi(-40) ~ -40^2/2 - log(40 sqrt(2 pi))
  CHECK(log_normal_cdf(-40.0) == doctest::Approx(-800.0 - std::log(40.0 * std::sqrt(2 * M_PI))).epsilon(1e-6));
  CHECK(std::isfinite(log_normal_cdf_diff(30.0, 31.0)));
  CHECK(std::isfinite(log_normal_cdf_diff(-31.0, -30.0)));
  CHECK(log_normal_cdf_diff(30.0, 31.0) == doctest::Approx(log_normal_cdf_diff(-31.0, -30.0)));
  CHECK(standard_normal_quantile(0.975) == doctest::Approx(1.959963984540054));
  CHECK(standard_normal_log_quantile(std::log(0.025)) == doctest::Approx(-1.959963984540054));
  CHECK(std::isfinite(standard_normal_log_quantile(-1000.0)));
}

TEST_CASE("truncated moments match quadrature") {
  const TruncatedNormal cases[] = {
      {0.0, 1.0, -2.0, 2.0}, {0.3, 0.8, -1.0, 1.0}, {-0.5, 0.25, -0.575, 0.25}, {2.0, 0.5, -1.0, 0.0}};
  for (const TruncatedNormal& d : cases) {
    const double m1 = testing::truncated_moment_quadrature(d.mean, d.stddev, d.lower, d.upper, 1);
    const double m2 = testing::truncated_moment_quadrature(d.mean, d.stddev, d.lower, d.upper, 2);
    const TruncatedMoments m = moments(d);
    CHECK(m.mean == doctest::Approx(m1).epsilon(1e-9));
    CHECK(m.variance == doctest::Approx(m2 - m1 * m1).epsilon(1e-8));
  }
}

TEST_CASE("sampling respects the box and the analytic mean") {
  const TruncatedNormal d{-0.5, 0.25, -0.575, 0.25};
  Rng rng(3);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample(d, rng);
    REQUIRE(x >= d.lower);
    REQUIRE(x <= d.upper);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - moments(d).mean) < 3 * se);
}

TEST_CASE("a vanishing stddev collapses onto the clamped mean") {
  Rng rng(1);
  CHECK(sample({0.7, 1e-12, -0.5, 0.5}, rng) == doctest::Approx(0.5));
  CHECK(sample({0.1, 1e-12, -0.5, 0.5}, rng) == doctest::Approx(0.1));
  CHECK(sample({0.1, 0.0, -0.5, 0.5}, rng) == 0.1);
}

TEST_CASE("far tail truncation stays inside the box") {
  const TruncatedNormal d{0.0, 1.0, 12.0, 13.0};
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample(d, rng);
    REQUIRE(x >= 12.0);
    REQUIRE(x <= 13.0);
  }
  CHECK(moments(d).mean > 12.0);
  CHECK(moments(d).mean < 12.2);
}

TEST_CASE("truncated normal KL against quadrature") {
  const TruncatedNormal q{0.0, 1.0, -2.0, 2.0};
  const TruncatedNormal p{0.3, 0.8, -1.0, 1.0};
  const double oracle = testing::kl_quadrature(p.mean, p.stddev, p.lower, p.upper, q.mean,
                                               q.stddev, q.lower, q.upper);
  CHECK(std::abs(kl_divergence(p, q) - oracle) < 1e-8);
  CHECK(std::abs(kl_divergence(q, q)) < 1e-10);
  CHECK(kl_divergence(q, p) == std::numeric_limits<double>::infinity());
}
