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

#include <algorithm>

#include "pbctl/sysmodel.hpp"
#include "support.hpp"

using namespace pbctl;

namespace {

SystemDistribution example_system() {
  SystemDistribution d;
  d.dim_x = 2;
  d.dim_u = 1;
  d.mean_A = (MatrixXd(2, 2) << 0.12, -0.25, 0.21, 0.05).finished();
  d.mean_B = (MatrixXd(2, 1) << 0.18, -0.27).finished();
  d.std_A = (MatrixXd(2, 2) << 0.05, 0.08, 0.03, 0.1).finished();
  d.std_B = (MatrixXd(2, 1) << 0.07, 0.02).finished();
  d.bounds_A = {-0.3, 0.3};
  d.bounds_B = {-0.3, 0.3};
  d.noise_std = (VectorXd(2) << 0.42, 0.47).finished();
  d.sigma_w = 0.5;
  return d;
}

}  // namespace

TEST_CASE("hand recursion in the scalar case") {
  const MatrixXd A = MatrixXd::Constant(1, 1, 0.5);
  const MatrixXd B = MatrixXd::Constant(1, 1, 1.0);
  const MatrixXd K = MatrixXd::Constant(1, 1, 0.2);
  const MatrixXd W = (MatrixXd(1, 2) << 1.0, 1.0).finished();
  const Trajectory tr = simulate(A, B, K, W);
  REQUIRE(tr.horizon() == 2);
  CHECK(tr.states(0, 0) == doctest::Approx(1.0));
  CHECK(tr.states(0, 1) == doctest::Approx(1.7));
}

TEST_CASE("zero noise keeps the state at the origin") {
  Rng rng(1);
  const MatrixXd A = testing::random_matrix(rng, 3, 3, 1.0);
  const MatrixXd B = testing::random_matrix(rng, 3, 2, 1.0);
  const MatrixXd K = testing::random_matrix(rng, 2, 3, 1.0);
  CHECK(simulate(A, B, K, MatrixXd::Zero(3, 6)).states.isZero());
}

TEST_CASE("states are linear in the noise") {
  Rng rng(2);
  const MatrixXd A = testing::random_matrix(rng, 2, 2, 0.5);
  const MatrixXd B = testing::random_matrix(rng, 2, 1, 0.5);
  const MatrixXd K = testing::random_matrix(rng, 1, 2, 0.5);
  const MatrixXd W1 = testing::random_matrix(rng, 2, 5, 1.0);
  const MatrixXd W2 = testing::random_matrix(rng, 2, 5, 1.0);
  const MatrixXd lhs = simulate(A, B, K, 2.0 * W1 - 3.0 * W2).states;
  const MatrixXd rhs = 2.0 * simulate(A, B, K, W1).states - 3.0 * simulate(A, B, K, W2).states;
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
  const MatrixXd A = MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(simulate(A, MatrixXd::Zero(2, 1), MatrixXd::Zero(1, 3), MatrixXd::Zero(2, 2)),
                  DimensionError);
  CHECK_THROWS_AS(simulate(A, MatrixXd::Zero(3, 1), MatrixXd::Zero(1, 2), MatrixXd::Zero(2, 2)),
                  DimensionError);
}

TEST_CASE("validation catches bad distributions") {
  CHECK_NOTHROW(example_system().validate());
  SystemDistribution d = example_system();
  d.noise_std(0) = 0.6;  // above sigma_w
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = example_system();
  d.std_A(0, 0) = -1.0;
  CHECK_THROWS(d.validate());
  d = example_system();
  d.mean_B = MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(d.validate(), DimensionError);
}

TEST_CASE("sampled systems lie inside the truncation bounds") {
  const SystemDistribution d = example_system();
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const SystemSample s = sample_system(d, rng);
    REQUIRE(s.A.maxCoeff() <= 0.3);
    REQUIRE(s.A.minCoeff() >= -0.3);
    REQUIRE(s.B.maxCoeff() <= 0.3);
    REQUIRE(s.B.minCoeff() >= -0.3);
  }
}

TEST_CASE("zero std reproduces the mean system") {
  const SystemDistribution d = testing::fixed_system(MatrixXd::Constant(1, 1, 0.4),
                                                     MatrixXd::Constant(1, 1, -0.7), 0.3);
  Rng rng(11);
  const SystemSample s = sample_system(d, rng);
  CHECK(s.A(0, 0) == 0.4);
  CHECK(s.B(0, 0) == -0.7);
}

TEST_CASE("noise has the configured variance") {
  SystemDistribution d = example_system();
  d.noise_std = (VectorXd(2) << 0.4, 0.5).finished();
  Rng rng(8);
  const MatrixXd W = sample_noise(d, 100000, rng);
  const VectorXd var = W.array().square().rowwise().mean();
  CHECK(var(0) == doctest::Approx(0.16).epsilon(0.05));
  CHECK(var(1) == doctest::Approx(0.25).epsilon(0.05));
  d.noise_std.setZero();
  CHECK(sample_noise(d, 10, rng).isZero());
}

TEST_CASE("datasets are deterministic, nested and order independent") {
  const SystemDistribution d = example_system();
  const std::vector<MatrixXd> gains{(MatrixXd(1, 2) << 0.1, -0.4).finished(),
                                    (MatrixXd(1, 2) << 0.3, -0.6).finished()};
  const Dataset a = generate_dataset(d, gains, 10, 5, 99);
  const Dataset b = generate_dataset(d, gains, 10, 5, 99);
  REQUIRE(a.num_controllers() == 2);
  REQUIRE(a.samples_per_controller() == 10);
  CHECK(a.horizon == 5);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 10; ++i) CHECK(a.per_controller[j][i].states == b.per_controller[j][i].states);

  const Dataset small = generate_dataset(d, gains, 4, 5, 99);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i)
      CHECK(small.per_controller[j][i].states == a.per_controller[j][i].states);

  const std::vector<MatrixXd> swapped{gains[1], gains[0]};
  const Dataset c = generate_dataset(d, swapped, 10, 5, 99);
  for (int i = 0; i < 10; ++i) {
    CHECK(c.per_controller[0][i].states == a.per_controller[1][i].states);
    CHECK(c.per_controller[1][i].states == a.per_controller[0][i].states);
  }

  const Dataset other = generate_dataset(d, gains, 10, 5, 100);
  CHECK(other.per_controller[0][0].states != a.per_controller[0][0].states);
}

TEST_CASE("dataset size matches L times n") {
  const SystemDistribution d = example_system();
  std::vector<MatrixXd> gains;
  for (int i = 0; i < 25; ++i) gains.push_back(MatrixXd::Constant(1, 2, 0.01 * i));
  const Dataset data = generate_dataset(d, gains, 10, 3, 1);
  int total = 0;
  for (const auto& block : data.per_controller) total += static_cast<int>(block.size());
  CHECK(total == 250);
}
