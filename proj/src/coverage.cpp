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

#include "pbctl/coverage.hpp"

#include "pbctl/learn.hpp"

namespace pbctl {

namespace {
constexpr std::uint64_t kTagReference = 0x72656665;
constexpr std::uint64_t kTagRepetition = 0x72657065;
}  // namespace

CoverageResult coverage_check(const SystemDistribution& dist, std::span<const MatrixXd> controllers,
                              const CostWeights& w, const FinitePosterior& P0,
                              const BoundConfig& config, const CoverageSetup& setup,
                              std::uint64_t seed, const std::optional<FinitePosterior>& fixed) {
  if (setup.repetitions < 1) throw ConfigError("coverage: repetitions must be >= 1");
  const int L = static_cast<int>(controllers.size());
  require_dims(P0.size() == L && (!fixed || fixed->size() == L),
               "coverage: posterior length must match the controller list");

  const FiniteSpace space{{controllers.begin(), controllers.end()}};
  const ModelConstants mc = ModelConstants::from(dist);
  const std::vector<double> gamma = admissible_lambdas(config, space, w, mc, setup.horizon);
  const LogValue b_theory = config.certify_with == BCostKind::Theoretical
                                ? b_cost_theoretical(space, w, mc, setup.horizon)
                                : LogValue{};

  VectorXd reference(L);
  const std::uint64_t ref_seed = derive_seed(seed, {kTagReference});
  for (int j = 0; j < L; ++j)
    reference(j) = evaluate_controller(dist, controllers[j], w, setup.horizon,
                                       setup.reference_trajectories, ref_seed)
                       .mean;

  CoverageResult out;
  for (int r = 0; r < setup.repetitions; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {kTagRepetition, static_cast<std::uint64_t>(r)});
    const Dataset data = generate_dataset(dist, controllers, setup.n, setup.horizon, rep_seed);
    const FiniteLearnResult learned = learn_finite(data, controllers, w, P0, config, gamma);
    const FinitePosterior& P = fixed ? *fixed : learned.posterior;

    const BCostProxy b = config.certify_with == BCostKind::Empirical
                             ? BCostProxy{BCostKind::Empirical, LogValue::from_linear(learned.b_cost_hat)}
                             : BCostProxy{BCostKind::Theoretical, b_theory};
    const BoundReport report =
        best_finite_bound(P, P0, learned.empirical_costs, gamma, b, setup.n, config.delta);

    CoverageRecord rec{r, report.total, gibbs_empirical_cost(P.probs, reference), false};
    rec.covered = rec.bound >= rec.reference;
    out.covered += rec.covered ? 1 : 0;
    out.records.push_back(rec);
  }
  out.coverage = static_cast<double>(out.covered) / setup.repetitions;
  return out;
}

}  // namespace pbctl
