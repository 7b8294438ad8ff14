// Copyright 2026 The safeflight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "safeflight/planner.hpp"
#include "safeflight/scenario.hpp"
#include "safeflight/spline.hpp"
#include "safeflight/tracker.hpp"

namespace {

const std::string kScenarios = SAFEFLIGHT_SCENARIO_DIR;

void BM_BasisEval(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const safeflight::KnotVector knots = safeflight::make_clamped_uniform_knots(0.0, 1.0, n, 5);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(safeflight::basis_eval(knots, 5, t));
    t += 0.618034;
    if (t > 1.0) t -= 1.0;
  }
}
BENCHMARK(BM_BasisEval)->Arg(10)->Arg(40)->Arg(160);

void BM_SnapGram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const safeflight::KnotVector knots = safeflight::make_clamped_uniform_knots(0.0, 1.0, n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(safeflight::snap_gram(knots));
}
BENCHMARK(BM_SnapGram)->Arg(40)->Arg(160);

void BM_PlanScenario(benchmark::State& state, const std::string& name) {
  const safeflight::Scenario sc = safeflight::load_scenario(kScenarios + "/" + name + ".json");
  for (auto _ : state) benchmark::DoNotOptimize(safeflight::plan(sc.problem));
}
BENCHMARK_CAPTURE(BM_PlanScenario, hover, std::string("hover"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PlanScenario, corridor, std::string("example3_c2_c3"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PlanScenario, waypoints, std::string("example1_relaxed"))->Unit(benchmark::kMillisecond);

void BM_SafetyFilter(benchmark::State& state) {
  const safeflight::CbfParams params = safeflight::make_cbf_params(0.1, 6.0, 8.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  safeflight::TrackState z;
  safeflight::ReferencePoint ref;
  Eigen::Vector3d nominal;
  for (int q = 0; q < 3; ++q) {
    z.r[q] = 0.05 * u(rng);
    z.r1[q] = u(rng);
    ref.r2[q] = u(rng);
    nominal[q] = 5.0 * u(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(safeflight::safe_step(z, ref, nominal, params));
  }
}
BENCHMARK(BM_SafetyFilter);

}  // namespace

BENCHMARK_MAIN();
