// Copyright 2026 The slsctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "slsctl/bench.hpp"
#include "slsctl/exact_dp.hpp"
#include "slsctl/group_lasso.hpp"
#include "slsctl/relaxed.hpp"

namespace {

using namespace slsctl;

RandomSystemConfig config_for(std::size_t n, std::size_t q, std::size_t N) {
  RandomSystemConfig c;
  c.n = n;
  c.q = q;
  c.N = N;
  return c;
}

void BM_RiccatiMap(benchmark::State& state) {
  const auto config = config_for(static_cast<std::size_t>(state.range(0)), 2, 1);
  const auto inst = generate_random_system(config, 0);
  const auto spec = identity_cost(config);
  const Matrix P = Matrix::Identity(static_cast<Eigen::Index>(config.n), static_cast<Eigen::Index>(config.n));
  for (auto _ : state) benchmark::DoNotOptimize(riccati_map(inst.system, spec, 1, 0, P));
}
BENCHMARK(BM_RiccatiMap)->Arg(2)->Arg(3)->Arg(6);

void BM_BuildValueSets(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto config = config_for(2, 2, N);
  const auto inst = generate_random_system(config, 0);
  const auto spec = identity_cost(config);
  for (auto _ : state) benchmark::DoNotOptimize(build_value_sets(inst.system, spec, {.dedupe_tol = 0.0}));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(std::size_t{1} << N));
}
BENCHMARK(BM_BuildValueSets)->DenseRange(6, 15, 3)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_AdmmSolve(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto config = config_for(2, 2, N);
  const auto inst = generate_random_system(config, 0);
  const auto prog = build_condensed_program(inst.system, identity_cost(config), inst.x0, unit_weights(N, 2), 1.0, 1.0);
  const AdmmSolver solver(prog.qp, {});
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve());
}
BENCHMARK(BM_AdmmSolve)->Arg(10)->Arg(15)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_RelaxedPipeline(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto config = config_for(2, 2, N);
  const auto inst = generate_random_system(config, 0);
  const auto spec = identity_cost(config);
  for (auto _ : state) benchmark::DoNotOptimize(solve_relaxed(inst.system, spec, inst.x0));
}
BENCHMARK(BM_RelaxedPipeline)->Arg(15)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ExactOnline(benchmark::State& state) {
  const auto config = config_for(2, 2, 15);
  const auto inst = generate_random_system(config, 0);
  const auto spec = identity_cost(config);
  const auto sets = build_value_sets(inst.system, spec);
  for (auto _ : state) benchmark::DoNotOptimize(exact_online_control(inst.system, spec, sets, inst.x0));
}
BENCHMARK(BM_ExactOnline)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
