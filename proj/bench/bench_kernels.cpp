// Copyright 2026 The lot Authors
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

#include "lot/kantorovich.hpp"
#include "lot/monge.hpp"
#include "lot/suites.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <algorithm>
#include <map>
#include <random>

using namespace lot;

namespace {

struct Instance {
  CostModel cost;
  DiscreteMeasure mu, nu;
};

Instance make_instance(const ManifoldModel& m, CostEvaluation eval, int n) {
  std::mt19937_64 rng(7);
  const LagrangianModel lag = LagrangianModel::power_metric(m, 2.0);
  std::vector<double> w(n, 1.0 / n);
  DiscreteMeasure mu = make_measure(m, random_cloud(m, rng, n, 0.5), w, "mu");
  DiscreteMeasure nu = make_measure(m, random_cloud(m, rng, n, 0.5), w, "nu");
  return {CostModel(lag, 1.0, eval), std::move(mu), std::move(nu)};
}

const Instance& hyperbolic(int n) {
  static std::map<int, Instance> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, make_instance(ManifoldModel::hyperbolic(), CostEvaluation::minimizer, n)).first;
  return it->second;
}

void BM_CostMatrixSerial(benchmark::State& state) {
  const Instance& in = hyperbolic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cost_matrix_serial(in.cost, in.mu, in.nu));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CostMatrixParallel(benchmark::State& state) {
  const Instance& in = hyperbolic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cost_matrix(in.cost, in.mu, in.nu));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

// Per-atom flows; one thread is the serial reference.
void BM_PotentialMap(benchmark::State& state) {
  const Instance& in = hyperbolic(16);
  const Solution sol = solve_exact(cost_matrix(in.cost, in.mu, in.nu), in.mu, in.nu);
  const int threads = static_cast<int>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(map_from_potentials(in.cost, sol.potentials.psi, in.mu, in.nu));
  omp_set_num_threads(saved);
  state.counters["threads"] = threads;
}

}  // namespace

BENCHMARK(BM_CostMatrixSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostMatrixParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PotentialMap)->Arg(1)->Arg(std::max(2, omp_get_num_procs()))->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
