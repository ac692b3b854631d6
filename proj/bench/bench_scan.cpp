// Copyright 2026 The shuttle Authors
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

// Serial reference (jobs = 1) against the OpenMP path on scan workloads.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <algorithm>
#include <vector>

#include "shuttle/experiment.hpp"
#include "shuttle/units.hpp"

using namespace shuttle;

namespace {

void excitation_scan(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(0));
  TaskConfig c;
  c.backend = "harmonic";
  c.samples = 500;
  c.grid = {128, 0.0};
  c.grid_width_sigma = 16.0;
  const PotentialModel m = build_model(c);
  std::vector<double> ts;
  for (int k = 0; k < 16; ++k) ts.push_back(1.0 + 0.05 * k);
  for (auto _ : state) {
    auto r = parallel_map<double>(ts.size(), jobs, [&](std::size_t i) {
      const auto tf = make_transport_function(c.x_start, c.x_target(), ts[i]);
      return quantum_excitation(m, c, guess_voltages(m, tf, c.omega(), c.samples));
    });
    benchmark::DoNotOptimize(r.data());
  }
  state.counters["points"] = static_cast<double>(ts.size());
}

void xi_study(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(0));
  TaskConfig c;
  c.samples = 500;
  const PotentialModel base = make_surrogate_model();
  const auto seed =
      guess_voltages(base, make_transport_function(0, 280, 0.5), c.omega(), c.samples);
  std::vector<XiTask> tasks;
  for (double xi : {0.1, 0.4}) tasks.push_back(build_xi_task(c, xi, seed));
  const std::vector<double> lambdas{1e4, 1e5, 1e6, 1e7};
  for (auto _ : state) {
    auto r = convergence_study(tasks, lambdas, 3, jobs);
    benchmark::DoNotOptimize(r.data());
  }
}

void thread_args(benchmark::internal::Benchmark* b) {
  // the OpenMP path runs even on one core, where it measures overhead
  b->Arg(1)->Arg(std::max(2, omp_get_max_threads()));
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(excitation_scan)->Apply(thread_args);
BENCHMARK(xi_study)->Apply(thread_args);

BENCHMARK_MAIN();
