// Copyright 2026 The prefinfer Authors. All rights reserved.
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

// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to vary the pool.
#include <benchmark/benchmark.h>

#include "prefinfer/agent.hpp"
#include "prefinfer/dwpi.hpp"
#include "prefinfer/experiments.hpp"

using namespace prefinfer;

namespace {

const DataWindow& day() {
  static const DataWindow w = synthesize(1, 1);
  return w;
}

QAgent untrained_agent() {
  return {Mlp({kExtendedStateSize, 32, 32, 16, kNumActions}, OutputActivation::kIdentity, 3), WindowStats::of(day())};
}

std::vector<DemoRecord> demo_records() {
  std::vector<DemoRecord> out;
  for (const auto& w : weight_grid(0.01)) out.push_back({{-7.0 - 2.0 * w.comfort, 3.0 * w.comfort}, w});
  return out;
}

DwpiHyper loo_hyper() {
  DwpiHyper h;
  h.epochs = 100;
  return h;
}

void BM_BuildDatasetSerial(benchmark::State& state) {
  const QAgent agent = untrained_agent();
  const auto grid = weight_grid(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(build_dataset_serial(agent, day(), EnvConfig{}, grid));
}

void BM_BuildDatasetParallel(benchmark::State& state) {
  const QAgent agent = untrained_agent();
  const auto grid = weight_grid(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(build_dataset(agent, day(), EnvConfig{}, grid));
}

void BM_LeaveOneOutSerial(benchmark::State& state) {
  const auto records = demo_records();
  for (auto _ : state) benchmark::DoNotOptimize(leave_one_out_mse_serial(records, loo_hyper(), 1));
}

void BM_LeaveOneOutParallel(benchmark::State& state) {
  const auto records = demo_records();
  for (auto _ : state) benchmark::DoNotOptimize(leave_one_out_mse(records, loo_hyper(), 1));
}

const std::vector<ScenarioWeights> kWeights = {
    {"always_max_comfort", {0.25, 0.75}}, {"always_save_cost", {0.8, 0.2}}, {"mixture", {0.55, 0.45}}};

AgentHyper comparison_hyper() {
  AgentHyper h;
  h.episodes = 300;
  return h;
}

void BM_ComparisonSerial(benchmark::State& state) {
  const DataWindow week = synthesize(2, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_comparison_serial(kWeights, day(), week, EnvConfig{}, comparison_hyper(), 1));
  }
}

void BM_ComparisonParallel(benchmark::State& state) {
  const DataWindow week = synthesize(2, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_comparison(kWeights, day(), week, EnvConfig{}, comparison_hyper(), 1));
  }
}

}  // namespace

BENCHMARK(BM_BuildDatasetSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildDatasetParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComparisonSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComparisonParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
