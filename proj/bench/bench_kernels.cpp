// Copyright 2026 The measdual Authors.
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include "measdual/expr.hpp"
#include "measdual/kernels.hpp"
#include "measdual/sip.hpp"

namespace {

using measdual::kernels::Exec;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

Exec mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::kSerial : Exec::kParallel;
}

void BM_Sum(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(measdual::kernels::sum(v, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PowerSum(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measdual::kernels::power_sum(v, 1.5, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CombineArgmin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> cols;
  for (std::uint64_t k = 0; k < 5; ++k) cols.push_back(random_vector(n, 10 + k));
  const std::vector<std::span<const double>> views(cols.begin(), cols.end());
  const auto coeffs = random_vector(5, 3);
  const auto offset = random_vector(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        measdual::kernels::combine_argmin(views, coeffs, offset, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_vector(n * n, 5);
  const auto v = random_vector(n, 6);
  std::vector<double> y(n);
  for (auto _ : state) {
    measdual::kernels::matvec(m, v, y, mode(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_Tabulate(benchmark::State& state) {
  const auto e = *measdual::parse_expression("max(x1 - 1, 0) + exp(-x1^2) * sqrt(abs(x1))", 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xs = random_vector(n, 7);
  std::vector<double> out(n);
  auto f = [&](std::size_t i) { return e.evaluate(std::span<const double>(&xs[i], 1)); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(measdual::kernels::tabulate(f, out, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GridPrimalAssembly(benchmark::State& state) {
  auto part = measdual::Partition{{*measdual::Box::make({-2.0}, {2.0})}};
  std::vector<measdual::MomentConstraint> eq;
  eq.push_back({measdual::PiecewiseFunction({*measdual::parse_expression("1", 1)}), 1.0});
  eq.push_back({measdual::PiecewiseFunction({*measdual::parse_expression("x1^2", 1)}), 1.0});
  const auto mp = *measdual::MomentProblem::make(
      part, *measdual::Box::make({-2.0}, {2.0}),
      measdual::PiecewiseFunction({*measdual::parse_expression("x1", 1)}), {}, std::move(eq));
  for (auto _ : state) {
    benchmark::DoNotOptimize(measdual::assemble_grid_primal(
        mp, static_cast<std::size_t>(state.range(0)), mode(state)));
  }
}

// Second argument: 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_Sum)->ArgsProduct({{1 << 12, 1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_PowerSum)->ArgsProduct({{1 << 12, 1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_CombineArgmin)->ArgsProduct({{1 << 12, 1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_Matvec)->ArgsProduct({{64, 512, 2048}, {0, 1}});
BENCHMARK(BM_Tabulate)->ArgsProduct({{1 << 12, 1 << 16}, {0, 1}});
BENCHMARK(BM_GridPrimalAssembly)->ArgsProduct({{1025, 16385}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
