// Copyright 2026 The jetcalc Authors. All Rights Reserved.
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

#include <benchmark/benchmark.h>

#include "jetcalc/derivative.hpp"
#include "jetcalc/functional.hpp"
#include "jetcalc/identities.hpp"
#include "jetcalc/locality.hpp"
#include "jetcalc/peetre.hpp"

namespace jetcalc {
namespace {

JetExpr u(int j) { return JetExpr::variable(j); }

void BM_SpectralDerivative(benchmark::State& state) {
  const GridSpec grid(static_cast<std::size_t>(state.range(0)));
  const Field f = random_field(grid, 1, 8, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_derivative(f, 2));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(4)->Range(256, 16384);

void BM_EvaluateZooMember(benchmark::State& state, const char* name) {
  const GridSpec grid(256);
  const Functional F = zoo_member(grid, name);
  const Field phi = 0.5 * random_field(grid, 2, 8, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(F(phi));
}
BENCHMARK_CAPTURE(BM_EvaluateZooMember, L41, "L41");
BENCHMARK_CAPTURE(BM_EvaluateZooMember, G, "G");
BENCHMARK_CAPTURE(BM_EvaluateZooMember, U, "U");
BENCHMARK_CAPTURE(BM_EvaluateZooMember, Fnl, "Fnl");

void BM_Gateaux(benchmark::State& state) {
  const GridSpec grid(256);
  const Functional F = zoo_member(grid, "K");
  const Field phi = 0.5 * random_field(grid, 3, 8, 0.7);
  const std::vector<Field> dirs(static_cast<std::size_t>(state.range(0)), random_field(grid, 4, 8, 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(gateaux(F, phi, dirs));
}
BENCHMARK(BM_Gateaux)->DenseRange(1, 3);

void BM_Gradient(benchmark::State& state) {
  const GridSpec grid(static_cast<std::size_t>(state.range(0)));
  const Functional F = zoo_member(grid, "L41");
  const Field phi = 0.5 * random_field(grid, 5, 8, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(F, phi));
}
BENCHMARK(BM_Gradient)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EulerLagrange(benchmark::State& state) {
  const JetExpr f = pow(u(0), 4) + pow(u(1), 2) * sin(u(0)) + u(2) * u(1);
  for (auto _ : state) benchmark::DoNotOptimize(euler_lagrange(f));
}
BENCHMARK(BM_EulerLagrange);

void BM_LocalityVerdict(benchmark::State& state, const char* name) {
  const GridSpec grid(256);
  const Functional F = zoo_member(grid, name);
  const auto samples = default_locality_samples(grid, 6);
  LocalityConfig cfg;
  cfg.trials = 5;
  for (auto _ : state) benchmark::DoNotOptimize(locality_verdict(F, samples, 6, cfg));
}
BENCHMARK_CAPTURE(BM_LocalityVerdict, F4, "F4")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LocalityVerdict, J, "J")->Unit(benchmark::kMillisecond);

void BM_Mollifier(benchmark::State& state) {
  const GridSpec grid(8192);
  const PointSet X({grid.node(0), grid.node(4000)}, grid);
  const double lambda = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mollifier_derivatives(X, lambda, 2));
}
BENCHMARK(BM_Mollifier)->RangeMultiplier(4)->Range(4, 64);

void BM_PoincareSecond(benchmark::State& state) {
  const GridSpec grid(512);
  const auto w = standard_weights(grid);
  const JetExpr f = JetExpr::coefficient("h", w.h) * pow(u(0), 4) + JetExpr::coefficient("g", w.g) * pow(u(1), 2);
  const auto psis = random_samples(grid, 7, 2, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(check_poincare_second(f, psis[0], psis[1], 16));
}
BENCHMARK(BM_PoincareSecond)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace jetcalc

BENCHMARK_MAIN();
