// Copyright 2026 The seqreg Authors.
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

#include <cmath>

#include "seqreg/complexity.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/rng.hpp"

namespace {

using namespace seqreg;

ComparatorFamily random_table(std::uint64_t seed, std::size_t k, std::size_t m) {
  PortableRng rng(seed);
  Eigen::MatrixXd v(k, m);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) v(i, j) = rng.uniform(-1, 1);
  }
  return ComparatorFamily::finite_table(v);
}

void BM_MinimaxSolve(benchmark::State& state) {
  GameSpec g;
  g.family = random_table(1, 3, 2);
  g.model = LossModel::square(1.0);
  g.horizon = static_cast<int>(state.range(0));
  g.covariates = {0, 1};
  g.outcome_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  g.prediction_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(minimax_value(g));
}
BENCHMARK(BM_MinimaxSolve)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_ExpertsRun(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const ComparatorFamily F = random_table(2, k, 8);
  PortableRng rng(3);
  History seq;
  for (int t = 0; t < 1000; ++t) seq.push_back({CovariateId{rng.below(8)}, rng.uniform(-1, 1)});
  const LossModel sq = LossModel::square(1.0);
  for (auto _ : state) {
    auto fc = make_experts_forecaster(F, 1.0);
    benchmark::DoNotOptimize(run_online(*fc, seq, sq, F).final_regret);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ExpertsRun)->Arg(10)->Arg(100)->Arg(1000);

void BM_VawRun(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ComparatorFamily F = ComparatorFamily::linear(d);
  PortableRng rng(4);
  History seq;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = rng.uniform(-1, 1) / std::sqrt(d);
    seq.push_back({x, rng.uniform(-1, 1)});
  }
  const LossModel sq = LossModel::square(1.0);
  for (auto _ : state) {
    auto fc = make_vaw_forecaster(d, 1.0, 1.0);
    benchmark::DoNotOptimize(run_online(*fc, seq, sq, F, 0.5).final_regret);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_VawRun)->Arg(1)->Arg(5)->Arg(20);

void BM_OffsetSup(benchmark::State& state) {
  const ComparatorFamily F = random_table(5, 3, 3);
  const std::vector<CovariateId> xs = {0, 1, 2};
  const std::vector<double> mu = {-0.5, 0.0, 0.5};
  const ScalarFn sq = [](double x) { return x * x; };
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(offset_rademacher_sup(F, xs, mu, n, 1.0, sq));
}
BENCHMARK(BM_OffsetSup)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_OffsetRademacher(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComparatorFamily F = random_table(6, 8, 4);
  PortableRng rng(7);
  const CovariateTree x = CovariateTree::generate(n, [&](int, std::uint64_t) { return rng.below(4); });
  const RealTree mu = RealTree::constant(n, 0.0);
  const ScalarFn sq = [](double v) { return v * v; };
  for (auto _ : state) benchmark::DoNotOptimize(offset_rademacher(F, x, mu, 1.0, sq));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_OffsetRademacher)->Arg(8)->Arg(12)->Arg(16);

void BM_SequentialCover(benchmark::State& state) {
  const ComparatorFamily F = random_table(8, static_cast<std::size_t>(state.range(0)), 3);
  PortableRng rng(9);
  const CovariateTree x = CovariateTree::generate(2, [&](int, std::uint64_t) { return rng.below(3); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(seq_cover_number(F, x, 0.5, CoverNorm::kLinf).size);
  }
}
BENCHMARK(BM_SequentialCover)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
