// Copyright 2026 The Antidote Authors.
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


// Microbenchmarks of the inner loops: an ALS sweep, the antidote gradient,
// the objective gradients and the factorization-free heuristic.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "antidote/antidote.h"
#include "antidote/factorization.h"
#include "antidote/objectives.h"
#include "antidote/ratings.h"

namespace antidote {
namespace {

RatingDataset SparseRatings(int users, int items, double density, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution observed(density);
  std::uniform_int_distribution<int> stars(1, 5);
  std::vector<Rating> entries;
  for (int i = 0; i < users; ++i) {
    for (int j = 0; j < items; ++j) {
      if (observed(rng) || j == i % items || i == j % users) {
        entries.push_back({i, j, static_cast<double>(stars(rng))});
      }
    }
  }
  return RatingDataset::FromEntries(users, items, std::move(entries));
}

// Arguments: users (= items), rank.
void BM_AlsSweep(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  RatingDataset train = SparseRatings(size, size, 0.1, 1);
  AntidoteMatrix antidote = RandomAntidote(size / 100 + 1, size, train.bounds(), 2);
  AlsOptions opts;
  opts.max_sweeps = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(AlsFactorizeJoint(train, antidote, rank, 1.0, opts));
  }
  state.SetItemsProcessed(state.iterations() * train.num_entries());
}
BENCHMARK(BM_AlsSweep)->Args({200, 4})->Args({1000, 4})->Args({1000, 8})
    ->Unit(benchmark::kMillisecond);

void BM_AntidoteGradient(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  RatingDataset train = SparseRatings(size, size, 0.1, 1);
  AntidoteMatrix antidote = RandomAntidote(size / 100 + 1, size, train.bounds(), 2);
  AlsOptions opts;
  opts.max_sweeps = 3;
  FactorModel model = AlsFactorizeJoint(train, antidote, 8, 1.0, opts);
  Eigen::MatrixXd g = ObjectiveGradient(ObjectiveSpec{}, train, Predict(model));
  for (auto _ : state) {
    benchmark::DoNotOptimize(AntidoteGradient(model, train, g));
  }
}
BENCHMARK(BM_AntidoteGradient)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ObjectiveGradient(benchmark::State& state) {
  const int size = 1000;
  RatingDataset train = SparseRatings(size, size, 0.1, 1);
  std::vector<int> labels(size);
  for (int j = 0; j < size; ++j) labels[j] = j % 18;
  std::vector<std::string> names;
  for (int g = 0; g < 18; ++g) names.push_back("g" + std::to_string(g));
  ObjectiveSpec spec;
  spec.kind = static_cast<ObjectiveKind>(state.range(0));
  if (spec.kind == ObjectiveKind::kGroupFairness) {
    spec.groups = GroupAssignment(GroupAxis::kItems, labels, names);
  }
  Eigen::MatrixXd predictions = Eigen::MatrixXd::Constant(size, size, 3.0) +
                                Eigen::MatrixXd::Random(size, size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ObjectiveGradient(spec, train, predictions));
  }
  state.SetLabel(ObjectiveKindName(spec.kind));
}
BENCHMARK(BM_ObjectiveGradient)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Heuristic2(benchmark::State& state) {
  const int size = 1000;
  RatingDataset train = SparseRatings(size, size, 0.1, 1);
  AlsOptions opts;
  opts.max_sweeps = 3;
  FactorModel model = AlsFactorize(train, 8, 1.0, opts);
  Eigen::MatrixXd g = ObjectiveGradient(ObjectiveSpec{}, train, Predict(model));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Heuristic2(model, g, Budget::Fraction(0.02), train.bounds()));
  }
}
BENCHMARK(BM_Heuristic2)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace antidote

BENCHMARK_MAIN();
