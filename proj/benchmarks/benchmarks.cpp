// Copyright 2026 The ebt authors
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

#include "ebt/datapipe.hpp"
#include "ebt/evaluator.hpp"
#include "ebt/losses.hpp"
#include "ebt/regions.hpp"
#include "ebt/rng.hpp"
#include "ebt/toymodel.hpp"

namespace {

ebt::BinaryMap random_map(int side, double density, std::uint64_t seed) {
  ebt::Rng rng(seed);
  ebt::BinaryMap map(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) map.set(r, c, rng.next_bool(density));
  return map;
}

ebt::PixelGrid random_pred(int side, std::uint64_t seed) {
  ebt::Rng rng(seed);
  ebt::PixelGrid pred(side, side, 0.0);
  for (std::int64_t i = 0; i < pred.size(); ++i) pred[i] = rng.next_unit();
  return pred;
}

void BM_Classify(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::BinaryMap gt = random_map(side, 0.05, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::classify(gt, 7));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Classify)->Arg(64)->Arg(256)->Arg(1024);

void BM_ClassifyOracle(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::BinaryMap gt = random_map(side, 0.05, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::classify_oracle(gt, 7));
}
BENCHMARK(BM_ClassifyOracle)->Arg(16)->Arg(32)->Arg(64);

void BM_EbtLoss(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::BinaryMap gt = random_map(side, 0.05, 11);
  const ebt::PixelGrid pred = random_pred(side, 13);
  const ebt::TriClassMask mask = ebt::classify(gt, 7);
  const ebt::LossParams params;
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::ebt_loss(pred, gt, mask, params));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_EbtLoss)->Arg(64)->Arg(256)->Arg(1024);

void BM_EbtLossGrad(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::BinaryMap gt = random_map(side, 0.05, 11);
  const ebt::PixelGrid pred = random_pred(side, 13);
  const ebt::TriClassMask mask = ebt::classify(gt, 7);
  const ebt::LossParams params;
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::ebt_loss_grad(pred, gt, mask, params));
}
BENCHMARK(BM_EbtLossGrad)->Arg(64)->Arg(256);

void BM_MatchMaps(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::BinaryMap pred = random_map(side, 0.10, 17);
  const ebt::BinaryMap gt = random_map(side, 0.10, 19);
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::match_maps(pred, gt, 1.0));
}
BENCHMARK(BM_MatchMaps)->Arg(64)->Arg(256);

void BM_EvaluateDataset(benchmark::State& state) {
  std::vector<ebt::PixelGrid> preds;
  std::vector<ebt::BinaryMap> gts;
  for (int i = 0; i < 4; ++i) {
    preds.push_back(random_pred(64, 100 + i));
    gts.push_back(random_map(64, 0.08, 200 + i));
  }
  const ebt::EvalConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::evaluate_dataset(preds, gts, cfg));
}
BENCHMARK(BM_EvaluateDataset);

void BM_Featurize(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ebt::PixelGrid image = random_pred(side, 23);
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::featurize(image));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Featurize)->Arg(64)->Arg(256);

void BM_TrainEpoch(benchmark::State& state) {
  ebt::SynthSpec spec;
  spec.height = spec.width = 64;
  const ebt::SampleSet dataset = ebt::make_synth_set(spec, 8);
  ebt::TrainConfig config;
  config.epochs = 1;
  config.optim.learning_rate = 0.05;
  for (auto _ : state)
    benchmark::DoNotOptimize(ebt::train(dataset, config));
}
BENCHMARK(BM_TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
