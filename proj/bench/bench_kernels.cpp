/*
 * Copyright 2026 The mtuq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Parallel kernels against their serial references on synthetic frames.
// Run with e.g. OMP_NUM_THREADS=4 ./mtuq_bench

#include <benchmark/benchmark.h>

#include <map>

#include "mtuq/depth_metrics.hpp"
#include "mtuq/fusion.hpp"
#include "mtuq/seg_metrics.hpp"
#include "mtuq/synth.hpp"
#include "mtuq/threshold.hpp"

namespace {

using namespace mtuq;

const SynthSample& sample(std::size_t side) {
  static std::map<std::size_t, SynthSample> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    SynthConfig c;
    c.height = side;
    c.width = side;
    c.classes = 19;
    c.samples = 5;
    it = cache.emplace(side, generate(c)).first;
  }
  return it->second;
}

template <bool kParallel>
void BM_FuseSegmentation(benchmark::State& state) {
  const SynthSample& s = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    SegFusion f = kParallel ? fuse_segmentation(s.seg) : serial::fuse_segmentation(s.seg);
    benchmark::DoNotOptimize(f.uncertainty.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool kParallel>
void BM_FuseDepth(benchmark::State& state) {
  const SynthSample& s = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    DepthFusion f = kParallel ? fuse_depth(s.depth) : serial::fuse_depth(s.depth);
    benchmark::DoNotOptimize(f.total.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool kParallel>
void BM_Confusion(benchmark::State& state) {
  const SynthSample& s = sample(static_cast<std::size_t>(state.range(0)));
  const SegFusion f = fuse_segmentation(s.seg);
  for (auto _ : state) {
    ConfusionMatrix m = kParallel
                            ? accumulate_confusion(f.label, s.truth.labels, 19, 255)
                            : serial::accumulate_confusion(f.label, s.truth.labels, 19, 255);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool kParallel>
void BM_DeltaAndClassify(benchmark::State& state) {
  const SynthSample& s = sample(static_cast<std::size_t>(state.range(0)));
  const DepthFusion f = fuse_depth(s.depth);
  const auto valid = depth_validity(s.truth.depth, 0.0);
  const double tau = compute_threshold(f.total, valid, ThresholdSpec::mean());
  for (auto _ : state) {
    auto acc = kParallel ? delta_accuracy(f.depth, s.truth.depth, valid, 1.25)
                         : serial::delta_accuracy(f.depth, s.truth.depth, valid, 1.25);
    auto cer = kParallel ? classify(f.total, valid, tau) : serial::classify(f.total, valid, tau);
    benchmark::DoNotOptimize(acc.accurate.data());
    benchmark::DoNotOptimize(cer.certain.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

BENCHMARK(BM_FuseSegmentation<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_FuseSegmentation<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_FuseDepth<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_FuseDepth<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Confusion<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_Confusion<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_DeltaAndClassify<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_DeltaAndClassify<false>)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
