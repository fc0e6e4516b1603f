// Copyright 2026 The vcrop Authors.
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

#include <random>

#include "synthetic.hpp"
#include "vcrop/gradcrop.hpp"
#include "vcrop/metrics.hpp"
#include "vcrop/simcrop.hpp"

namespace {

using namespace vcrop;

void BM_GaussianBlur(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto c = testing::make_blob_case(1, {.size = n});
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(c.image, 5, 1.1));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GaussianBlur)->Arg(224)->Arg(640);

void BM_GradCrop(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto c = testing::make_blob_case(2, {.size = n});
  for (auto _ : state) benchmark::DoNotOptimize(grad::grad_crop(c.image, c.bundle));
}
BENCHMARK(BM_GradCrop)->Arg(224)->Arg(640)->Unit(benchmark::kMillisecond);

void BM_LargestComponent(benchmark::State& state) {
  std::mt19937_64 rng(3);
  grad::BinaryPatchGrid g(40, 40);
  std::bernoulli_distribution coin(0.55);
  for (auto& v : g.values()) v = coin(rng);
  for (auto _ : state) benchmark::DoNotOptimize(grad::largest_component(g, grad::Connectivity::kEight));
}
BENCHMARK(BM_LargestComponent);

// Geometry only: the scorer is an in-process IoU.
void BM_ClipW(benchmark::State& state) {
  const BBox target{40, 50, 170, 180};
  sim::FunctionScorer s([&](const sim::ImageRef&, const BBox& r, const std::string&) {
    return sim::overlap_score(r, target);
  });
  const sim::ImageRef img{"x.png", 224, 224};
  for (auto _ : state) benchmark::DoNotOptimize(sim::clip_w_crop(img, "q", s));
}
BENCHMARK(BM_ClipW);

void BM_ClipR(benchmark::State& state) {
  const BBox target{40, 50, 120, 100};
  sim::FunctionScorer s([&](const sim::ImageRef&, const BBox& r, const std::string&) {
    return sim::overlap_score(r, target);
  });
  const sim::ImageRef img{"x.png", 224, 224};
  for (auto _ : state) benchmark::DoNotOptimize(sim::clip_r_crop(img, "q", s));
}
BENCHMARK(BM_ClipR);

void BM_LcsSimilarity(benchmark::State& state) {
  const std::string a = "the quick brown fox jumps over", b = "a quick brown dog jumped over it";
  for (auto _ : state) benchmark::DoNotOptimize(metrics::lcs_similarity(a, b));
}
BENCHMARK(BM_LcsSimilarity);

}  // namespace

BENCHMARK_MAIN();
