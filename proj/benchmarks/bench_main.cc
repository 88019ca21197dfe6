// benchmarks/bench_main.cc
//
// Copyright 2026  audkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "aud/eval_samediff.hpp"
#include "aud/inference.hpp"
#include "aud/model.hpp"

namespace {

using namespace aud;

PhoneLoopModel BenchModel(int truncation, int states, int gaussians, int dim) {
  ModelConfig cfg = ModelConfig::Defaults(
      truncation, states, gaussians, Eigen::VectorXd::Zero(dim),
      Eigen::VectorXd::Ones(dim));
  return InitModel(cfg, 1);
}

Eigen::MatrixXd RandomFrames(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, dim);
  for (int t = 0; t < n; ++t)
    for (int d = 0; d < dim; ++d) x(t, d) = normal(rng);
  return x;
}

void BM_FrameLoglik(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  PhoneLoopModel model = BenchModel(50, 3, 2, 13);
  const Eigen::MatrixXd x = RandomFrames(n, 13, 7);
  for (auto _ : state) {
    Eigen::MatrixXd ll = ExpectedFrameLoglik(model, x);
    benchmark::DoNotOptimize(ll.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FrameLoglik)->Arg(100)->Arg(500)->Arg(2000);

void BM_ForwardBackward(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const int truncation = static_cast<int>(state.range(1));
  PhoneLoopModel model = BenchModel(truncation, 3, 2, 13);
  const Eigen::MatrixXd x = RandomFrames(n, 13, 11);
  const UnifiedHmmView view = MakeUnifiedView(model);
  const Eigen::MatrixXd ll = ExpectedFrameLoglik(model, x);
  for (auto _ : state) {
    FbResult fb = ForwardBackward(view, ll, model.config.gaussians_per_state);
    benchmark::DoNotOptimize(fb.log_evidence);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ForwardBackward)
    ->Args({100, 20})
    ->Args({500, 20})
    ->Args({500, 50})
    ->Args({2000, 50});

void BM_Dtw(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto rows = [&](int len) {
    Eigen::MatrixXd m(len, 50);
    for (int r = 0; r < len; ++r) {
      double total = 0.0;
      for (int c = 0; c < 50; ++c) {
        m(r, c) = u(rng);
        total += m(r, c);
      }
      m.row(r) /= total;
    }
    return m;
  };
  const Eigen::MatrixXd a = rows(n), b = rows(n + n / 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(DtwDistance(a, b, 1e-8));
  }
}
BENCHMARK(BM_Dtw)->Arg(20)->Arg(60)->Arg(120);

}  // namespace

BENCHMARK_MAIN();
