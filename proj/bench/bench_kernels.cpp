/*
 * Copyright 2026 The MulCom Authors.
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

#include <benchmark/benchmark.h>

#include <vector>

#include "mulcom/kernels.hpp"
#include "mulcom/model.hpp"
#include "mulcom/rng.hpp"
#include "mulcom/synth.hpp"
#include "mulcom/train.hpp"

namespace {

using namespace mulcom;

std::vector<double> filled(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <auto Kernel>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n * n, 1), b = filled(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(n, n, n, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}

BENCHMARK(BM_Gemm<kernels::serial::gemm_nn>)->Name("gemm_nn/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Gemm<kernels::parallel::gemm_nn>)->Name("gemm_nn/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Gemm<kernels::serial::gemm_nt>)->Name("gemm_nt/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Gemm<kernels::parallel::gemm_nt>)->Name("gemm_nt/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Gemm<kernels::serial::gemm_tn>)->Name("gemm_tn/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Gemm<kernels::parallel::gemm_tn>)->Name("gemm_tn/parallel")->RangeMultiplier(2)->Range(32, 256);

// Trope queries attending over a long token sequence, like the word stream.
kernels::AttentionShape word_shape(std::size_t keys) {
  kernels::AttentionShape s;
  s.groups = 1;
  s.heads = 4;
  s.queries = 95;
  s.keys = keys;
  s.key_dim = 16;
  s.value_dim = 16;
  return s;
}

template <auto Forward>
void BM_AttentionForward(benchmark::State& state) {
  const auto s = word_shape(static_cast<std::size_t>(state.range(0)));
  const auto q = filled(s.queries * s.heads * s.key_dim, 3);
  const auto k = filled(s.keys * s.heads * s.key_dim, 4);
  const auto v = filled(s.keys * s.heads * s.value_dim, 5);
  std::vector<double> w(s.weight_count()), out(s.queries * s.heads * s.value_dim);
  for (auto _ : state) {
    Forward(s, q, k, v, w, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Forward, auto Backward>
void BM_AttentionBackward(benchmark::State& state) {
  const auto s = word_shape(static_cast<std::size_t>(state.range(0)));
  const auto q = filled(s.queries * s.heads * s.key_dim, 3);
  const auto k = filled(s.keys * s.heads * s.key_dim, 4);
  const auto v = filled(s.keys * s.heads * s.value_dim, 5);
  const auto dout = filled(s.queries * s.heads * s.value_dim, 6);
  std::vector<double> w(s.weight_count()), out(dout.size());
  Forward(s, q, k, v, w, out);
  std::vector<double> dq(q.size()), dk(k.size()), dv(v.size());
  for (auto _ : state) {
    Backward(s, q, k, v, w, dout, dq, dk, dv);
    benchmark::DoNotOptimize(dq.data());
  }
}

BENCHMARK(BM_AttentionForward<kernels::serial::attention_forward>)
    ->Name("attention_forward/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_AttentionForward<kernels::parallel::attention_forward>)
    ->Name("attention_forward/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_AttentionBackward<kernels::serial::attention_forward, kernels::serial::attention_backward>)
    ->Name("attention_backward/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_AttentionBackward<kernels::serial::attention_forward, kernels::parallel::attention_backward>)
    ->Name("attention_backward/parallel")->Arg(256)->Arg(1024);

// Whole-model scoring of a small planted corpus; the argument is the thread count.
void BM_PredictScores(benchmark::State& state) {
  static const SynthSpec spec = SynthSpec::standard(128, 8);
  static const Dataset ds = synth_generate(3, spec);
  ModelConfig m;
  m.trope_count = spec.tropes;
  m.word_dim = spec.word_dim;
  m.sentence_dim = spec.sentence_dim;
  const MulComModel model(m, 3);
  kernels::set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(predict_scores(model, ds.split("train")));
  kernels::set_threads(1);
}

BENCHMARK(BM_PredictScores)->Name("predict_scores/threads")->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
