// Copyright 2026 The epimi Authors
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

#include <string>
#include <vector>

#include "epimi/attention.hpp"
#include "epimi/categorical.hpp"
#include "epimi/gibbs.hpp"
#include "epimi/mi_estimators.hpp"
#include "epimi/missing_mass.hpp"
#include "epimi/rng.hpp"
#include "epimi/text_similarity.hpp"

namespace {

using namespace epimi;

void BM_ExactMi(benchmark::State& state) {
  const Categorical dist = make_gibbs(state.range(0), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mutual_information_exact(dist));
  }
}
BENCHMARK(BM_ExactMi)->Arg(4)->Arg(6)->Arg(8);

void BM_EstimatorAlg1(benchmark::State& state) {
  const Categorical dist = make_gibbs(8, 0.5);
  const auto sample = sample_tuples(dist, state.range(0), 7);
  const double gamma = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_mi_plugin(
        sample, [&](const Tuple& t) { return dist.prob(t); }, {gamma, gamma}));
  }
}
BENCHMARK(BM_EstimatorAlg1)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SampleTuples(benchmark::State& state) {
  const Categorical dist = make_gibbs(8, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_indices(dist, state.range(0), 11));
  }
}
BENCHMARK(BM_SampleTuples)->Arg(1000)->Arg(100000);

void BM_ExpectedMissingMass(benchmark::State& state) {
  const Categorical dist = make_zipf(state.range(0), 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_missing_mass_exact(dist, 1000));
  }
}
BENCHMARK(BM_ExpectedMissingMass)->Arg(10000)->Arg(100000);

void BM_TokenF1(benchmark::State& state) {
  const TokenSeq a = tokenize("the quick brown fox jumps over the lazy dog");
  const TokenSeq b = tokenize("a quick brown dog outpaces the lazy fox");
  for (auto _ : state) {
    benchmark::DoNotOptimize(f1_score(a, b));
  }
}
BENCHMARK(BM_TokenF1);

void BM_AttentionForward(benchmark::State& state) {
  Rng rng(3);
  const std::size_t dp = 8, d = 8;
  AttentionHead head;
  auto fill = [&](Matrix& m) {
    m = Matrix(dp, d);
    for (double& v : m.data) v = rng.normal();
  };
  fill(head.wq);
  fill(head.wk);
  fill(head.wv);
  head.end_vector.resize(dp);
  for (double& v : head.end_vector) v = rng.normal();
  Matrix z(state.range(0), dp);
  for (double& v : z.data) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(attention_forward(head, z));
  }
}
BENCHMARK(BM_AttentionForward)->Arg(16)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
