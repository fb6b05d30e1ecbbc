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

#include "epimi/synth_benchmark.hpp"

#include <cmath>
#include <string>

#include "epimi/error.hpp"
#include "epimi/rng.hpp"

namespace epimi {

namespace {

std::string query_name(const char* kind, std::size_t i) {
  return std::string("name the ") + kind + " item " + std::to_string(i);
}

}  // namespace

SyntheticBenchmark make_mixed_benchmark(const BenchmarkSpec& spec) {
  if (spec.single_queries == 0 && spec.multi_queries == 0) {
    throw Error("make_mixed_benchmark: benchmark must be nonempty");
  }
  if (spec.hallucinated_fraction + spec.confident_wrong_fraction > 1.0) {
    throw Error("make_mixed_benchmark: fractions exceed 1");
  }
  SyntheticBenchmark bench;
  bench.oracle = std::make_shared<SyntheticOracle>();

  const auto hallucinated = static_cast<std::size_t>(
      std::round(spec.hallucinated_fraction * spec.single_queries));
  const auto confident_wrong = static_cast<std::size_t>(
      std::round(spec.confident_wrong_fraction * spec.single_queries));

  for (std::size_t i = 0; i < spec.single_queries; ++i) {
    Rng rng(derive_seed(spec.seed, i));
    const std::string query = query_name("single", i);
    const std::string correct = "ans" + std::to_string(i);

    QueryRecord record{query, {correct}, "single"};
    QuerySpec oracle_spec;

    if (i < hallucinated) {
      // The model has no idea: mass spread over wrong answers, and answers
      // already in the prompt get copied.
      const double a = 0.30 + 0.15 * rng.uniform();
      const double b = 0.25 + 0.10 * rng.uniform();
      const double c = 1.0 - a - b;
      oracle_spec.base = {{"wrong" + std::to_string(i) + "a", a},
                          {"wrong" + std::to_string(i) + "b", b},
                          {"wrong" + std::to_string(i) + "c", c}};
      oracle_spec.policy = ContextPolicy::kCopier;
      oracle_spec.strength = spec.copier_strength;
    } else if (i < hallucinated + confident_wrong) {
      // Point mass on a wrong answer; indistinguishable from a faithful
      // query by any of the scores.
      oracle_spec.base = {{"wrong" + std::to_string(i) + "a", 1.0}};
      oracle_spec.policy = ContextPolicy::kIndependent;
    } else {
      const double p = 0.88 + 0.08 * rng.uniform();
      oracle_spec.base = {{correct, p},
                          {"wrong" + std::to_string(i) + "a", 1.0 - p}};
      oracle_spec.policy = ContextPolicy::kIndependent;
    }
    for (const auto& response : oracle_spec.base) {
      const bool is_correct = matches_any_answer(response.text, record.answers);
      bench.oracle->set_verifier(query, response.text,
                                 is_correct ? 0.60 + 0.25 * rng.uniform()
                                            : 0.25 + 0.25 * rng.uniform());
    }
    bench.oracle->add_query(query, std::move(oracle_spec));
    bench.records.push_back(std::move(record));
  }

  for (std::size_t i = 0; i < spec.multi_queries; ++i) {
    Rng rng(derive_seed(spec.seed, 1'000'000 + i));
    const std::string query = query_name("multi", i);
    const std::size_t m = 2 + (i % 4);

    QueryRecord record{query, {}, "multi"};
    QuerySpec oracle_spec;
    oracle_spec.policy = ContextPolicy::kIndependent;
    for (std::size_t j = 0; j < m; ++j) {
      const std::string answer =
          "opt" + std::to_string(i) + "v" + std::to_string(j);
      record.answers.push_back(answer);
      oracle_spec.base.push_back({answer, 1.0 / static_cast<double>(m)});
      bench.oracle->set_verifier(query, answer, 0.60 + 0.25 * rng.uniform());
    }
    bench.oracle->add_query(query, std::move(oracle_spec));
    bench.records.push_back(std::move(record));
  }
  return bench;
}

}  // namespace epimi
