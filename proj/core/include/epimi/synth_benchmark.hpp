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

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "epimi/scores.hpp"
#include "epimi/synthetic_oracle.hpp"

namespace epimi {

/// Mixed single/multi-answer benchmark with correctness known by
/// construction. Single-answer queries are mostly faithful (near point mass
/// on the correct answer, context-independent); a fraction hallucinate
/// (mass spread over wrong answers with a copier context policy) and a small
/// fraction are confidently wrong. Multi-answer queries put uniform mass on
/// m in {2..5} correct answers behind a context-independent oracle.
struct BenchmarkSpec {
  std::size_t single_queries = 500;
  std::size_t multi_queries = 500;
  double hallucinated_fraction = 0.28;
  double confident_wrong_fraction = 0.02;
  double copier_strength = 0.7;
  std::uint64_t seed = 1;
};

struct SyntheticBenchmark {
  std::vector<QueryRecord> records;  // tags: "single" | "multi"
  std::shared_ptr<SyntheticOracle> oracle;
};

SyntheticBenchmark make_mixed_benchmark(const BenchmarkSpec& spec);

}  // namespace epimi
