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

#include <map>
#include <string>
#include <vector>

#include "epimi/prompting.hpp"

namespace epimi {

/// How the oracle reacts to answers already present in the prompt.
enum class ContextPolicy {
  /// Same distribution for every F_t; the ground-truth independence case.
  kIndependent,
  /// Mixture (1-s) * base + s * empirical distribution of in-context answers.
  kCopier,
  /// Like kCopier, but each in-context answer credits the first base response
  /// it matches semantically (token F1 >= 0.25), or itself when none match.
  kSticky,
};

/// Per-query behavior of the synthetic oracle. Base probabilities may sum to
/// less than 1; the deficit models an unlisted tail that is reported in
/// probability queries but never sampled. Explicit conditional tables, keyed
/// by the last in-context answer, override the context policy when present.
struct QuerySpec {
  std::vector<ResponseSample> base;
  ContextPolicy policy = ContextPolicy::kIndependent;
  double strength = 0.0;
  std::map<std::string, std::vector<ResponseSample>> conditional;
};

/// Deterministic test double for a language model: a table of per-query
/// response distributions plus a context policy. All probabilities for a
/// fixed (prompt, response, seed) are bit-reproducible, and the object is
/// immutable after setup, so concurrent calls are safe.
class SyntheticOracle : public ConditionalModel {
 public:
  SyntheticOracle() = default;

  void add_query(const std::string& query, QuerySpec spec);

  /// Verification-prompt behavior: probability of "True" for a (query,
  /// candidate) pair. Unconfigured pairs default to 0.5.
  void set_verifier(const std::string& query, const std::string& candidate,
                    double p_true);

  std::vector<ResponseSample> sample(const std::string& prompt, std::size_t k,
                                     std::uint64_t seed,
                                     double temperature = 1.0) const override;
  double probability(const std::string& prompt,
                     const std::string& response) const override;
  ResponseSample greedy(const std::string& prompt) const override;

  /// The full response distribution the oracle would use for this prompt.
  std::vector<ResponseSample> response_distribution(
      const std::string& prompt) const;

 private:
  std::vector<ResponseSample> distribution_for(const ParsedPrompt& p) const;

  std::map<std::string, QuerySpec> queries_;
  std::map<std::string, std::map<std::string, double>> verifier_;
};

}  // namespace epimi
