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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimi {

/// Renders the iterative-prompting templates for one query. The layout is
/// fixed byte-exactly so that every backend receives identical prompts:
///
///   Consider the following question:
///   Q: {query}
///
///   One answer to question Q is {Y1}. Another answer to question Q is {Y2}.
///
///   Provide an answer to the following question:
///
///   Q: {query}. A:
///
/// With no prior answers the middle block is omitted. The first answer
/// sentence reads "One answer", every later one "Another answer"; sentences
/// are joined by single spaces on one line, blocks by single blank lines.
class PromptFamily {
 public:
  explicit PromptFamily(std::string query);

  const std::string& query() const { return query_; }

  /// F_t with t = answers.size() prior answers.
  std::string render(std::span<const std::string> answers) const;

  /// Repetition variant: `answer` inserted t times, every copy rendered as
  /// "Another answer to question Q is {answer}." (t = 0 falls back to F_0).
  std::string render_repeated(const std::string& answer, std::size_t t) const;

  /// Single-line verification prompt:
  /// "Consider the following question: Q: {query}. One answer to question Q
  ///  is {candidate}. Is the above answer to question Q correct? Answer True
  ///  or False. A:"
  static std::string render_verification(const std::string& query,
                                         const std::string& candidate);

 private:
  std::string query_;
};

/// A prompt decomposed back into its parts. Queries and answers must not
/// contain the "." sentence terminators used by the templates.
struct ParsedPrompt {
  enum class Kind { kAnswer, kVerification };
  Kind kind = Kind::kAnswer;
  std::string query;
  std::vector<std::string> answers;  // in-context answers, or the single
                                     // verification candidate
};
std::optional<ParsedPrompt> parse_prompt(std::string_view prompt);

struct ResponseSample {
  std::string text;
  double probability = 0.0;
};

/// A conditional distribution over responses given a prompt. Implementations
/// must be safe for concurrent calls; sampling takes an explicit seed.
class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  /// k response samples with their probabilities, deterministic per seed on
  /// synthetic backends. `temperature` reshapes the sampling distribution;
  /// reported probabilities stay untempered.
  virtual std::vector<ResponseSample> sample(const std::string& prompt,
                                             std::size_t k, std::uint64_t seed,
                                             double temperature = 1.0) const = 0;

  /// Probability of a given response text under the prompt.
  virtual double probability(const std::string& prompt,
                             const std::string& response) const = 0;

  /// Temperature-zero response with its probability.
  virtual ResponseSample greedy(const std::string& prompt) const = 0;
};

/// A sampled response chain (Y_1..Y_n) with per-step conditional
/// probabilities q_t = model(Y_t | F_{t-1}(x, Y_1..Y_{t-1})).
struct ResponseChain {
  std::string query;
  std::vector<std::string> responses;
  std::vector<double> step_probs;

  /// Product of the step probabilities.
  double pseudo_joint() const;

  std::string to_jsonl() const;
  static ResponseChain from_jsonl(std::string_view line);
};

/// Chain-rule sampling: Y_1 ~ Q(.|F_0), Y_2 ~ Q(.|F_1(x,Y_1)), ...
ResponseChain sample_chain(const ConditionalModel& model,
                           const PromptFamily& family, std::size_t n,
                           std::uint64_t seed, double temperature = 1.0);

/// Product of conditional probabilities of the given responses along the
/// prompt chain.
double pseudo_joint_probability(const ConditionalModel& model,
                                const PromptFamily& family,
                                std::span<const std::string> responses);

/// Normalized probability of `target` against `repeated` as the latter is
/// inserted into the prompt t times, for each t in t_values.
struct AmplificationPoint {
  std::size_t t = 0;
  double normalized_target_prob = 0.0;
};
std::vector<AmplificationPoint> amplification_curve(
    const ConditionalModel& model, const std::string& query,
    const std::string& target, const std::string& repeated,
    std::span<const std::size_t> t_values);

}  // namespace epimi
