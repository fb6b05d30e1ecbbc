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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epimi/mi_estimators.hpp"
#include "epimi/prompting.hpp"

namespace epimi {

/// One evaluation datapoint: a query with its accepted answers.
struct QueryRecord {
  std::string query;
  std::vector<std::string> answers;
  std::string tag;
};

/// The four scoring methods. T0 and self-verification are confidence scores
/// (low means abstain); semantic entropy and mutual information are
/// uncertainty scores (high means abstain).
enum class ScoreKind { kT0, kSemanticEntropy, kSelfVerification, kMutualInformation };
enum class ScoreDirection { kConfidence, kUncertainty };

ScoreDirection direction_of(ScoreKind kind);
const char* score_name(ScoreKind kind);  // "t0", "se", "sv", "mi"
std::optional<ScoreKind> score_kind_from_name(std::string_view name);

/// A query scored by one method: the method's default prediction, its score
/// values, and whether the prediction matches any accepted answer (token F1
/// at the clustering threshold).
struct ScoredQuery {
  std::string query;
  std::string tag;
  std::string prediction;
  std::map<ScoreKind, double> scores;
  bool correct = false;
};

struct ScoreOptions {
  std::size_t k = 10;
  double temperature = 0.9;
  double tau = 0.25;
  StabilizationParams params{0.0, 0.0};  // scoring mode
};

/// Greedy response and its probability (confidence score).
ResponseSample score_t0(const ConditionalModel& model,
                        const std::string& query);

/// Entropy of the clustered, renormalized distribution over k sampled
/// responses, plus the highest-aggregate cluster center as default response.
struct ScoredResponse {
  std::string response;
  double score = 0.0;
};
ScoredResponse score_semantic_entropy(const ConditionalModel& model,
                                      const std::string& query, std::size_t k,
                                      double temperature, double tau,
                                      std::uint64_t seed);

/// Normalized probability of "True" for the verification prompt on the given
/// candidate answer.
double score_self_verification(const ConditionalModel& model,
                               const std::string& query,
                               const std::string& candidate);

/// Mutual-information score: k samples, then the conditional-probability
/// estimator end to end. The default response is the cluster center with the
/// largest marginal of the empirical joint (sum over the second coordinate).
ScoredResponse score_mi(const ConditionalModel& model, const std::string& query,
                        std::size_t k, double temperature, double tau,
                        StabilizationParams params, std::uint64_t seed);

/// All four methods on one query; semantic-entropy and MI share one batch of
/// samples, self-verification reuses the semantic-entropy default candidate.
struct MethodScore {
  double score = 0.0;
  std::string prediction;
};
std::map<ScoreKind, MethodScore> score_query(const ConditionalModel& model,
                                             const std::string& query,
                                             const ScoreOptions& options,
                                             std::uint64_t seed);

/// Threshold policy. Uncertainty scores abstain when score >= threshold,
/// confidence scores when score <= threshold; the boundary abstains.
struct AbstentionPolicy {
  ScoreKind kind = ScoreKind::kMutualInformation;
  double threshold = 0.0;
  ScoreDirection direction = ScoreDirection::kUncertainty;
};

enum class Decision { kAnswer, kAbstain };
Decision apply_policy(const AbstentionPolicy& policy, double score);

/// Loosest threshold (maximal recall) whose error rate among answered
/// calibration queries stays within target_loss; the always-abstain sentinel
/// (+/- infinity by direction) when no answering threshold qualifies. Ties
/// resolve to the most-abstaining threshold of the equal-recall set.
AbstentionPolicy calibrate_threshold(std::span<const ScoredQuery> scored,
                                     ScoreKind kind, double target_loss);

struct EvalMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double error_rate = 0.0;
  std::size_t total = 0;
  std::size_t answered = 0;
  std::size_t correct_answered = 0;
  bool degenerate_precision = false;  // nothing answered; precision pinned 1
};
EvalMetrics evaluate(std::span<const ScoredQuery> scored,
                     const AbstentionPolicy& policy);

struct PrPoint {
  double threshold = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};
/// One point per distinct score value, sorted by recall.
std::vector<PrPoint> pr_curve(std::span<const ScoredQuery> scored,
                              ScoreKind kind);

/// Prediction matches any accepted answer at token F1 >= tau.
bool matches_any_answer(const std::string& prediction,
                        std::span<const std::string> accepted,
                        double tau = 0.25);

/// JSON-lines ingestion: {"query": ..., "answers": [...], "tag": ...} per
/// line. Parse errors carry 1-based line numbers. When filter_long_answers
/// is set, records with any accepted answer of 20+ characters are dropped.
std::vector<QueryRecord> read_jsonl_records(std::istream& in,
                                            bool filter_long_answers = false);

/// CSV: query_id, tag, score_name, score, answered, correct.
std::string scored_to_csv(std::span<const ScoredQuery> scored,
                          const AbstentionPolicy& policy);

/// CSV: threshold, recall, precision.
std::string pr_curve_to_csv(std::span<const PrPoint> curve);

}  // namespace epimi
