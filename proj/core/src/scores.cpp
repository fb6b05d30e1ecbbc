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

#include "epimi/scores.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epimi/categorical.hpp"
#include "epimi/clustering.hpp"
#include "epimi/error.hpp"
#include "epimi/io.hpp"
#include "epimi/rng.hpp"
#include "epimi/text_similarity.hpp"

namespace epimi {

namespace {

constexpr double kErrorSlack = 1e-12;

struct SampledUniques {
  std::vector<std::string> texts;    // unique responses, sample order
  std::vector<double> probs;         // model probability per unique
  ClusteredSample clusters;
};

SampledUniques sample_and_cluster(const ConditionalModel& model,
                                  const std::string& prompt, std::size_t k,
                                  double temperature, double tau,
                                  std::uint64_t seed) {
  const auto drawn = model.sample(prompt, k, seed, temperature);
  std::vector<std::string> texts;
  texts.reserve(drawn.size());
  for (const auto& r : drawn) texts.push_back(r.text);
  const auto uniques = dedupe_texts(texts);

  SampledUniques out;
  for (std::size_t idx : uniques) {
    out.texts.push_back(texts[idx]);
    out.probs.push_back(drawn[idx].probability);
  }
  out.clusters = cluster_greedy(
      out.texts.size(), out.probs,
      [&](std::size_t a, std::size_t b) {
        return f1_text(out.texts[a], out.texts[b]);
      },
      tau);
  return out;
}

}  // namespace

ScoreDirection direction_of(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kT0:
    case ScoreKind::kSelfVerification:
      return ScoreDirection::kConfidence;
    case ScoreKind::kSemanticEntropy:
    case ScoreKind::kMutualInformation:
      return ScoreDirection::kUncertainty;
  }
  throw Error("direction_of: unknown score kind");
}

const char* score_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kT0: return "t0";
    case ScoreKind::kSemanticEntropy: return "se";
    case ScoreKind::kSelfVerification: return "sv";
    case ScoreKind::kMutualInformation: return "mi";
  }
  throw Error("score_name: unknown score kind");
}

std::optional<ScoreKind> score_kind_from_name(std::string_view name) {
  if (name == "t0") return ScoreKind::kT0;
  if (name == "se") return ScoreKind::kSemanticEntropy;
  if (name == "sv") return ScoreKind::kSelfVerification;
  if (name == "mi") return ScoreKind::kMutualInformation;
  return std::nullopt;
}

ResponseSample score_t0(const ConditionalModel& model,
                        const std::string& query) {
  const PromptFamily family(query);
  return model.greedy(family.render({}));
}

ScoredResponse score_semantic_entropy(const ConditionalModel& model,
                                      const std::string& query, std::size_t k,
                                      double temperature, double tau,
                                      std::uint64_t seed) {
  if (k == 0) throw Error("score_semantic_entropy: k must be >= 1");
  const PromptFamily family(query);
  const SampledUniques sampled = sample_and_cluster(
      model, family.render({}), k, temperature, tau, seed);

  double total = 0.0;
  for (double m : sampled.clusters.aggregated) total += m;
  if (total <= 0.0) {
    throw Error("score_semantic_entropy: sampled responses carry zero mass");
  }
  std::vector<double> normalized = sampled.clusters.aggregated;
  for (double& m : normalized) m /= total;

  std::size_t best = 0;
  for (std::size_t c = 1; c < normalized.size(); ++c) {
    if (normalized[c] > normalized[best]) best = c;
  }
  ScoredResponse out;
  out.response = sampled.texts[sampled.clusters.centers[best]];
  out.score = entropy(normalized);
  return out;
}

double score_self_verification(const ConditionalModel& model,
                               const std::string& query,
                               const std::string& candidate) {
  const std::string prompt = PromptFamily::render_verification(query, candidate);
  const double p_true = model.probability(prompt, "True");
  const double p_false = model.probability(prompt, "False");
  if (p_true + p_false <= 0.0) {
    throw Error("score_self_verification: True and False both have zero mass");
  }
  return p_true / (p_true + p_false);
}

ScoredResponse score_mi(const ConditionalModel& model, const std::string& query,
                        std::size_t k, double temperature, double tau,
                        StabilizationParams params, std::uint64_t seed) {
  if (k == 0) throw Error("score_mi: k must be >= 1");
  const PromptFamily family(query);
  const std::string base_prompt = family.render({});
  const auto drawn = model.sample(base_prompt, k, seed, temperature);
  std::vector<std::string> texts;
  texts.reserve(drawn.size());
  for (const auto& r : drawn) texts.push_back(r.text);

  const ConditionalMiResult result = estimate_mi_conditional(
      texts,
      [&](const std::string& text) {
        return model.probability(base_prompt, text);
      },
      [&](const std::string& given, const std::string& of) {
        const std::string prompt = family.render(std::vector<std::string>{given});
        return model.probability(prompt, of);
      },
      params,
      [](const std::string& a, const std::string& b) { return f1_text(a, b); },
      tau);

  // Default: center maximizing the first marginal of the empirical joint,
  // i.e. the row sum over the second coordinate.
  std::size_t best = 0;
  double best_mass = -1.0;
  for (std::size_t i = 0; i < result.centers.size(); ++i) {
    double row = 0.0;
    for (std::size_t t = 0; t < result.centers.size(); ++t) {
      row += result.marginal_hat[i] * result.conditional_hat[i][t];
    }
    if (row > best_mass) {
      best_mass = row;
      best = i;
    }
  }
  ScoredResponse out;
  out.response = result.centers[best];
  out.score = result.estimate.value;
  return out;
}

std::map<ScoreKind, MethodScore> score_query(const ConditionalModel& model,
                                             const std::string& query,
                                             const ScoreOptions& options,
                                             std::uint64_t seed) {
  std::map<ScoreKind, MethodScore> out;

  const ResponseSample greedy = score_t0(model, query);
  out[ScoreKind::kT0] = {greedy.probability, greedy.text};

  const ScoredResponse se =
      score_semantic_entropy(model, query, options.k, options.temperature,
                             options.tau, derive_seed(seed, 1));
  out[ScoreKind::kSemanticEntropy] = {se.score, se.response};

  const double sv = score_self_verification(model, query, se.response);
  out[ScoreKind::kSelfVerification] = {sv, se.response};

  const ScoredResponse mi =
      score_mi(model, query, options.k, options.temperature, options.tau,
               options.params, derive_seed(seed, 1));
  out[ScoreKind::kMutualInformation] = {mi.score, mi.response};
  return out;
}

Decision apply_policy(const AbstentionPolicy& policy, double score) {
  if (!std::isfinite(score)) throw Error("apply_policy: score must be finite");
  if (policy.direction == ScoreDirection::kUncertainty) {
    return score >= policy.threshold ? Decision::kAbstain : Decision::kAnswer;
  }
  return score <= policy.threshold ? Decision::kAbstain : Decision::kAnswer;
}

namespace {

double score_of(const ScoredQuery& q, ScoreKind kind) {
  const auto it = q.scores.find(kind);
  if (it == q.scores.end()) {
    throw Error(std::string("scored query lacks a '") + score_name(kind) +
                "' score");
  }
  return it->second;
}

}  // namespace

AbstentionPolicy calibrate_threshold(std::span<const ScoredQuery> scored,
                                     ScoreKind kind, double target_loss) {
  if (scored.empty()) throw Error("calibrate_threshold: empty calibration set");
  const ScoreDirection direction = direction_of(kind);
  AbstentionPolicy policy{kind, 0.0, direction};

  std::set<double> distinct;
  for (const ScoredQuery& q : scored) distinct.insert(score_of(q, kind));

  // Candidate thresholds: every distinct score plus the never-abstain
  // extreme. The always-abstain sentinel backstops infeasible sets.
  std::vector<double> candidates(distinct.begin(), distinct.end());
  const double inf = std::numeric_limits<double>::infinity();
  candidates.push_back(direction == ScoreDirection::kUncertainty ? inf : -inf);

  const double sentinel =
      direction == ScoreDirection::kUncertainty ? -inf : inf;
  double best_threshold = sentinel;
  double best_recall = -1.0;
  for (double threshold : candidates) {
    policy.threshold = threshold;
    const EvalMetrics metrics = evaluate(scored, policy);
    if (metrics.answered == 0) continue;
    if (metrics.error_rate > target_loss + kErrorSlack) continue;
    const bool better =
        metrics.recall > best_recall ||
        (metrics.recall == best_recall &&
         (direction == ScoreDirection::kUncertainty ? threshold < best_threshold
                                                    : threshold > best_threshold));
    if (better) {
      best_recall = metrics.recall;
      best_threshold = threshold;
    }
  }
  policy.threshold = best_threshold;
  return policy;
}

EvalMetrics evaluate(std::span<const ScoredQuery> scored,
                     const AbstentionPolicy& policy) {
  if (scored.empty()) throw Error("evaluate: empty scored set");
  EvalMetrics m;
  m.total = scored.size();
  for (const ScoredQuery& q : scored) {
    if (apply_policy(policy, score_of(q, policy.kind)) == Decision::kAnswer) {
      ++m.answered;
      m.correct_answered += q.correct;
    }
  }
  m.recall = static_cast<double>(m.answered) / static_cast<double>(m.total);
  if (m.answered == 0) {
    m.precision = 1.0;
    m.degenerate_precision = true;
  } else {
    m.precision = static_cast<double>(m.correct_answered) /
                  static_cast<double>(m.answered);
  }
  m.error_rate = 1.0 - m.precision;
  return m;
}

std::vector<PrPoint> pr_curve(std::span<const ScoredQuery> scored,
                              ScoreKind kind) {
  if (scored.empty()) throw Error("pr_curve: empty scored set");
  std::set<double> distinct;
  for (const ScoredQuery& q : scored) distinct.insert(score_of(q, kind));

  AbstentionPolicy policy{kind, 0.0, direction_of(kind)};
  std::vector<PrPoint> curve;
  for (double threshold : distinct) {
    policy.threshold = threshold;
    const EvalMetrics metrics = evaluate(scored, policy);
    curve.push_back({threshold, metrics.recall, metrics.precision});
  }
  std::sort(curve.begin(), curve.end(), [](const PrPoint& a, const PrPoint& b) {
    return a.recall != b.recall ? a.recall < b.recall
                                : a.threshold < b.threshold;
  });
  return curve;
}

bool matches_any_answer(const std::string& prediction,
                        std::span<const std::string> accepted, double tau) {
  const TokenSeq predicted = tokenize(prediction);
  for (const std::string& answer : accepted) {
    if (f1_score(predicted, tokenize(answer)) >= tau) return true;
  }
  return false;
}

std::vector<QueryRecord> read_jsonl_records(std::istream& in,
                                            bool filter_long_answers) {
  std::vector<QueryRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("dataset line " + std::to_string(line_number) +
                  ": invalid JSON: " + e.what());
    }
    QueryRecord record;
    try {
      record.query = j.at("query").get<std::string>();
      record.answers = j.at("answers").get<std::vector<std::string>>();
      if (j.contains("tag")) record.tag = j["tag"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("dataset line " + std::to_string(line_number) + ": " +
                  e.what());
    }
    if (record.query.empty()) {
      throw Error("dataset line " + std::to_string(line_number) +
                  ": query must be nonempty");
    }
    if (record.answers.empty()) {
      throw Error("dataset line " + std::to_string(line_number) +
                  ": need at least one accepted answer");
    }
    if (filter_long_answers) {
      bool all_short = true;
      for (const std::string& a : record.answers) {
        if (a.size() >= 20) all_short = false;
      }
      if (!all_short) continue;
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string scored_to_csv(std::span<const ScoredQuery> scored,
                          const AbstentionPolicy& policy) {
  std::ostringstream out;
  out << "# epimi scored-queries schema v1\n";
  out << "query_id,tag,score_name,score,answered,correct\n";
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const double score = score_of(scored[i], policy.kind);
    const bool answered = apply_policy(policy, score) == Decision::kAnswer;
    out << i << ',' << scored[i].tag << ',' << score_name(policy.kind) << ','
        << format_number(score) << ',' << (answered ? 1 : 0) << ','
        << (scored[i].correct ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string pr_curve_to_csv(std::span<const PrPoint> curve) {
  std::ostringstream out;
  out << "# epimi pr-curve schema v1\n";
  out << "threshold,recall,precision\n";
  for (const PrPoint& p : curve) {
    out << format_number(p.threshold) << ',' << format_number(p.recall) << ','
        << format_number(p.precision) << '\n';
  }
  return out.str();
}

}  // namespace epimi
