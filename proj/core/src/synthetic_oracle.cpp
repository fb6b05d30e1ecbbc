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

#include "epimi/synthetic_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "epimi/error.hpp"
#include "epimi/rng.hpp"
#include "epimi/text_similarity.hpp"

namespace epimi {

namespace {

constexpr double kStickyMatchThreshold = 0.25;

void validate_distribution(const std::vector<ResponseSample>& dist,
                           const std::string& what) {
  if (dist.empty()) throw Error(what + ": empty response distribution");
  double sum = 0.0;
  for (const auto& r : dist) {
    if (!(r.probability >= 0.0) || r.probability > 1.0) {
      throw Error(what + ": probabilities must lie in [0,1]");
    }
    sum += r.probability;
  }
  if (sum <= 0.0 || sum > 1.0 + 1e-9) {
    throw Error(what + ": probabilities must sum to at most 1, got " +
                std::to_string(sum));
  }
}

}  // namespace

void SyntheticOracle::add_query(const std::string& query, QuerySpec spec) {
  validate_distribution(spec.base, "SyntheticOracle base for '" + query + "'");
  for (const auto& [answer, dist] : spec.conditional) {
    validate_distribution(
        dist, "SyntheticOracle conditional '" + query + "' | '" + answer + "'");
  }
  if (spec.policy != ContextPolicy::kIndependent &&
      (spec.strength < 0.0 || spec.strength > 1.0)) {
    throw Error("SyntheticOracle: policy strength must lie in [0,1]");
  }
  queries_[query] = std::move(spec);
}

void SyntheticOracle::set_verifier(const std::string& query,
                                   const std::string& candidate,
                                   double p_true) {
  if (!(p_true >= 0.0 && p_true <= 1.0)) {
    throw Error("SyntheticOracle: p_true must lie in [0,1]");
  }
  verifier_[query][candidate] = p_true;
}

std::vector<ResponseSample> SyntheticOracle::distribution_for(
    const ParsedPrompt& p) const {
  const auto it = queries_.find(p.query);
  if (it == queries_.end()) {
    throw Error("SyntheticOracle: unknown query '" + p.query + "'");
  }
  const QuerySpec& spec = it->second;
  if (p.answers.empty()) return spec.base;

  const auto table = spec.conditional.find(p.answers.back());
  if (table != spec.conditional.end()) return table->second;

  if (spec.policy == ContextPolicy::kIndependent) return spec.base;

  // Empirical distribution of the in-context answers. Under kSticky each
  // answer credits the first semantically matching base response instead of
  // its own text.
  std::vector<ResponseSample> dist = spec.base;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dist.size(); ++i) index[dist[i].text] = i;
  const double s = spec.strength;
  for (auto& r : dist) r.probability *= (1.0 - s);
  const double per_answer = s / static_cast<double>(p.answers.size());
  for (const std::string& answer : p.answers) {
    std::string credited = answer;
    if (spec.policy == ContextPolicy::kSticky) {
      for (const auto& base : spec.base) {
        if (f1_text(base.text, answer) >= kStickyMatchThreshold) {
          credited = base.text;
          break;
        }
      }
    }
    const auto at = index.find(credited);
    if (at != index.end()) {
      dist[at->second].probability += per_answer;
    } else {
      index[credited] = dist.size();
      dist.push_back({credited, per_answer});
    }
  }
  return dist;
}

std::vector<ResponseSample> SyntheticOracle::response_distribution(
    const std::string& prompt) const {
  const auto parsed = parse_prompt(prompt);
  if (!parsed) {
    throw Error("SyntheticOracle: unparseable prompt");
  }
  if (parsed->kind == ParsedPrompt::Kind::kVerification) {
    double p_true = 0.5;
    const auto q = verifier_.find(parsed->query);
    if (q != verifier_.end()) {
      const auto c = q->second.find(parsed->answers.front());
      if (c != q->second.end()) p_true = c->second;
    }
    return {{"True", p_true}, {"False", 1.0 - p_true}};
  }
  return distribution_for(*parsed);
}

std::vector<ResponseSample> SyntheticOracle::sample(const std::string& prompt,
                                                    std::size_t k,
                                                    std::uint64_t seed,
                                                    double temperature) const {
  if (k == 0) throw Error("SyntheticOracle: k must be >= 1");
  if (!(temperature > 0.0)) {
    throw Error("SyntheticOracle: temperature must be positive");
  }
  const std::vector<ResponseSample> dist = response_distribution(prompt);
  // Tempered sampling weights; reported probabilities stay untempered.
  std::vector<double> cum(dist.size());
  double run = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    run += std::pow(dist[i].probability, 1.0 / temperature);
    cum[i] = run;
  }
  if (run <= 0.0) {
    throw Error("SyntheticOracle: prompt has no sampleable mass");
  }
  Rng rng(seed);
  std::vector<ResponseSample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(dist[rng.categorical(cum, run)]);
  }
  return out;
}

double SyntheticOracle::probability(const std::string& prompt,
                                    const std::string& response) const {
  for (const auto& r : response_distribution(prompt)) {
    if (r.text == response) return r.probability;
  }
  return 0.0;
}

ResponseSample SyntheticOracle::greedy(const std::string& prompt) const {
  const std::vector<ResponseSample> dist = response_distribution(prompt);
  const auto best = std::max_element(
      dist.begin(), dist.end(), [](const auto& a, const auto& b) {
        return a.probability < b.probability;
      });
  return *best;
}

}  // namespace epimi
