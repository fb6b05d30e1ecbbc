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

#include "epimi/prompting.hpp"

#include <json.hpp>

#include "epimi/error.hpp"
#include "epimi/rng.hpp"

namespace epimi {

namespace {

constexpr std::string_view kHeader = "Consider the following question:\nQ: ";
constexpr std::string_view kTrailer =
    "Provide an answer to the following question:\n\nQ: ";
constexpr std::string_view kFirstAnswer = "One answer to question Q is ";
constexpr std::string_view kNextAnswer = "Another answer to question Q is ";
constexpr std::string_view kVerifyMarker =
    "Is the above answer to question Q correct? Answer True or False. A:";

std::string render_with_sentences(const std::string& query,
                                  const std::string& sentences) {
  std::string out;
  out += kHeader;
  out += query;
  out += "\n\n";
  if (!sentences.empty()) {
    out += sentences;
    out += "\n\n";
  }
  out += kTrailer;
  out += query;
  out += ". A:";
  return out;
}

}  // namespace

PromptFamily::PromptFamily(std::string query) : query_(std::move(query)) {
  if (query_.empty()) throw Error("PromptFamily: query must be nonempty");
}

std::string PromptFamily::render(std::span<const std::string> answers) const {
  std::string sentences;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (i > 0) sentences += ' ';
    sentences += (i == 0) ? kFirstAnswer : kNextAnswer;
    sentences += answers[i];
    sentences += '.';
  }
  return render_with_sentences(query_, sentences);
}

std::string PromptFamily::render_repeated(const std::string& answer,
                                          std::size_t t) const {
  std::string sentences;
  for (std::size_t i = 0; i < t; ++i) {
    if (i > 0) sentences += ' ';
    sentences += kNextAnswer;
    sentences += answer;
    sentences += '.';
  }
  return render_with_sentences(query_, sentences);
}

std::string PromptFamily::render_verification(const std::string& query,
                                              const std::string& candidate) {
  std::string out = "Consider the following question: Q: ";
  out += query;
  out += ". ";
  out += kFirstAnswer;
  out += candidate;
  out += ". ";
  out += kVerifyMarker;
  return out;
}

std::optional<ParsedPrompt> parse_prompt(std::string_view prompt) {
  ParsedPrompt parsed;
  if (prompt.find(kVerifyMarker) != std::string_view::npos) {
    parsed.kind = ParsedPrompt::Kind::kVerification;
    constexpr std::string_view head = "Consider the following question: Q: ";
    if (prompt.substr(0, head.size()) != head) return std::nullopt;
    const std::size_t q_end = prompt.find(". ", head.size());
    if (q_end == std::string_view::npos) return std::nullopt;
    parsed.query = std::string(prompt.substr(head.size(), q_end - head.size()));
    const std::size_t ans_start = prompt.find(kFirstAnswer, q_end);
    if (ans_start == std::string_view::npos) return std::nullopt;
    const std::size_t ans_text = ans_start + kFirstAnswer.size();
    const std::size_t ans_end = prompt.find(". ", ans_text);
    if (ans_end == std::string_view::npos) return std::nullopt;
    parsed.answers.push_back(
        std::string(prompt.substr(ans_text, ans_end - ans_text)));
    return parsed;
  }

  parsed.kind = ParsedPrompt::Kind::kAnswer;
  if (prompt.substr(0, kHeader.size()) != kHeader) return std::nullopt;
  const std::size_t q_end = prompt.find('\n', kHeader.size());
  if (q_end == std::string_view::npos) return std::nullopt;
  parsed.query = std::string(prompt.substr(kHeader.size(),
                                           q_end - kHeader.size()));
  const std::size_t body_end = prompt.find(kTrailer);
  if (body_end == std::string_view::npos) return std::nullopt;

  // Answers appear as "... answer to question Q is {text}." sentences in
  // either the "One answer" or "Another answer" form.
  constexpr std::string_view stem = "answer to question Q is ";
  std::size_t cursor = q_end;
  while (true) {
    const std::size_t hit = prompt.find(stem, cursor);
    if (hit == std::string_view::npos || hit >= body_end) break;
    const std::size_t text_start = hit + stem.size();
    const std::size_t text_end = prompt.find('.', text_start);
    if (text_end == std::string_view::npos || text_end >= body_end) {
      return std::nullopt;
    }
    parsed.answers.push_back(
        std::string(prompt.substr(text_start, text_end - text_start)));
    cursor = text_end + 1;
  }
  return parsed;
}

double ResponseChain::pseudo_joint() const {
  double p = 1.0;
  for (double q : step_probs) p *= q;
  return p;
}

std::string ResponseChain::to_jsonl() const {
  nlohmann::json j;
  j["query"] = query;
  j["responses"] = responses;
  j["step_probs"] = step_probs;
  return j.dump();
}

ResponseChain ResponseChain::from_jsonl(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("ResponseChain: invalid JSON line: ") + e.what());
  }
  ResponseChain chain;
  chain.query = j.at("query").get<std::string>();
  chain.responses = j.at("responses").get<std::vector<std::string>>();
  chain.step_probs = j.at("step_probs").get<std::vector<double>>();
  if (chain.responses.size() != chain.step_probs.size()) {
    throw Error("ResponseChain: responses/step_probs length mismatch");
  }
  return chain;
}

ResponseChain sample_chain(const ConditionalModel& model,
                           const PromptFamily& family, std::size_t n,
                           std::uint64_t seed, double temperature) {
  if (n == 0) throw Error("sample_chain: n must be >= 1");
  ResponseChain chain;
  chain.query = family.query();
  for (std::size_t t = 0; t < n; ++t) {
    const std::string prompt = family.render(chain.responses);
    std::vector<ResponseSample> drawn;
    try {
      drawn = model.sample(prompt, 1, derive_seed(seed, t), temperature);
    } catch (const Error& e) {
      throw Error("sample_chain: step " + std::to_string(t + 1) + ": " +
                  e.what());
    }
    if (drawn.empty()) {
      throw Error("sample_chain: step " + std::to_string(t + 1) +
                  ": backend returned no sample");
    }
    chain.responses.push_back(drawn.front().text);
    chain.step_probs.push_back(drawn.front().probability);
  }
  return chain;
}

double pseudo_joint_probability(const ConditionalModel& model,
                                const PromptFamily& family,
                                std::span<const std::string> responses) {
  if (responses.empty()) {
    throw Error("pseudo_joint_probability: need at least one response");
  }
  double p = 1.0;
  std::vector<std::string> context;
  for (const std::string& response : responses) {
    p *= model.probability(family.render(context), response);
    context.push_back(response);
  }
  return p;
}

std::vector<AmplificationPoint> amplification_curve(
    const ConditionalModel& model, const std::string& query,
    const std::string& target, const std::string& repeated,
    std::span<const std::size_t> t_values) {
  if (target == repeated) {
    throw Error("amplification_curve: target and repeated must differ");
  }
  const PromptFamily family(query);
  std::vector<AmplificationPoint> curve;
  curve.reserve(t_values.size());
  for (std::size_t t : t_values) {
    const std::string prompt = family.render_repeated(repeated, t);
    const double p_target = model.probability(prompt, target);
    const double p_repeated = model.probability(prompt, repeated);
    if (p_target + p_repeated <= 0.0) {
      throw Error("amplification_curve: degenerate normalization at t = " +
                  std::to_string(t) + " (both probabilities are zero)");
    }
    curve.push_back({t, p_target / (p_target + p_repeated)});
  }
  return curve;
}

}  // namespace epimi
