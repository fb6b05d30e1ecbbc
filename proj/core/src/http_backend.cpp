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

#include "epimi/http_backend.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "epimi/error.hpp"

namespace epimi {

namespace {

constexpr const char* kCompletionsPath = "/v1/completions";

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

struct CompletionLogprob {
  double sum = 0.0;
  std::size_t tokens = 0;
};

/// Sums token logprobs of a choice's completion, truncating at the first
/// newline of the text. Uses the tokens array to locate the cut.
CompletionLogprob completion_logprob_sum(const nlohmann::json& choice,
                                         std::string* text_out) {
  if (!choice.contains("logprobs") || choice["logprobs"].is_null() ||
      !choice["logprobs"].contains("token_logprobs")) {
    throw Error("http backend: response is missing logprobs; request them "
                "with logprobs=1 or use a logprob-capable endpoint");
  }
  const auto& lp = choice["logprobs"];
  const auto& token_logprobs = lp["token_logprobs"];
  std::string text = choice.value("text", std::string{});
  const std::size_t cut = text.find('\n');
  if (text_out) {
    *text_out = (cut == std::string::npos) ? text : text.substr(0, cut);
  }

  CompletionLogprob out;
  if (cut == std::string::npos || !lp.contains("tokens")) {
    for (const auto& v : token_logprobs) {
      if (v.is_null()) {
        throw Error("http backend: null token logprob in completion");
      }
      out.sum += v.get<double>();
      ++out.tokens;
    }
    return out;
  }
  // Count tokens up to the newline.
  const auto& tokens = lp["tokens"];
  std::size_t consumed = 0;
  for (std::size_t i = 0; i < tokens.size() && consumed < cut; ++i) {
    const std::string tok = tokens[i].get<std::string>();
    if (token_logprobs[i].is_null()) {
      throw Error("http backend: null token logprob in completion");
    }
    out.sum += token_logprobs[i].get<double>();
    consumed += tok.size();
    ++out.tokens;
  }
  return out;
}

double to_probability(const CompletionLogprob& lp, bool length_normalize) {
  if (length_normalize && lp.tokens > 0) {
    return std::exp(lp.sum / static_cast<double>(lp.tokens));
  }
  return std::exp(lp.sum);
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("http config: invalid JSON: ") + e.what());
  }
  HttpBackendConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.timeout_sec = j.value("timeout_sec", c.timeout_sec);
  c.temperature = j.value("temperature", c.temperature);
  c.length_normalize = j.value("length_normalize", c.length_normalize);
  if (j.contains("retry")) {
    c.retry.max_retries = j["retry"].value("max_retries", c.retry.max_retries);
    c.retry.backoff_ms = j["retry"].value("backoff_ms", c.retry.backoff_ms);
  }
  return c;
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  if (config_.max_in_flight < 1) {
    throw Error("http backend: max_in_flight must be >= 1");
  }
  if (config_.timeout_sec <= 0) {
    throw Error("http backend: timeout must be positive");
  }
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      api_key_ = key;
    } else {
      throw Error("http backend: environment variable '" +
                  config_.api_key_env + "' is not set");
    }
  }
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::post_completions(const std::string& body) const {
  {
    std::unique_lock lock(gate_mutex_);
    gate_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    const HttpBackend* self;
    ~Release() {
      std::lock_guard lock(self->gate_mutex_);
      --self->in_flight_;
      self->gate_cv_.notify_one();
    }
  } release{this};

  const std::size_t body_hash = std::hash<std::string>{}(body);
  std::mt19937_64 jitter(body_hash);
  // Stable per request, so retried sends are recognizable as duplicates by
  // endpoints that honor idempotency keys.
  char idempotency[32];
  std::snprintf(idempotency, sizeof(idempotency), "epimi-%016zx", body_hash);
  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto base = static_cast<std::uint64_t>(config_.retry.backoff_ms)
                        << (attempt - 1);
      const auto delay = base + jitter() % (base + 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_sec);
    client.set_read_timeout(config_.timeout_sec);
    httplib::Headers headers;
    headers.emplace("Idempotency-Key", idempotency);
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post(kCompletionsPath, headers, body, "application/json");
    if (!res) {
      last_failure = "connection failed (" + httplib::to_string(res.error()) +
                     ") for " + config_.base_url + kCompletionsPath;
      continue;
    }
    if (res->status == 200) return res->body;
    if (retryable_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status) + " from " +
                     config_.base_url + kCompletionsPath;
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error("http backend: authentication failed (HTTP " +
                  std::to_string(res->status) + "); check " +
                  (config_.api_key_env.empty() ? std::string("api_key_env")
                                               : config_.api_key_env));
    }
    if (res->status == 404) {
      throw CapabilityError(
          "http backend: " + config_.base_url + kCompletionsPath +
          " not found; the endpoint lacks a completions route - use the "
          "synthetic backend instead");
    }
    throw Error("http backend: HTTP " + std::to_string(res->status) +
                " from " + config_.base_url + kCompletionsPath + ": " +
                res->body);
  }
  throw Error("http backend: giving up after " +
              std::to_string(config_.retry.max_retries + 1) + " attempts: " +
              last_failure);
}

std::vector<ResponseSample> HttpBackend::sample(const std::string& prompt,
                                                std::size_t k,
                                                std::uint64_t seed,
                                                double temperature) const {
  if (k == 0) throw Error("http backend: k must be >= 1");
  nlohmann::json body;
  body["model"] = config_.model;
  body["prompt"] = prompt;
  body["n"] = k;
  body["temperature"] =
      (temperature == 1.0) ? config_.temperature : temperature;
  body["logprobs"] = 1;
  if (seed != 0) body["seed"] = seed;

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(post_completions(body.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("http backend: malformed completions reply: ") +
                e.what());
  }
  if (!reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    throw Error("http backend: completions reply has no choices");
  }
  std::vector<ResponseSample> out;
  out.reserve(reply["choices"].size());
  for (const auto& choice : reply["choices"]) {
    ResponseSample sample;
    const CompletionLogprob lp = completion_logprob_sum(choice, &sample.text);
    sample.probability = to_probability(lp, config_.length_normalize);
    out.push_back(std::move(sample));
  }
  return out;
}

double HttpBackend::probability(const std::string& prompt,
                                const std::string& response) const {
  nlohmann::json body;
  body["model"] = config_.model;
  body["prompt"] = prompt + response;
  body["max_tokens"] = 0;
  body["echo"] = true;
  body["logprobs"] = 0;

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(post_completions(body.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("http backend: malformed scoring reply: ") +
                e.what());
  }
  if (!reply.contains("choices") || reply["choices"].empty()) {
    throw Error("http backend: scoring reply has no choices");
  }
  const auto& choice = reply["choices"][0];
  if (!choice.contains("logprobs") || choice["logprobs"].is_null() ||
      !choice["logprobs"].contains("text_offset") ||
      !choice["logprobs"].contains("token_logprobs")) {
    throw CapabilityError(
        "http backend: endpoint does not support echo-mode scoring of a "
        "provided continuation; use the synthetic backend instead");
  }
  const auto& offsets = choice["logprobs"]["text_offset"];
  const auto& logprobs = choice["logprobs"]["token_logprobs"];
  if (offsets.size() != logprobs.size()) {
    throw Error("http backend: text_offset/token_logprobs length mismatch");
  }
  CompletionLogprob continuation;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i].get<std::size_t>() < prompt.size()) continue;
    if (logprobs[i].is_null()) {
      throw Error("http backend: null token logprob inside the continuation");
    }
    continuation.sum += logprobs[i].get<double>();
    ++continuation.tokens;
  }
  return to_probability(continuation, config_.length_normalize);
}

ResponseSample HttpBackend::greedy(const std::string& prompt) const {
  nlohmann::json body;
  body["model"] = config_.model;
  body["prompt"] = prompt;
  body["n"] = 1;
  body["temperature"] = 0.0;
  body["logprobs"] = 1;

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(post_completions(body.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("http backend: malformed completions reply: ") +
                e.what());
  }
  if (!reply.contains("choices") || reply["choices"].empty()) {
    throw Error("http backend: completions reply has no choices");
  }
  ResponseSample sample;
  const CompletionLogprob lp =
      completion_logprob_sum(reply["choices"][0], &sample.text);
  sample.probability = to_probability(lp, config_.length_normalize);
  return sample;
}

}  // namespace epimi
