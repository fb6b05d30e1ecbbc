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

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>

#include "epimi/prompting.hpp"

namespace epimi {

struct RetryPolicy {
  int max_retries = 3;
  int backoff_ms = 100;  // base of the jittered exponential backoff
};

struct HttpBackendConfig {
  std::string base_url = "http://127.0.0.1:8080";
  std::string model = "default";
  /// Name of the environment variable holding the API key; empty disables
  /// auth. The key itself is never logged or echoed.
  std::string api_key_env;
  int max_in_flight = 4;
  RetryPolicy retry;
  int timeout_sec = 30;
  double temperature = 0.9;
  /// Report the per-token geometric mean instead of the raw product of token
  /// probabilities. Off by default: responses keep their full likelihood.
  bool length_normalize = false;

  static HttpBackendConfig from_json(const std::string& text);
};

/// OpenAI-compatible completions client with token logprobs. Sampled
/// response probabilities are exp(sum of completion token logprobs), with
/// completions truncated at the first newline. Scoring a provided response
/// uses the echo mode; endpoints without it raise a CapabilityError that
/// points at the synthetic backend.
class HttpBackend : public ConditionalModel {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  std::vector<ResponseSample> sample(const std::string& prompt, std::size_t k,
                                     std::uint64_t seed,
                                     double temperature = 1.0) const override;
  double probability(const std::string& prompt,
                     const std::string& response) const override;
  ResponseSample greedy(const std::string& prompt) const override;

  const HttpBackendConfig& config() const { return config_; }

 private:
  std::string post_completions(const std::string& body) const;

  HttpBackendConfig config_;
  std::string api_key_;

  // Bounded in-flight requests.
  mutable std::mutex gate_mutex_;
  mutable std::condition_variable gate_cv_;
  mutable int in_flight_ = 0;
};

}  // namespace epimi
