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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "epimi/error.hpp"
#include "epimi/http_backend.hpp"
#include "epimi/mi_estimators.hpp"
#include "epimi/prompting.hpp"
#include "epimi/rng.hpp"
#include "epimi/synthetic_oracle.hpp"
#include "epimi/text_similarity.hpp"

using namespace epimi;

namespace {

constexpr const char* kQuery = "What is the capital of the UK?";

SyntheticOracle capital_oracle(ContextPolicy policy, double strength) {
  SyntheticOracle oracle;
  oracle.add_query(kQuery, {{{"London", 0.8}, {"Paris", 0.1}, {"Berlin", 0.1}},
                            policy,
                            strength,
                            {}});
  return oracle;
}

std::string base_prompt() { return PromptFamily(kQuery).render({}); }

std::string context_prompt(std::vector<std::string> answers) {
  return PromptFamily(kQuery).render(answers);
}

}  // namespace

TEST_CASE("independent oracle ignores context") {
  const SyntheticOracle oracle = capital_oracle(ContextPolicy::kIndependent, 0.0);
  CHECK(oracle.probability(base_prompt(), "London") == 0.8);
  CHECK(oracle.probability(context_prompt({"Paris", "Berlin"}), "London") ==
        0.8);
  CHECK(oracle.probability(base_prompt(), "unheard-of") == 0.0);
  CHECK_THROWS_WITH_AS(oracle.probability(
                           PromptFamily("unknown?").render({}), "London"),
                       doctest::Contains("unknown"), Error);
}

TEST_CASE("copier oracle mixes base with the in-context empirical") {
  const SyntheticOracle pure = capital_oracle(ContextPolicy::kCopier, 1.0);
  CHECK(pure.probability(context_prompt({"Paris"}), "Paris") == 1.0);
  CHECK(pure.probability(context_prompt({"Paris"}), "London") == 0.0);

  const SyntheticOracle half = capital_oracle(ContextPolicy::kCopier, 0.5);
  CHECK(half.probability(context_prompt({"Paris"}), "London") ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(half.probability(context_prompt({"Paris"}), "Paris") ==
        doctest::Approx(0.5 * 0.1 + 0.5).epsilon(1e-15));
  // Out-of-vocabulary context answers get their own mass.
  CHECK(half.probability(context_prompt({"Rome"}), "Rome") ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sticky oracle credits semantically matching base responses") {
  const SyntheticOracle sticky = capital_oracle(ContextPolicy::kSticky, 0.5);
  // "London, UK" matches the base response "London" at F1 = 2/3.
  CHECK(sticky.probability(context_prompt({"London, UK"}), "London") ==
        doctest::Approx(0.5 * 0.8 + 0.5).epsilon(1e-15));
  // Unmatched context answers fall back to their own text.
  CHECK(sticky.probability(context_prompt({"Madrid"}), "Madrid") ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("oracle sampling, greedy, and determinism") {
  const SyntheticOracle oracle = capital_oracle(ContextPolicy::kIndependent, 0.0);
  CHECK(oracle.greedy(base_prompt()).text == "London");
  CHECK(oracle.greedy(base_prompt()).probability == 0.8);

  const auto a = oracle.sample(base_prompt(), 32, 99, 0.9);
  const auto b = oracle.sample(base_prompt(), 32, 99, 0.9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].probability == b[i].probability);
  }

  // Near-zero temperature concentrates sampling on the mode, while the
  // reported probability stays untempered.
  const auto cold = oracle.sample(base_prompt(), 16, 5, 0.05);
  for (const auto& r : cold) {
    CHECK(r.text == "London");
    CHECK(r.probability == 0.8);
  }
  CHECK_THROWS_AS(oracle.sample(base_prompt(), 0, 1), Error);
  CHECK_THROWS_AS(oracle.sample(base_prompt(), 1, 1, 0.0), Error);
}

TEST_CASE("verification prompts use the configured verifier table") {
  SyntheticOracle oracle = capital_oracle(ContextPolicy::kIndependent, 0.0);
  oracle.set_verifier(kQuery, "London", 0.9);
  const std::string prompt =
      PromptFamily::render_verification(kQuery, "London");
  CHECK(oracle.probability(prompt, "True") == 0.9);
  CHECK(oracle.probability(prompt, "False") ==
        doctest::Approx(0.1).epsilon(1e-15));
  // Unconfigured candidates normalize to one half.
  const std::string other = PromptFamily::render_verification(kQuery, "Rome");
  CHECK(oracle.probability(other, "True") == 0.5);
}

TEST_CASE("independent oracle drives the estimators to zero") {
  const PromptFamily family(kQuery);
  double plugin_mean = 0.0;
  const std::size_t seeds = 20;
  const std::size_t k = 2000;
  for (std::size_t s = 0; s < seeds; ++s) {
    const SyntheticOracle oracle =
        capital_oracle(ContextPolicy::kIndependent, 0.0);
    std::vector<Tuple> tuples;
    tuples.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      const ResponseChain chain =
          sample_chain(oracle, family, 2, derive_seed(1234 + s, c));
      tuples.push_back(Tuple{Atom{chain.responses[0]},
                             Atom{chain.responses[1]}});
    }
    const MIEstimate est = estimate_mi_plugin(
        tuples,
        [&](const Tuple& t) {
          const std::vector<std::string> responses{
              std::get<std::string>(t[0]), std::get<std::string>(t[1])};
          return pseudo_joint_probability(oracle, family, responses);
        },
        {1.0 / k, 1.0 / k});
    plugin_mean += est.value / static_cast<double>(seeds);
  }
  CHECK(std::abs(plugin_mean) <= 0.02);

  // Same backend through the conditional-probability estimator.
  const SyntheticOracle oracle =
      capital_oracle(ContextPolicy::kIndependent, 0.0);
  const std::string prompt = family.render({});
  double conditional_mean = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto drawn = oracle.sample(prompt, k, derive_seed(4321 + s, 0), 0.9);
    std::vector<std::string> texts;
    for (const auto& r : drawn) texts.push_back(r.text);
    const ConditionalMiResult result = estimate_mi_conditional(
        texts,
        [&](const std::string& t) { return oracle.probability(prompt, t); },
        [&](const std::string& g, const std::string& o) {
          return oracle.probability(family.render(std::vector<std::string>{g}),
                                    o);
        },
        {1.0 / k, 1.0 / k},
        [](const std::string& a, const std::string& b) {
          return f1_text(a, b);
        },
        0.25);
    conditional_mean += result.estimate.value / static_cast<double>(seeds);
  }
  CHECK(std::abs(conditional_mean) <= 0.02);
}

TEST_CASE("copier context dependence raises the conditional MI score") {
  const PromptFamily family(kQuery);
  const auto make_oracle = [](ContextPolicy policy, double strength) {
    SyntheticOracle oracle;
    oracle.add_query(kQuery, {{{"London", 0.4}, {"Paris", 0.35}, {"Berlin", 0.25}},
                              policy,
                              strength,
                              {}});
    return oracle;
  };
  const auto run_conditional_mi = [&](const SyntheticOracle& oracle, std::uint64_t seed) {
    const std::string prompt = family.render({});
    const auto drawn = oracle.sample(prompt, 16, seed, 0.9);
    std::vector<std::string> texts;
    for (const auto& r : drawn) texts.push_back(r.text);
    return estimate_mi_conditional(
               texts,
               [&](const std::string& t) {
                 return oracle.probability(prompt, t);
               },
               [&](const std::string& g, const std::string& o) {
                 return oracle.probability(
                     family.render(std::vector<std::string>{g}), o);
               },
               {0.0, 0.0},
               [](const std::string& a, const std::string& b) {
                 return f1_text(a, b);
               },
               0.25)
        .estimate.value;
  };
  const SyntheticOracle independent =
      make_oracle(ContextPolicy::kIndependent, 0.0);
  const SyntheticOracle copier = make_oracle(ContextPolicy::kCopier, 0.6);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CHECK(run_conditional_mi(copier, seed) > run_conditional_mi(independent, seed));
  }
}

// ---------------------------------------------------------------------------
// HTTP backend against a bundled in-process mock server. No network access:
// everything binds to the loopback interface.
// ---------------------------------------------------------------------------

namespace {

class MockServer {
 public:
  explicit MockServer(httplib::Server::Handler handler) {
    server_.Post("/v1/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackendConfig mock_config(const std::string& url) {
  HttpBackendConfig config;
  config.base_url = url;
  config.model = "mock";
  config.retry.max_retries = 3;
  config.retry.backoff_ms = 1;
  config.timeout_sec = 5;
  return config;
}

}  // namespace

TEST_CASE("http sample converts summed token logprobs to probabilities") {
  MockServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body.at("model") == "mock");
    nlohmann::json choice;
    choice["text"] = "Paris";
    choice["logprobs"] = {{"tokens", {"Paris"}},
                          {"token_logprobs", {-0.105}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  const auto samples = backend.sample("prompt", 1, 42);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].text == "Paris");
  CHECK(samples[0].probability ==
        doctest::Approx(std::exp(-0.105)).epsilon(1e-12));
}

TEST_CASE("http sample truncates completions at the first newline") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    nlohmann::json choice;
    choice["text"] = "London\nmore text";
    choice["logprobs"] = {{"tokens", {"London", "\nmore", " text"}},
                          {"token_logprobs", {-0.2, -4.0, -3.0}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  const auto samples = backend.sample("prompt", 1, 0);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].text == "London");
  CHECK(samples[0].probability ==
        doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
}

TEST_CASE("http backend retries through transient failures") {
  auto hits = std::make_shared<std::atomic<int>>(0);
  MockServer server([hits](const httplib::Request&, httplib::Response& res) {
    if (hits->fetch_add(1) < 2) {
      res.status = 429;
      return;
    }
    nlohmann::json choice;
    choice["text"] = "ok";
    choice["logprobs"] = {{"tokens", {"ok"}}, {"token_logprobs", {0.0}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  const auto samples = backend.sample("prompt", 1, 0);
  CHECK(samples[0].text == "ok");
  CHECK(samples[0].probability == 1.0);
  CHECK(hits->load() == 3);
}

TEST_CASE("http backend gives up after exhausting retries") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  HttpBackendConfig config = mock_config(server.url());
  config.retry.max_retries = 1;
  const HttpBackend backend(config);
  CHECK_THROWS_WITH_AS(backend.sample("prompt", 1, 0),
                       doctest::Contains("giving up"), Error);
}

TEST_CASE("missing logprobs is a structured error") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    nlohmann::json choice;
    choice["text"] = "no logprobs here";
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  CHECK_THROWS_WITH_AS(backend.sample("prompt", 1, 0),
                       doctest::Contains("logprobs"), Error);
}

TEST_CASE("http probability scores the continuation via echo mode") {
  MockServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body.at("echo") == true);
    CHECK(body.at("max_tokens") == 0);
    const std::string full = body.at("prompt");
    // Prompt "Q: capital? A:" is 14 characters; continuation follows.
    nlohmann::json choice;
    choice["text"] = full;
    choice["logprobs"] = {
        {"text_offset", {0, 7, 14, 17}},
        {"token_logprobs", {nullptr, -1.0, -0.5, -0.5}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  const double p = backend.probability("Q: capital? A:", " London");
  CHECK(p == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("endpoints without echo scoring raise a capability error") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    nlohmann::json choice;
    choice["text"] = "something";
    choice["logprobs"] = nullptr;
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  CHECK_THROWS_WITH_AS(backend.probability("prompt", "response"),
                       doctest::Contains("synthetic"), CapabilityError);
}

TEST_CASE("greedy decodes at temperature zero") {
  MockServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body.at("temperature") == 0.0);
    nlohmann::json choice;
    choice["text"] = "London";
    choice["logprobs"] = {{"tokens", {"London"}}, {"token_logprobs", {-0.01}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  const HttpBackend backend(mock_config(server.url()));
  const ResponseSample greedy = backend.greedy("prompt");
  CHECK(greedy.text == "London");
  CHECK(greedy.probability == doctest::Approx(std::exp(-0.01)).epsilon(1e-12));
}

TEST_CASE("http config validation and auth environment") {
  HttpBackendConfig config;
  config.api_key_env = "EPIMI_TEST_KEY_THAT_DOES_NOT_EXIST";
  CHECK_THROWS_WITH_AS(HttpBackend{config},
                       doctest::Contains("EPIMI_TEST_KEY_THAT_DOES_NOT_EXIST"),
                       Error);
  HttpBackendConfig bad;
  bad.max_in_flight = 0;
  CHECK_THROWS_AS(HttpBackend{bad}, Error);

  const HttpBackendConfig parsed = HttpBackendConfig::from_json(
      R"({"base_url":"http://h:1","model":"m","max_in_flight":2,
          "retry":{"max_retries":5,"backoff_ms":7},"temperature":0.5,
          "length_normalize":true})");
  CHECK(parsed.base_url == "http://h:1");
  CHECK(parsed.model == "m");
  CHECK(parsed.max_in_flight == 2);
  CHECK(parsed.retry.max_retries == 5);
  CHECK(parsed.retry.backoff_ms == 7);
  CHECK(parsed.temperature == 0.5);
  CHECK(parsed.length_normalize);
  CHECK_THROWS_AS(HttpBackendConfig::from_json("{oops"), Error);
}

TEST_CASE("length normalization reports the per-token geometric mean") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    nlohmann::json choice;
    choice["text"] = "two tokens";
    choice["logprobs"] = {{"tokens", {"two", " tokens"}},
                          {"token_logprobs", {-0.5, -1.5}}};
    res.set_content(nlohmann::json{{"choices", {choice}}}.dump(),
                    "application/json");
  });
  HttpBackendConfig config = mock_config(server.url());
  config.length_normalize = true;
  const HttpBackend backend(config);
  const auto samples = backend.sample("prompt", 1, 0);
  CHECK(samples[0].probability ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}
