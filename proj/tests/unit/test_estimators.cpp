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

#include <cmath>
#include <string>
#include <vector>

#include "epimi/error.hpp"
#include "epimi/gibbs.hpp"
#include "epimi/mi_estimators.hpp"
#include "epimi/missing_mass.hpp"
#include "epimi/text_similarity.hpp"
#include "../support.hpp"

using namespace epimi;

namespace {

TupleProbFn prob_from(const Categorical& dist) {
  return [&dist](const Tuple& t) { return dist.prob(t); };
}

const TupleSimilarityFn kNeverMatch = [](const Tuple&, const Tuple&) {
  return 0.0;
};

Tuple text_tuple(std::initializer_list<const char*> parts) {
  Tuple t;
  for (const char* p : parts) t.emplace_back(std::string(p));
  return t;
}

}  // namespace

TEST_CASE("plug-in estimator collapses to exact MI on full-support samples with gamma 0") {
  Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const Categorical d = test::random_distribution(rng, 64);
    const auto sample = test::full_support_sample(d);
    const MIEstimate est = estimate_mi_plugin(sample, prob_from(d), {0.0, 0.0});
    CHECK(std::abs(est.value - mutual_information_exact(d)) <= 1e-12);
    CHECK(est.observed_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("plug-in estimator is zero on product distributions") {
  Rng rng(103);
  auto space = test::random_space(rng, 48);
  const Categorical prod = test::random_product_distribution(rng, space);
  const auto sample = test::full_support_sample(prod);
  const MIEstimate est = estimate_mi_plugin(sample, prob_from(prod), {0.0, 0.0});
  CHECK(std::abs(est.value) <= 1e-12);
}

TEST_CASE("plug-in estimator approaches exact MI on a strongly coupled family") {
  const Categorical d = make_gibbs(2, 0.01);
  const double exact = mutual_information_exact(d);
  const auto sample = sample_tuples(d, 1000, 9001);
  const MIEstimate est =
      estimate_mi_plugin(sample, prob_from(d), {1.0 / 1000, 1.0 / 1000});
  CHECK(std::abs(est.value - exact) <= 0.05);
  CHECK(est.k == 1000);
  CHECK(est.arity == 2);
}

TEST_CASE("plug-in estimator errors when no probability mass is observed") {
  const std::vector<Tuple> sample{text_tuple({"a", "b"})};
  CHECK_THROWS_WITH_AS(
      estimate_mi_plugin(sample, [](const Tuple&) { return 0.0; }, {}),
      doctest::Contains("no probability mass"), Error);
}

TEST_CASE("stabilization parameters must be nonnegative") {
  const std::vector<Tuple> sample{text_tuple({"a", "b"})};
  const TupleProbFn half = [](const Tuple&) { return 0.5; };
  CHECK_THROWS_AS(estimate_mi_plugin(sample, half, {-0.1, 0.0}), Error);
  CHECK_THROWS_AS(estimate_mi_plugin(sample, half, {0.0, -0.1}), Error);
}

TEST_CASE("estimate is monotone in the stabilization parameters") {
  Rng rng(107);
  const Categorical d = test::random_distribution(rng, 32);
  const auto sample = sample_tuples(d, 64, 5);
  double previous = estimate_mi_plugin(sample, prob_from(d), {0.01, 0.0}).value;
  for (double gamma2 : {0.01, 0.1, 0.5, 1.0}) {
    const double value =
        estimate_mi_plugin(sample, prob_from(d), {0.01, gamma2}).value;
    CHECK(value <= previous + 1e-12);
    previous = value;
  }
  previous = estimate_mi_plugin(sample, prob_from(d), {0.0, 0.01}).value;
  for (double gamma1 : {0.01, 0.1, 0.5, 1.0}) {
    const double value =
        estimate_mi_plugin(sample, prob_from(d), {gamma1, 0.01}).value;
    CHECK(value >= previous - 1e-12);
    previous = value;
  }
}

TEST_CASE("clustered estimator with an unreachable threshold matches the plug-in") {
  Rng rng(109);
  for (int trial = 0; trial < 30; ++trial) {
    const Categorical d = test::random_distribution(rng, 48);
    const auto sample = sample_tuples(d, 80, 1000 + trial);
    const StabilizationParams params{1.0 / 80, 1.0 / 80};
    const double plugin = estimate_mi_plugin(sample, prob_from(d), params).value;
    const double clustered =
        estimate_mi_clustered(sample, prob_from(d), params, kNeverMatch, 0.25)
            .value;
    CHECK(std::abs(plugin - clustered) <= 1e-12);
  }
}

TEST_CASE("clustered estimator collapses everything into one cluster") {
  const std::vector<Tuple> sample{text_tuple({"a", "b"}), text_tuple({"c", "d"}),
                                  text_tuple({"e", "f"})};
  const TupleProbFn third = [](const Tuple&) { return 1.0 / 3.0; };
  const TupleSimilarityFn always = [](const Tuple&, const Tuple&) {
    return 1.0;
  };
  const MIEstimate equal_gamma =
      estimate_mi_clustered(sample, third, {0.2, 0.2}, always, 0.25);
  CHECK(equal_gamma.value == 0.0);
  const MIEstimate skewed =
      estimate_mi_clustered(sample, third, {0.3, 0.1}, always, 0.25);
  CHECK(skewed.value == doctest::Approx(std::log(1.3 / 1.1)).epsilon(1e-12));
}

TEST_CASE("clustered estimator matches the hand-enumerated two-coordinate example") {
  // Five unique tuples; the similarity is the per-coordinate minimum of the
  // token F1, so ("london uk","london") merges into ("london","london").
  const std::vector<Tuple> sample{
      text_tuple({"london", "london"}), text_tuple({"london uk", "london"}),
      text_tuple({"paris", "paris"}), text_tuple({"paris", "london"}),
      text_tuple({"london", "paris"})};
  const std::vector<double> probs{0.30, 0.20, 0.15, 0.10, 0.05};
  const TupleProbFn prob_of = [&](const Tuple& t) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample[i] == t) return probs[i];
    }
    return 0.0;
  };
  const TupleSimilarityFn min_f1 = [](const Tuple& a, const Tuple& b) {
    double lowest = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      lowest = std::min(lowest, f1_text(std::get<std::string>(a[i]),
                                        std::get<std::string>(b[i])));
    }
    return lowest;
  };
  const MIEstimate est =
      estimate_mi_clustered(sample, prob_of, {0.0, 0.0}, min_f1, 0.25);

  // Hand enumeration: centers aggregate to (0.5, 0.15, 0.10, 0.05), Z = 0.8,
  // normalized (0.625, 0.1875, 0.125, 0.0625); coordinate sums give the
  // products (0.515625, 0.078125, 0.234375, 0.171875).
  const double expected = 0.625 * std::log(0.625 / 0.515625) +
                          0.1875 * std::log(0.1875 / 0.078125) +
                          0.125 * std::log(0.125 / 0.234375) +
                          0.0625 * std::log(0.0625 / 0.171875);
  CHECK(est.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(est.observed_mass == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("conditional estimator reproduces the walkthrough empirical tables") {
  const test::WalkthroughFixture fixture;
  const ConditionalMiResult result = estimate_mi_conditional(
      fixture.samples,
      [&](const std::string& t) { return fixture.marginal_prob(t); },
      [&](const std::string& g, const std::string& o) {
        return fixture.cond_prob(g, o);
      },
      {0.0, 0.0},
      [](const std::string& a, const std::string& b) { return f1_text(a, b); },
      0.25);

  REQUIRE(result.centers ==
          std::vector<std::string>{"London", "Paris", "Berlin"});
  CHECK(result.marginal_normalizer == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(result.marginal_hat[0] ==
        doctest::Approx(0.7 / 0.85).epsilon(1e-12));
  CHECK(result.conditional_normalizer[0] ==
        doctest::Approx(0.84).epsilon(1e-12));
  CHECK(result.conditional_hat[0][0] ==
        doctest::Approx(0.75 / 0.84).epsilon(1e-12));
  CHECK(result.estimate.value ==
        doctest::Approx(test::kWalkthroughMi).epsilon(1e-12));

  const ConditionalMiResult smoothed = estimate_mi_conditional(
      fixture.samples,
      [&](const std::string& t) { return fixture.marginal_prob(t); },
      [&](const std::string& g, const std::string& o) {
        return fixture.cond_prob(g, o);
      },
      {0.2, 0.2},
      [](const std::string& a, const std::string& b) { return f1_text(a, b); },
      0.25);
  CHECK(smoothed.estimate.value ==
        doctest::Approx(test::kWalkthroughMiSmoothed).epsilon(1e-12));
}

TEST_CASE("conditional estimator normalizations sum to one per center") {
  const test::WalkthroughFixture fixture;
  const ConditionalMiResult result = estimate_mi_conditional(
      fixture.samples,
      [&](const std::string& t) { return fixture.marginal_prob(t); },
      [&](const std::string& g, const std::string& o) {
        return fixture.cond_prob(g, o);
      },
      {0.0, 0.0},
      [](const std::string& a, const std::string& b) { return f1_text(a, b); },
      0.25);
  double marginal_total = 0.0;
  for (double m : result.marginal_hat) marginal_total += m;
  CHECK(marginal_total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < result.centers.size(); ++i) {
    double row = 0.0;
    for (double v : result.conditional_hat[i]) row += v;
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditional estimator is exactly zero for a context-independent model") {
  const std::vector<std::string> samples{"alpha", "beta", "alpha", "gamma",
                                         "beta", "beta"};
  const auto marginal = [](const std::string& t) {
    if (t == "alpha") return 0.5;
    if (t == "beta") return 0.3;
    return 0.2;
  };
  const ConditionalMiResult result = estimate_mi_conditional(
      samples, marginal,
      [&](const std::string&, const std::string& of) { return marginal(of); },
      {0.0, 0.0},
      [](const std::string& a, const std::string& b) { return f1_text(a, b); },
      0.25);
  CHECK(std::abs(result.estimate.value) <= 1e-12);
}

TEST_CASE("conditional estimator errors name the center with zero conditional mass") {
  const std::vector<std::string> samples{"alpha", "beta"};
  CHECK_THROWS_WITH_AS(
      estimate_mi_conditional(
          samples, [](const std::string&) { return 0.5; },
          [](const std::string& given, const std::string&) {
            return given == "beta" ? 0.0 : 0.5;
          },
          {0.0, 0.0},
          [](const std::string&, const std::string&) { return 0.0; }, 0.25),
      doctest::Contains("beta"), Error);
}

TEST_CASE("lower bound reduces to the plug-in form when epsilon vanishes") {
  MIEstimate est;
  est.value = 0.4;
  est.k = 1000;
  est.arity = 2;
  est.observed_mass = 1.0;
  est.params = {1.0 / (1000.0 * 4.0), 1.0 / (1000.0 * 4.0)};
  const BoundReport report =
      finite_sample_lower_bound(est, 1.0 - 1e-12, 0.0, FullSupportBranch{2});
  CHECK(report.lower_bound ==
        doctest::Approx(est.value - 1.0 / 1000.0).epsilon(1e-6));
}

TEST_CASE("lower bound full branch matches an independently evaluated formula") {
  MIEstimate est;
  est.value = 0.5;
  est.k = 1000;
  est.arity = 2;
  est.observed_mass = 1.0;
  est.params = {1.0 / (1000.0 * 4.0), 1.0 / (1000.0 * 4.0)};
  const BoundReport report =
      finite_sample_lower_bound(est, 0.05, 0.01, FullSupportBranch{2});
  CHECK(report.epsilon_k ==
        doctest::Approx(0.06473328305111974).epsilon(1e-14));
  CHECK(report.lower_bound ==
        doctest::Approx(-0.5822273823967818).epsilon(1e-13));

  MIEstimate est_eff = est;
  est_eff.params = {1.0 / (1000.0 * 4.0), 1.0 / (1000.0 * 4.0)};
  const BoundReport effective =
      finite_sample_lower_bound(est_eff, 0.05, 0.01, EffectiveSupportBranch{4, 0.0});
  CHECK(effective.lower_bound ==
        doctest::Approx(-0.13501716886762677).epsilon(1e-13));
  // ln(1 + k|X~|) <= n ln(1 + k|X|) here, so the effective bound is tighter.
  CHECK(effective.lower_bound >= report.lower_bound);
}

TEST_CASE("lower bound enforces the gamma preconditions") {
  MIEstimate est;
  est.value = 0.5;
  est.k = 100;
  est.arity = 2;
  est.observed_mass = 0.9;
  est.params = {1.0 / (100.0 * 4.0), 1.0 / (100.0 * 4.0)};
  // gamma2 must be >= gamma1 + n(1-Z) = gamma1 + 0.2.
  CHECK_THROWS_WITH_AS(finite_sample_lower_bound(est, 0.05, 0.0, FullSupportBranch{2}),
                       doctest::Contains("gamma2"), Error);
  est.params.gamma2 = est.params.gamma1 + 2 * (1.0 - 0.9);
  CHECK_NOTHROW(finite_sample_lower_bound(est, 0.05, 0.0, FullSupportBranch{2}));

  est.params.gamma1 = 0.1;  // not the prescribed value
  CHECK_THROWS_WITH_AS(finite_sample_lower_bound(est, 0.05, 0.0, FullSupportBranch{2}),
                       doctest::Contains("gamma1"), Error);
  CHECK_THROWS_AS(finite_sample_lower_bound(est, 1.5, 0.0, FullSupportBranch{2}),
                  Error);
}

TEST_CASE("lower-bound certificate covers the exact MI on a coupled family") {
  const Categorical d = make_gibbs(2, 1.0);
  const double exact = mutual_information_exact(d);
  const std::size_t k = 200;
  const double emk = expected_missing_mass_exact(d, k);
  std::size_t covered = 0;
  const std::size_t trials = 100;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto sample = sample_tuples(d, k, derive_seed(77, trial));
    const double gamma1 = 1.0 / (static_cast<double>(k) * 4.0);
    EmpiricalJoint joint = build_empirical_joint(
        sample, [&](const Tuple& t) { return d.prob(t); });
    const double gamma2 = gamma1 + 2.0 * (1.0 - joint.observed_mass);
    MIEstimate est;
    est.value = stabilized_log_ratio_sum(joint, {gamma1, gamma2});
    est.k = k;
    est.arity = 2;
    est.observed_mass = joint.observed_mass;
    est.params = {gamma1, gamma2};
    const BoundReport report =
        finite_sample_lower_bound(est, 0.05, emk, FullSupportBranch{2});
    covered += (report.lower_bound <= exact);
  }
  CHECK(covered >= 95);
}

TEST_CASE("estimate and bound serialize with inputs echoed") {
  MIEstimate est;
  est.value = 0.25;
  est.k = 10;
  est.arity = 2;
  est.observed_mass = 1.0;
  est.params = {1.0 / 40.0, 1.0 / 40.0};
  CHECK(est.to_json().find("\"k\":10") != std::string::npos);
  const BoundReport report =
      finite_sample_lower_bound(est, 0.1, 0.0, FullSupportBranch{2});
  const std::string json = report.to_json();
  CHECK(json.find("full_support") != std::string::npos);
  CHECK(json.find("\"delta\":0.1") != std::string::npos);
}
