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

#include "epimi/mi_estimators.hpp"

#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "epimi/clustering.hpp"
#include "epimi/error.hpp"
#include "epimi/missing_mass.hpp"

namespace epimi {

namespace {

std::size_t common_arity(std::span<const Tuple> tuples) {
  if (tuples.empty()) throw Error("MI estimator: need k >= 1 samples");
  const std::size_t n = tuples.front().size();
  if (n == 0) throw Error("MI estimator: tuples must have arity >= 1");
  for (const Tuple& t : tuples) {
    if (t.size() != n) throw Error("MI estimator: mixed tuple arities");
  }
  return n;
}

double checked_prob(double p, const std::string& what) {
  if (!std::isfinite(p) || p < 0.0) {
    throw Error("MI estimator: " + what + " returned an invalid probability");
  }
  return p;
}

void check_params(StabilizationParams params) {
  if (!(params.gamma1 >= 0.0) || !(params.gamma2 >= 0.0)) {
    throw Error("MI estimator: stabilization parameters must be nonnegative");
  }
}

// Fills joint_hat (normalized) and product_hat for the given entries whose
// unnormalized masses are `raw`. Coordinate sums run over observed entries
// only (everything else is zero anyway), via dense per-coordinate codes.
EmpiricalJoint finish_empirical(std::vector<Tuple> entries,
                                std::vector<double> raw, std::size_t arity) {
  EmpiricalJoint out;
  out.observed_mass = 0.0;
  for (double p : raw) out.observed_mass += p;
  if (out.observed_mass <= 0.0) {
    throw Error("MI estimator: no probability mass observed (Z = 0)");
  }
  out.entries = std::move(entries);
  out.joint_hat.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.joint_hat[i] = raw[i] / out.observed_mass;
  }

  // Per-coordinate atom codes over the observed entries.
  std::vector<std::vector<std::size_t>> codes(out.entries.size(),
                                              std::vector<std::size_t>(arity));
  std::vector<std::vector<double>> coord_sums(arity);
  for (std::size_t j = 0; j < arity; ++j) {
    std::unordered_map<Atom, std::size_t> ids;
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
      const auto [it, inserted] =
          ids.emplace(out.entries[i][j], coord_sums[j].size());
      if (inserted) coord_sums[j].push_back(0.0);
      codes[i][j] = it->second;
      coord_sums[j][it->second] += out.joint_hat[i];
    }
  }
  out.product_hat.resize(out.entries.size());
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < arity; ++j) {
      prod *= coord_sums[j][codes[i][j]];
    }
    out.product_hat[i] = prod;
  }
  return out;
}

}  // namespace

EmpiricalJoint build_empirical_joint(std::span<const Tuple> samples,
                                     const TupleProbFn& prob_of) {
  const std::size_t arity = common_arity(samples);
  const std::vector<std::size_t> uniques = dedupe_tuples(samples);
  std::vector<Tuple> entries;
  std::vector<double> raw;
  entries.reserve(uniques.size());
  raw.reserve(uniques.size());
  for (std::size_t idx : uniques) {
    entries.push_back(samples[idx]);
    raw.push_back(checked_prob(prob_of(samples[idx]), "prob_of"));
  }
  return finish_empirical(std::move(entries), std::move(raw), arity);
}

EmpiricalJoint build_empirical_joint_clustered(std::span<const Tuple> samples,
                                               const TupleProbFn& prob_of,
                                               const TupleSimilarityFn& sim,
                                               double tau) {
  const std::size_t arity = common_arity(samples);
  const std::vector<std::size_t> uniques = dedupe_tuples(samples);
  std::vector<double> unique_probs;
  unique_probs.reserve(uniques.size());
  for (std::size_t idx : uniques) {
    unique_probs.push_back(checked_prob(prob_of(samples[idx]), "prob_of"));
  }
  const ClusteredSample clusters = cluster_greedy(
      uniques.size(), unique_probs,
      [&](std::size_t a, std::size_t b) {
        return sim(samples[uniques[a]], samples[uniques[b]]);
      },
      tau);
  std::vector<Tuple> entries;
  entries.reserve(clusters.centers.size());
  for (std::size_t c : clusters.centers) {
    entries.push_back(samples[uniques[c]]);
  }
  return finish_empirical(std::move(entries), clusters.aggregated, arity);
}

double stabilized_log_ratio_sum(const EmpiricalJoint& joint,
                                StabilizationParams params) {
  double total = 0.0;
  for (std::size_t i = 0; i < joint.joint_hat.size(); ++i) {
    const double mu = joint.joint_hat[i];
    if (mu == 0.0) continue;  // 0 ln 0 = 0
    total += mu * std::log((mu + params.gamma1) /
                           (joint.product_hat[i] + params.gamma2));
  }
  return total;
}

MIEstimate estimate_mi_plugin(std::span<const Tuple> samples,
                            const TupleProbFn& prob_of,
                            StabilizationParams params) {
  check_params(params);
  const EmpiricalJoint joint = build_empirical_joint(samples, prob_of);
  MIEstimate est;
  est.value = stabilized_log_ratio_sum(joint, params);
  est.k = samples.size();
  est.arity = samples.front().size();
  est.observed_mass = joint.observed_mass;
  est.params = params;
  return est;
}

MIEstimate estimate_mi_clustered(std::span<const Tuple> samples,
                            const TupleProbFn& prob_of,
                            StabilizationParams params,
                            const TupleSimilarityFn& sim, double tau) {
  check_params(params);
  const EmpiricalJoint joint =
      build_empirical_joint_clustered(samples, prob_of, sim, tau);
  MIEstimate est;
  est.value = stabilized_log_ratio_sum(joint, params);
  est.k = samples.size();
  est.arity = samples.front().size();
  est.observed_mass = joint.observed_mass;
  est.params = params;
  return est;
}

ConditionalMiResult estimate_mi_conditional(std::span<const std::string> samples,
                            const TextProbFn& marginal_prob,
                            const CondProbFn& cond_prob,
                            StabilizationParams params,
                            const TextSimilarityFn& sim, double tau) {
  check_params(params);
  if (samples.empty()) throw Error("MI estimator: need k >= 1 samples");
  const std::vector<std::size_t> uniques = dedupe_texts(samples);
  std::vector<double> unique_probs;
  unique_probs.reserve(uniques.size());
  for (std::size_t idx : uniques) {
    unique_probs.push_back(
        checked_prob(marginal_prob(samples[idx]), "marginal_prob"));
  }
  const ClusteredSample clusters = cluster_greedy(
      uniques.size(), unique_probs,
      [&](std::size_t a, std::size_t b) {
        return sim(samples[uniques[a]], samples[uniques[b]]);
      },
      tau);

  ConditionalMiResult out;
  const std::size_t m = clusters.centers.size();
  for (std::size_t c : clusters.centers) {
    out.centers.push_back(samples[uniques[c]]);
  }

  // Marginal: aggregate, then normalize by Z.
  out.marginal_normalizer = 0.0;
  for (double p : clusters.aggregated) out.marginal_normalizer += p;
  if (out.marginal_normalizer <= 0.0) {
    throw Error("MI estimator: no probability mass observed (Z = 0)");
  }
  out.marginal_hat.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.marginal_hat[i] = clusters.aggregated[i] / out.marginal_normalizer;
  }

  // Conditionals given each center: aggregate member probabilities within
  // each target cluster, then normalize by Z_i.
  out.conditional_hat.assign(m, std::vector<double>(m, 0.0));
  out.conditional_normalizer.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& given = out.centers[i];
    for (std::size_t t = 0; t < m; ++t) {
      double agg = 0.0;
      for (std::size_t member : clusters.members[t]) {
        agg += checked_prob(cond_prob(given, samples[uniques[member]]),
                            "cond_prob");
      }
      out.conditional_hat[i][t] = agg;
      out.conditional_normalizer[i] += agg;
    }
    if (out.conditional_normalizer[i] <= 0.0) {
      throw Error("MI estimator: conditional mass Z_i = 0 for center '" +
                  out.centers[i] + "'");
    }
    for (std::size_t t = 0; t < m; ++t) {
      out.conditional_hat[i][t] /= out.conditional_normalizer[i];
    }
  }

  // Joint, product of marginals, and the stabilized double sum.
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < m; ++t) {
      const double joint = out.marginal_hat[i] * out.conditional_hat[i][t];
      double second_marginal = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        second_marginal += out.marginal_hat[j] * out.conditional_hat[j][t];
      }
      const double product = out.marginal_hat[i] * second_marginal;
      if (joint == 0.0) continue;
      total += joint * std::log((joint + params.gamma1) /
                                (product + params.gamma2));
    }
  }
  out.estimate.value = total;
  out.estimate.k = samples.size();
  out.estimate.arity = 2;
  out.estimate.observed_mass = out.marginal_normalizer;
  out.estimate.params = params;
  return out;
}

namespace {

void check_gammas(const MIEstimate& est, double required_gamma1) {
  const double tol = 1e-9 * std::max(required_gamma1, est.params.gamma1);
  if (std::abs(est.params.gamma1 - required_gamma1) > tol) {
    throw Error("finite_sample_lower_bound: estimate must use gamma1 = " +
                std::to_string(required_gamma1) + " for this branch, got " +
                std::to_string(est.params.gamma1));
  }
  const double required_gamma2 =
      est.params.gamma1 +
      static_cast<double>(est.arity) * (1.0 - est.observed_mass);
  if (est.params.gamma2 < required_gamma2 - 1e-12) {
    throw Error("finite_sample_lower_bound: gamma2 must be >= gamma1 + n(1-Z) = " +
                std::to_string(required_gamma2) + ", got " +
                std::to_string(est.params.gamma2));
  }
}

// Assembles the report from the clamped deviation term and the branch's
// log-cardinality penalty factor (multiplied by epsilon, or by
// delta_supp + epsilon on the effective branch).
BoundReport make_report(const MIEstimate& est, double delta, double emk_upper,
                        const std::function<double(double)>& penalty_of_eps) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error("finite_sample_lower_bound: delta must lie in (0,1)");
  }
  if (!(emk_upper >= 0.0 && emk_upper <= 1.0)) {
    throw Error("finite_sample_lower_bound: emk_upper must lie in [0,1]");
  }
  const EpsilonK eps = epsilon_k(emk_upper, est.k, delta);
  BoundReport report;
  report.epsilon_k = eps.clamped;
  report.epsilon_k_raw = eps.raw;
  report.delta = delta;
  report.emk_upper = emk_upper;
  report.estimate = est;
  report.lower_bound =
      (1.0 - eps.clamped) * est.value -
      (1.0 / static_cast<double>(est.k) + penalty_of_eps(eps.clamped));
  return report;
}

}  // namespace

BoundReport finite_sample_lower_bound(const MIEstimate& est, double delta,
                                      double emk_upper,
                                      const FullSupportBranch& b) {
  if (b.alphabet_size == 0) {
    throw Error("finite_sample_lower_bound: alphabet_size must be >= 1");
  }
  const double space_size = std::pow(static_cast<double>(b.alphabet_size),
                                     static_cast<double>(est.arity));
  check_gammas(est, 1.0 / (static_cast<double>(est.k) * space_size));
  const double n = static_cast<double>(est.arity);
  const double log_term =
      1.0 + n * std::log(1.0 + static_cast<double>(est.k) *
                                   static_cast<double>(b.alphabet_size));
  BoundReport report = make_report(
      est, delta, emk_upper, [&](double eps) { return log_term * eps; });
  report.effective_branch = false;
  report.alphabet_size = b.alphabet_size;
  return report;
}

BoundReport finite_sample_lower_bound(const MIEstimate& est, double delta,
                                      double emk_upper,
                                      const EffectiveSupportBranch& b) {
  if (b.support_size == 0) {
    throw Error("finite_sample_lower_bound: support_size must be >= 1");
  }
  if (!(b.delta_supp >= 0.0 && b.delta_supp < 1.0)) {
    throw Error("finite_sample_lower_bound: delta_supp must lie in [0,1)");
  }
  check_gammas(est, 1.0 / (static_cast<double>(est.k) *
                           static_cast<double>(b.support_size)));
  const double log_term =
      1.0 + std::log(1.0 + static_cast<double>(est.k) *
                               static_cast<double>(b.support_size));
  BoundReport report =
      make_report(est, delta, emk_upper, [&](double eps) {
        return log_term * (b.delta_supp + eps);
      });
  report.effective_branch = true;
  report.support_size = b.support_size;
  report.delta_supp = b.delta_supp;
  return report;
}

std::string MIEstimate::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j["k"] = k;
  j["n"] = arity;
  j["observed_mass"] = observed_mass;
  j["gamma1"] = params.gamma1;
  j["gamma2"] = params.gamma2;
  return j.dump();
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["lower_bound"] = lower_bound;
  j["epsilon_k"] = epsilon_k;
  j["epsilon_k_raw"] = epsilon_k_raw;
  j["delta"] = delta;
  j["emk_upper"] = emk_upper;
  j["branch"] = effective_branch ? "effective_support" : "full_support";
  if (effective_branch) {
    j["support_size"] = support_size;
    j["delta_supp"] = delta_supp;
  } else {
    j["alphabet_size"] = alphabet_size;
  }
  j["estimate"] = nlohmann::json::parse(estimate.to_json());
  return j.dump();
}

}  // namespace epimi
