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

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epimi/tuple_space.hpp"

namespace epimi {

/// Additive smoothing inside the estimator's logarithm, accounting for the
/// unobserved probability mass. Exploratory default is 1/k for both; the
/// scoring mode uses 0/0; certified bounds prescribe their own values.
struct StabilizationParams {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Empirical joint restricted to the observed (possibly clustered) support:
/// entries with normalized mass joint_hat, per-entry product-of-marginals
/// product_hat (coordinate sums taken over observed entries only), and the
/// raw observed mass Z.
struct EmpiricalJoint {
  std::vector<Tuple> entries;
  std::vector<double> joint_hat;
  std::vector<double> product_hat;
  double observed_mass = 0.0;  // Z
};

/// Finite-sample mutual-information estimate. The value is reported as-is
/// (it may be negative; clipping would break the exact-collapse property).
struct MIEstimate {
  double value = 0.0;
  std::size_t k = 0;          // sample size before dedupe
  std::size_t arity = 0;      // n
  double observed_mass = 0.0; // Z
  StabilizationParams params;

  std::string to_json() const;
};

using TupleProbFn = std::function<double(const Tuple&)>;
using TupleSimilarityFn = std::function<double(const Tuple&, const Tuple&)>;
using TextProbFn = std::function<double(const std::string&)>;
using CondProbFn =
    std::function<double(const std::string& given, const std::string& of)>;
using TextSimilarityFn =
    std::function<double(const std::string&, const std::string&)>;

/// Dedupe the sample, normalize the true probabilities of the observed
/// uniques by Z, and build the observed-support product distribution.
EmpiricalJoint build_empirical_joint(std::span<const Tuple> samples,
                                     const TupleProbFn& prob_of);

/// Same, with greedy semantic clustering of the uniques (similarity over
/// whole tuples) and per-cluster probability aggregation before normalizing.
/// Product-of-marginals coordinate matching uses exact equality of cluster
/// center coordinates.
EmpiricalJoint build_empirical_joint_clustered(std::span<const Tuple> samples,
                                               const TupleProbFn& prob_of,
                                               const TupleSimilarityFn& sim,
                                               double tau);

/// sum_i joint_hat_i * ln((joint_hat_i + gamma1) / (product_hat_i + gamma2)).
double stabilized_log_ratio_sum(const EmpiricalJoint& joint,
                                StabilizationParams params);

/// Plug-in estimator on the deduped sample (k tuples drawn from mu; prob_of
/// returns the true or pseudo-joint probability of a sampled tuple).
MIEstimate estimate_mi_plugin(std::span<const Tuple> samples,
                            const TupleProbFn& prob_of,
                            StabilizationParams params);

/// Cluster-aware variant: uniques are merged into semantic clusters before
/// the empirical distributions are formed. With an unreachable tau this is
/// identical to estimate_mi_plugin.
MIEstimate estimate_mi_clustered(std::span<const Tuple> samples,
                            const TupleProbFn& prob_of,
                            StabilizationParams params,
                            const TupleSimilarityFn& sim, double tau);

/// Conditional-probability variant (n = 2) operating on single responses:
/// the joint is assembled from the response marginal and one-step
/// conditionals instead of pseudo-joint tuples.
struct ConditionalMiResult {
  MIEstimate estimate;
  std::vector<std::string> centers;           // cluster center texts
  std::vector<double> marginal_hat;           // normalized marginal per center
  double marginal_normalizer = 0.0;           // Z
  std::vector<double> conditional_normalizer; // Z_i per center
  std::vector<std::vector<double>> conditional_hat;  // [given][of]
};

ConditionalMiResult estimate_mi_conditional(std::span<const std::string> samples,
                            const TextProbFn& marginal_prob,
                            const CondProbFn& cond_prob,
                            StabilizationParams params,
                            const TextSimilarityFn& sim, double tau);

/// Branch selectors for the finite-sample lower-bound certificate.
struct FullSupportBranch {
  std::size_t alphabet_size = 0;  // |X|, per-coordinate
};
struct EffectiveSupportBranch {
  std::size_t support_size = 0;  // |X~|
  double delta_supp = 0.0;       // 1 - mu(X~) allowance
};

/// High-probability lower bound on I(mu) from an estimate computed with the
/// branch-prescribed gamma1 and gamma2 >= gamma1 + n(1-Z).
struct BoundReport {
  double lower_bound = 0.0;
  double epsilon_k = 0.0;  // clamped to [0,1]
  double epsilon_k_raw = 0.0;
  double delta = 0.0;
  double emk_upper = 0.0;
  bool effective_branch = false;
  std::size_t alphabet_size = 0;
  std::size_t support_size = 0;
  double delta_supp = 0.0;
  MIEstimate estimate;  // inputs echoed

  std::string to_json() const;
};

BoundReport finite_sample_lower_bound(const MIEstimate& est, double delta,
                                      double emk_upper,
                                      const FullSupportBranch& b);
BoundReport finite_sample_lower_bound(const MIEstimate& est, double delta,
                                      double emk_upper,
                                      const EffectiveSupportBranch& b);

}  // namespace epimi
