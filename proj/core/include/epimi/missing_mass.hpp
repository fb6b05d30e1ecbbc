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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epimi/categorical.hpp"

namespace epimi {

class ConditionalModel;  // prompting.hpp

/// Realized missing mass of a sample: total true probability of tuples absent
/// from it. Computed as 1 - sum of observed unique probabilities in
/// first-occurrence order, the same accumulation the plug-in estimator uses
/// for its normalizer Z, so missing mass == 1 - Z holds bitwise on shared
/// samples.
double missing_mass_exact(const Categorical& dist,
                          std::span<const Tuple> sample);
double missing_mass_exact(const Categorical& dist,
                          std::span<const std::size_t> sample_indices);

/// E[U_k] = sum_x mu(x) (1 - mu(x))^k.
double expected_missing_mass_exact(const Categorical& dist, std::size_t k);

/// Good-Turing estimate M/k, where M counts sample elements seen exactly once.
double good_turing(std::span<const Tuple> sample);
double good_turing(std::span<const std::size_t> sample_indices);

/// Finite-support bound on E[U_k]: exp(-k/N) for k <= N, else N/(e k).
double bound_finite(std::size_t support_size, std::size_t k);

/// Entropy bound on E[U_k]: min(1, h / H_k) with H_k the k-th harmonic sum;
/// log_form carries the looser h/ln(k) when k >= 2.
struct EntropyBound {
  double value = 0.0;
  std::optional<double> log_form;
};
EntropyBound bound_entropy(double entropy_bound_nats, std::size_t k);

/// Power law mu(i) = i^-alpha / H(alpha, N) on atoms 1..N; requires alpha > 1.
Categorical make_zipf(std::size_t support_size, double alpha);

/// Least-squares slope of ln E[U_k] against ln k over the grid, using the
/// closed-form expectation (no sampling). The theoretical target decay is
/// -(alpha-1)/alpha. finite_support_regime flags grids that run past the
/// support size, where exponential decay takes over and the power-law slope
/// comparison is not meaningful.
struct ZipfDecayReport {
  double fitted_slope = 0.0;
  double target_slope = 0.0;  // -(alpha-1)/alpha
  bool finite_support_regime = false;
  std::vector<std::size_t> k_grid;
  std::vector<double> expected_missing_mass;
};
ZipfDecayReport zipf_decay_check(std::size_t support_size, double alpha,
                                 std::span<const std::size_t> k_grid);

/// eps_k = emk_upper + sqrt(ln(1/delta)/k); raw value plus [0,1] clamp.
struct EpsilonK {
  double raw = 0.0;
  double clamped = 0.0;
};
EpsilonK epsilon_k(double emk_upper, std::size_t k, double delta);

/// Data-dependent bound E[U_k] <= U~_k + 1 - P(X~) + sqrt(ln(1/delta)/k).
struct EmkUpperBound {
  double raw = 0.0;
  double clamped = 0.0;
};
EmkUpperBound data_dependent_emk_bound(double observed_missing_mass,
                                       double support_mass, std::size_t k,
                                       double delta);

/// Repeatedly samples a backend until the distinct responses cover
/// mass_target probability or `cap` draws are spent.
struct EffectiveSupport {
  std::vector<std::string> responses;
  std::vector<double> probabilities;
  double total_mass = 0.0;  // P(X~)
  bool hit_cap = false;
};
EffectiveSupport discover_effective_support(const ConditionalModel& model,
                                            const std::string& query,
                                            double mass_target = 0.95,
                                            std::size_t cap = 1000,
                                            double temperature = 0.9,
                                            std::uint64_t seed = 0);

/// One row of the missing-mass experiment CSV:
/// k, U_k, E[U_k], bound_name, bound, eps_k, delta.
struct MissingMassReport {
  std::size_t k = 0;
  double realized = 0.0;       // U_k
  double expected = 0.0;       // E[U_k]
  std::string bound_name;      // finite | entropy | zipf | data-dependent
  double bound = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;

  std::string to_csv_row() const;
};

}  // namespace epimi
