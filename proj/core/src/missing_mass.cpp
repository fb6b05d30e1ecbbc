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

#include "epimi/missing_mass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "epimi/clustering.hpp"
#include "epimi/error.hpp"
#include "epimi/io.hpp"
#include "epimi/prompting.hpp"
#include "epimi/rng.hpp"

namespace epimi {

double missing_mass_exact(const Categorical& dist,
                          std::span<const std::size_t> sample_indices) {
  std::unordered_set<std::size_t> seen;
  double observed = 0.0;
  for (std::size_t idx : sample_indices) {
    if (seen.insert(idx).second) observed += dist.prob(idx);
  }
  return 1.0 - observed;
}

double missing_mass_exact(const Categorical& dist,
                          std::span<const Tuple> sample) {
  std::vector<std::size_t> indices;
  indices.reserve(sample.size());
  for (const Tuple& t : sample) indices.push_back(dist.space().index_of(t));
  return missing_mass_exact(dist, indices);
}

double expected_missing_mass_exact(const Categorical& dist, std::size_t k) {
  double total = 0.0;
  for (double w : dist.weights()) {
    if (w > 0.0) {
      total += w * std::pow(1.0 - w, static_cast<double>(k));
    }
  }
  return total;
}

double good_turing(std::span<const std::size_t> sample_indices) {
  if (sample_indices.empty()) throw Error("good_turing: need k >= 1");
  std::unordered_map<std::size_t, std::size_t> counts;
  for (std::size_t idx : sample_indices) ++counts[idx];
  std::size_t singletons = 0;
  for (const auto& [_, c] : counts) singletons += (c == 1);
  return static_cast<double>(singletons) /
         static_cast<double>(sample_indices.size());
}

double good_turing(std::span<const Tuple> sample) {
  if (sample.empty()) throw Error("good_turing: need k >= 1");
  std::unordered_map<Tuple, std::size_t, TupleHash> counts;
  for (const Tuple& t : sample) ++counts[t];
  std::size_t singletons = 0;
  for (const auto& [_, c] : counts) singletons += (c == 1);
  return static_cast<double>(singletons) / static_cast<double>(sample.size());
}

double bound_finite(std::size_t support_size, std::size_t k) {
  if (support_size == 0) throw Error("bound_finite: support_size must be >= 1");
  if (k == 0) throw Error("bound_finite: k must be >= 1");
  const double n = static_cast<double>(k);
  const double big_n = static_cast<double>(support_size);
  if (k <= support_size) return std::exp(-n / big_n);
  return big_n / (std::numbers::e * n);
}

EntropyBound bound_entropy(double entropy_bound_nats, std::size_t k) {
  if (entropy_bound_nats < 0.0) {
    throw Error("bound_entropy: entropy bound must be nonnegative");
  }
  if (k == 0) throw Error("bound_entropy: k must be >= 1");
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    harmonic += 1.0 / static_cast<double>(i);
  }
  EntropyBound out;
  out.value = std::min(1.0, entropy_bound_nats / harmonic);
  if (k >= 2) {
    out.log_form = std::min(
        1.0, entropy_bound_nats / std::log(static_cast<double>(k)));
  }
  return out;
}

Categorical make_zipf(std::size_t support_size, double alpha) {
  if (support_size == 0) throw Error("make_zipf: support_size must be >= 1");
  if (!(alpha > 1.0)) throw Error("make_zipf: alpha must be > 1");
  std::vector<Atom> atoms;
  std::vector<double> weights;
  atoms.reserve(support_size);
  weights.reserve(support_size);
  double norm = 0.0;
  for (std::size_t i = 1; i <= support_size; ++i) {
    atoms.emplace_back(static_cast<std::int64_t>(i));
    const double w = std::pow(static_cast<double>(i), -alpha);
    weights.push_back(w);
    norm += w;
  }
  for (double& w : weights) w /= norm;
  auto space = std::make_shared<const TupleSpace>(
      std::vector<std::vector<Atom>>{std::move(atoms)});
  return Categorical(std::move(space), std::move(weights));
}

ZipfDecayReport zipf_decay_check(std::size_t support_size, double alpha,
                                 std::span<const std::size_t> k_grid) {
  if (k_grid.size() < 2) {
    throw Error("zipf_decay_check: need at least two grid points");
  }
  for (std::size_t i = 1; i < k_grid.size(); ++i) {
    if (k_grid[i] <= k_grid[i - 1]) {
      throw Error("zipf_decay_check: k_grid must be strictly increasing");
    }
  }
  const Categorical zipf = make_zipf(support_size, alpha);
  ZipfDecayReport report;
  report.target_slope = -(alpha - 1.0) / alpha;
  report.k_grid.assign(k_grid.begin(), k_grid.end());
  report.finite_support_regime = k_grid.back() > support_size;

  // Least squares of ln E[U_k] on ln k.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k : k_grid) {
    const double e = expected_missing_mass_exact(zipf, k);
    report.expected_missing_mass.push_back(e);
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(k_grid.size());
  report.fitted_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return report;
}

EpsilonK epsilon_k(double emk_upper, std::size_t k, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error("epsilon_k: delta must lie in (0,1)");
  }
  if (k == 0) throw Error("epsilon_k: k must be >= 1");
  EpsilonK out;
  out.raw = emk_upper + std::sqrt(std::log(1.0 / delta) /
                                  static_cast<double>(k));
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

EmkUpperBound data_dependent_emk_bound(double observed_missing_mass,
                                       double support_mass, std::size_t k,
                                       double delta) {
  if (!(observed_missing_mass >= 0.0 && observed_missing_mass <= 1.0)) {
    throw Error("data_dependent_emk_bound: U~_k must lie in [0,1]");
  }
  if (!(support_mass >= 0.0 && support_mass <= 1.0)) {
    throw Error("data_dependent_emk_bound: P(X~) must lie in [0,1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error("data_dependent_emk_bound: delta must lie in (0,1)");
  }
  if (k == 0) throw Error("data_dependent_emk_bound: k must be >= 1");
  EmkUpperBound out;
  out.raw = observed_missing_mass + (1.0 - support_mass) +
            std::sqrt(std::log(1.0 / delta) / static_cast<double>(k));
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

EffectiveSupport discover_effective_support(const ConditionalModel& model,
                                            const std::string& query,
                                            double mass_target,
                                            std::size_t cap,
                                            double temperature,
                                            std::uint64_t seed) {
  const PromptFamily family(query);
  const std::string prompt = family.render({});
  EffectiveSupport out;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t draws = 0;
  while (out.total_mass < mass_target && draws < cap) {
    const auto batch =
        model.sample(prompt, 1, derive_seed(seed, draws), temperature);
    ++draws;
    if (batch.empty()) {
      throw Error("discover_effective_support: backend returned no sample");
    }
    const auto& sample = batch.front();
    if (seen.emplace(sample.text, out.responses.size()).second) {
      out.responses.push_back(sample.text);
      out.probabilities.push_back(sample.probability);
      out.total_mass += sample.probability;
    }
  }
  out.hit_cap = (out.total_mass < mass_target);
  return out;
}

std::string MissingMassReport::to_csv_row() const {
  std::ostringstream row;
  row << k << ',' << format_number(realized) << ',' << format_number(expected)
      << ',' << bound_name << ',' << format_number(bound) << ','
      << format_number(epsilon) << ',' << format_number(delta);
  return row.str();
}

}  // namespace epimi
