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

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "epimi/tuple_space.hpp"

namespace epimi {

/// Explicit finite distribution over a TupleSpace. Weights are indexed in the
/// space's enumeration order and sum to 1 after construction (inputs whose
/// total is within 1e-9 of 1 are renormalized silently; anything else is
/// rejected). Weights below 1e-300 are clamped to zero. Immutable once built.
class Categorical {
 public:
  Categorical(std::shared_ptr<const TupleSpace> space,
              std::vector<double> weights);

  const TupleSpace& space() const { return *space_; }
  const std::shared_ptr<const TupleSpace>& space_ptr() const { return space_; }
  std::span<const double> weights() const { return weights_; }

  double prob(std::size_t flat_index) const { return weights_.at(flat_index); }
  double prob(const Tuple& t) const { return weights_[space_->index_of(t)]; }

  /// Number of tuples with positive probability.
  std::size_t support_size() const;

  /// {"space": per-coordinate atom lists, "weights": flat array}.
  std::string to_json() const;
  static Categorical from_json(const std::string& text);

 private:
  std::shared_ptr<const TupleSpace> space_;
  std::vector<double> weights_;
};

/// H(mu) = sum mu(z) ln(1/mu(z)) in nats; zero-probability atoms contribute 0.
double entropy(const Categorical& dist);

/// Entropy of a raw weight vector that already sums to 1.
double entropy(std::span<const double> probs);

/// KL(p, q) = sum p(z) ln(p(z)/q(z)); +infinity where p > 0 and q = 0.
/// Both distributions must live on the same space.
double kl_divergence(const Categorical& p, const Categorical& q);

/// Marginal of one coordinate, as a distribution on that coordinate's space.
Categorical marginal(const Categorical& dist, std::size_t coordinate);

/// mu_otimes(z) = prod_i mu_i(z_i), on the same space as dist.
Categorical product_of_marginals(const Categorical& dist);

/// I(mu) = KL(mu, mu_otimes), evaluated by direct summation over the space
/// (per-tuple marginal sums), independent of product_of_marginals.
double mutual_information_exact(const Categorical& dist);

/// k i.i.d. flat indices, deterministic given seed.
std::vector<std::size_t> sample_indices(const Categorical& dist, std::size_t k,
                                        std::uint64_t seed);

/// k i.i.d. tuples, deterministic given seed.
std::vector<Tuple> sample_tuples(const Categorical& dist, std::size_t k,
                                 std::uint64_t seed);

}  // namespace epimi
