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

#include "epimi/categorical.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "epimi/error.hpp"
#include "epimi/rng.hpp"

namespace epimi {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kWeightClamp = 1e-300;

nlohmann::json atom_to_json(const Atom& a) {
  if (std::holds_alternative<std::int64_t>(a)) {
    return std::get<std::int64_t>(a);
  }
  return std::get<std::string>(a);
}

Atom atom_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Atom{j.get<std::int64_t>()};
  if (j.is_string()) return Atom{j.get<std::string>()};
  throw Error("Categorical: atom must be an integer or a string");
}

}  // namespace

Categorical::Categorical(std::shared_ptr<const TupleSpace> space,
                         std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw Error("Categorical: null space");
  if (weights_.size() != space_->size()) {
    throw Error("Categorical: expected " + std::to_string(space_->size()) +
                " weights, got " + std::to_string(weights_.size()));
  }
  double sum = 0.0;
  for (double& w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error("Categorical: weights must be finite and nonnegative");
    }
    if (w < kWeightClamp) w = 0.0;
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error("Categorical: weights sum to " + std::to_string(sum) +
                ", expected 1 within 1e-9");
  }
  for (double& w : weights_) w /= sum;
}

std::size_t Categorical::support_size() const {
  std::size_t count = 0;
  for (double w : weights_) count += (w > 0.0);
  return count;
}

std::string Categorical::to_json() const {
  nlohmann::json coords = nlohmann::json::array();
  for (std::size_t i = 0; i < space_->arity(); ++i) {
    nlohmann::json coord = nlohmann::json::array();
    for (const Atom& a : space_->coordinate(i)) coord.push_back(atom_to_json(a));
    coords.push_back(std::move(coord));
  }
  nlohmann::json doc;
  doc["space"] = std::move(coords);
  doc["weights"] = weights_;
  return doc.dump();
}

Categorical Categorical::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("Categorical: invalid JSON: ") + e.what());
  }
  if (!doc.contains("space") || !doc.contains("weights")) {
    throw Error("Categorical: JSON must have 'space' and 'weights'");
  }
  std::vector<std::vector<Atom>> coords;
  for (const auto& coord : doc["space"]) {
    std::vector<Atom> atoms;
    for (const auto& a : coord) atoms.push_back(atom_from_json(a));
    coords.push_back(std::move(atoms));
  }
  auto space = std::make_shared<const TupleSpace>(std::move(coords));
  return Categorical(std::move(space), doc["weights"].get<std::vector<double>>());
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double entropy(const Categorical& dist) { return entropy(dist.weights()); }

double kl_divergence(const Categorical& p, const Categorical& q) {
  if (!(p.space() == q.space())) {
    throw Error("kl_divergence: distributions live on different spaces");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.weights().size(); ++i) {
    const double pi = p.weights()[i];
    if (pi == 0.0) continue;
    const double qi = q.weights()[i];
    if (qi == 0.0) return std::numeric_limits<double>::infinity();
    d += pi * std::log(pi / qi);
  }
  return d;
}

Categorical marginal(const Categorical& dist, std::size_t coordinate) {
  const TupleSpace& space = dist.space();
  if (coordinate >= space.arity()) {
    throw Error("marginal: coordinate " + std::to_string(coordinate) +
                " out of range (arity " + std::to_string(space.arity()) + ")");
  }
  std::vector<double> sums(space.coordinate(coordinate).size(), 0.0);
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const Tuple t = space.tuple_at(flat);
    sums[space.atom_index(coordinate, t[coordinate])] += dist.prob(flat);
  }
  auto coord_space = std::make_shared<const TupleSpace>(
      std::vector<std::vector<Atom>>{space.coordinate(coordinate)});
  return Categorical(std::move(coord_space), std::move(sums));
}

Categorical product_of_marginals(const Categorical& dist) {
  const TupleSpace& space = dist.space();
  // Per-coordinate marginal tables first, then one product per tuple.
  std::vector<std::vector<double>> marg(space.arity());
  for (std::size_t i = 0; i < space.arity(); ++i) {
    marg[i].assign(space.coordinate(i).size(), 0.0);
  }
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const double w = dist.prob(flat);
    if (w == 0.0) continue;
    const Tuple t = space.tuple_at(flat);
    for (std::size_t i = 0; i < space.arity(); ++i) {
      marg[i][space.atom_index(i, t[i])] += w;
    }
  }
  std::vector<double> weights(space.size(), 1.0);
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const Tuple t = space.tuple_at(flat);
    for (std::size_t i = 0; i < space.arity(); ++i) {
      weights[flat] *= marg[i][space.atom_index(i, t[i])];
    }
  }
  return Categorical(dist.space_ptr(), std::move(weights));
}

double mutual_information_exact(const Categorical& dist) {
  const TupleSpace& space = dist.space();
  double total = 0.0;
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const double mu_x = dist.prob(flat);
    if (mu_x == 0.0) continue;
    const Tuple x = space.tuple_at(flat);
    double mu_x_prod = 1.0;
    for (std::size_t i = 0; i < space.arity(); ++i) {
      double coord_sum = 0.0;
      for (std::size_t other = 0; other < space.size(); ++other) {
        if (space.tuple_at(other)[i] == x[i]) coord_sum += dist.prob(other);
      }
      mu_x_prod *= coord_sum;
    }
    total += mu_x * std::log(mu_x / mu_x_prod);
  }
  return total;
}

std::vector<std::size_t> sample_indices(const Categorical& dist, std::size_t k,
                                        std::uint64_t seed) {
  if (k == 0) throw Error("sample_indices: k must be >= 1");
  std::vector<double> cum(dist.weights().size());
  double run = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    run += dist.weights()[i];
    cum[i] = run;
  }
  Rng rng(seed);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = rng.categorical(cum, run);
  }
  return out;
}

std::vector<Tuple> sample_tuples(const Categorical& dist, std::size_t k,
                                 std::uint64_t seed) {
  std::vector<Tuple> out;
  out.reserve(k);
  for (std::size_t flat : sample_indices(dist, k, seed)) {
    out.push_back(dist.space().tuple_at(flat));
  }
  return out;
}

}  // namespace epimi
