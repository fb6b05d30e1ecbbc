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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "epimi/categorical.hpp"
#include "epimi/rng.hpp"

namespace epimi::test {

/// Random space with arity 1..3 and total size <= max_size.
inline std::shared_ptr<const TupleSpace> random_space(Rng& rng,
                                                      std::size_t max_size) {
  const std::size_t arity = 1 + rng.below(3);
  std::vector<std::vector<Atom>> coords;
  std::size_t total = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    std::size_t width = 2 + rng.below(3);
    while (total * width > max_size && width > 1) --width;
    if (width < 1) width = 1;
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < width; ++a) {
      atoms.emplace_back(static_cast<std::int64_t>(a));
    }
    coords.push_back(std::move(atoms));
    total *= width;
  }
  return std::make_shared<const TupleSpace>(std::move(coords));
}

/// Random distribution on a random space; optionally with exact zeros.
inline Categorical random_distribution(Rng& rng, std::size_t max_size = 64,
                                       bool allow_zeros = true) {
  auto space = random_space(rng, max_size);
  std::vector<double> weights(space->size());
  double sum = 0.0;
  while (sum <= 0.0) {
    sum = 0.0;
    for (double& w : weights) {
      const double u = rng.uniform();
      w = (allow_zeros && u < 0.15) ? 0.0 : u * u + 1e-4;
      sum += w;
    }
  }
  for (double& w : weights) w /= sum;
  return Categorical(std::move(space), std::move(weights));
}

/// Full-support product distribution on the given space.
inline Categorical random_product_distribution(
    Rng& rng, std::shared_ptr<const TupleSpace> space) {
  std::vector<std::vector<double>> marginals(space->arity());
  for (std::size_t i = 0; i < space->arity(); ++i) {
    auto& m = marginals[i];
    m.resize(space->coordinate(i).size());
    double sum = 0.0;
    for (double& v : m) {
      v = 0.05 + rng.uniform();
      sum += v;
    }
    for (double& v : m) v /= sum;
  }
  std::vector<double> weights(space->size(), 1.0);
  for (std::size_t flat = 0; flat < space->size(); ++flat) {
    const Tuple t = space->tuple_at(flat);
    for (std::size_t i = 0; i < space->arity(); ++i) {
      weights[flat] *= marginals[i][space->atom_index(i, t[i])];
    }
  }
  return Categorical(std::move(space), std::move(weights));
}

/// Sample = every positive-probability tuple exactly once, in enumeration
/// order.
inline std::vector<Tuple> full_support_sample(const Categorical& dist) {
  std::vector<Tuple> sample;
  for (std::size_t flat = 0; flat < dist.space().size(); ++flat) {
    if (dist.prob(flat) > 0.0) sample.push_back(dist.space().tuple_at(flat));
  }
  return sample;
}

/// The conditional-estimator walkthrough fixture: five samples over four
/// distinct responses, with the marginal and per-center conditional tables.
/// The London column carries the golden values; the Paris/Berlin columns are
/// arbitrary completions, and every expected value derived from the full
/// table is frozen from an independent script.
struct WalkthroughFixture {
  std::vector<std::string> samples{"London", "London", "London, UK", "Paris",
                                   "Berlin"};
  std::map<std::string, double> marginal{
      {"London", 0.5}, {"London, UK", 0.2}, {"Paris", 0.1}, {"Berlin", 0.05}};
  std::map<std::string, std::map<std::string, double>> conditional{
      {"London",
       {{"London", 0.6}, {"London, UK", 0.15}, {"Paris", 0.05},
        {"Berlin", 0.04}}},
      {"Paris",
       {{"London", 0.30}, {"London, UK", 0.10}, {"Paris", 0.45},
        {"Berlin", 0.05}}},
      {"Berlin",
       {{"London", 0.25}, {"London, UK", 0.10}, {"Paris", 0.05},
        {"Berlin", 0.50}}}};

  double marginal_prob(const std::string& text) const {
    const auto it = marginal.find(text);
    return it == marginal.end() ? 0.0 : it->second;
  }
  double cond_prob(const std::string& given, const std::string& of) const {
    const auto row = conditional.find(given);
    if (row == conditional.end()) return 0.0;
    const auto it = row->second.find(of);
    return it == row->second.end() ? 0.0 : it->second;
  }
};

// Frozen from the independent script for the fixture above.
inline constexpr double kWalkthroughMi = 0.12075656779797991;
inline constexpr double kWalkthroughMiSmoothed = 0.04855998440005957;

}  // namespace epimi::test
