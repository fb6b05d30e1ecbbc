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
#include <unordered_map>
#include <vector>

#include "epimi/tuple_space.hpp"

namespace epimi {

/// First-occurrence indices under exact equality: {i : items[i] != items[j]
/// for all j < i}, in sample order.
template <typename T, typename Hash = std::hash<T>>
std::vector<std::size_t> dedupe(std::span<const T> items) {
  std::unordered_map<T, std::size_t, Hash> seen;
  std::vector<std::size_t> uniques;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (seen.emplace(items[i], i).second) uniques.push_back(i);
  }
  return uniques;
}

std::vector<std::size_t> dedupe_tuples(std::span<const Tuple> items);
std::vector<std::size_t> dedupe_texts(std::span<const std::string> items);

/// Greedy first-come clustering of `count` unique elements with aggregated
/// probabilities. Element i joins the earliest center c with sim(c, i) >= tau,
/// otherwise becomes a new center; centers therefore satisfy pairwise
/// sim < tau. Aggregated mass of a center is the sum of its members' probs.
struct ClusteredSample {
  std::vector<std::size_t> centers;               // indices into the uniques
  std::vector<std::vector<std::size_t>> members;  // per center, incl. itself
  std::vector<double> aggregated;                 // mu' per center
};

ClusteredSample cluster_greedy(
    std::size_t count, std::span<const double> probs,
    const std::function<double(std::size_t, std::size_t)>& sim, double tau);

}  // namespace epimi
