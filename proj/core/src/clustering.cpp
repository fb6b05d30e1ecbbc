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

#include "epimi/clustering.hpp"

#include "epimi/error.hpp"

namespace epimi {

std::vector<std::size_t> dedupe_tuples(std::span<const Tuple> items) {
  return dedupe<Tuple, TupleHash>(items);
}

std::vector<std::size_t> dedupe_texts(std::span<const std::string> items) {
  return dedupe<std::string>(items);
}

ClusteredSample cluster_greedy(
    std::size_t count, std::span<const double> probs,
    const std::function<double(std::size_t, std::size_t)>& sim, double tau) {
  if (probs.size() != count) {
    throw Error("cluster_greedy: probs must align with elements");
  }
  if (!(tau > 0.0)) {
    throw Error("cluster_greedy: tau must be positive");
  }
  ClusteredSample out;
  for (std::size_t i = 0; i < count; ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < out.centers.size(); ++c) {
      if (sim(out.centers[c], i) >= tau) {
        out.members[c].push_back(i);
        out.aggregated[c] += probs[i];
        placed = true;
        break;
      }
    }
    if (!placed) {
      out.centers.push_back(i);
      out.members.push_back({i});
      out.aggregated.push_back(probs[i]);
    }
  }
  return out;
}

}  // namespace epimi
