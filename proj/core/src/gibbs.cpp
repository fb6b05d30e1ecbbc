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

#include "epimi/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "epimi/error.hpp"

namespace epimi {

Categorical make_gibbs(std::size_t n, double temp) {
  if (n < 2) throw Error("make_gibbs: need n >= 2 (pairwise potential)");
  if (!(temp > 0.0)) throw Error("make_gibbs: temp must be positive");

  auto space = TupleSpace::uniform_alphabet(
      {Atom{std::int64_t{-1}}, Atom{std::int64_t{1}}}, n);

  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  std::vector<double> logits(space->size());
  for (std::size_t flat = 0; flat < space->size(); ++flat) {
    const Tuple t = space->tuple_at(flat);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        sum += static_cast<double>(std::get<std::int64_t>(t[i])) *
               static_cast<double>(std::get<std::int64_t>(t[j]));
      }
    }
    logits[flat] = (sum / pairs) / temp;
  }

  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> weights(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    weights[i] = std::exp(logits[i] - max_logit);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return Categorical(std::move(space), std::move(weights));
}

}  // namespace epimi
