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

#include "epimi/categorical.hpp"

namespace epimi {

/// Synthetic correlated family on {-1,+1}^n: weights proportional to
/// exp(potential(x) / temp) with potential(x) the mean of x_i * x_j over all
/// unordered pairs i < j. Normalized with log-sum-exp. Low temperatures
/// concentrate mass on the aligned corners (high mutual information), high
/// temperatures approach uniform.
Categorical make_gibbs(std::size_t n, double temp);

}  // namespace epimi
