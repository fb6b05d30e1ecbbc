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
#include <span>
#include <vector>

namespace epimi {

/// Dense row-major matrix, just big enough for the single-head forward pass.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Idealized single self-attention head: query/key/value matrices of shape
/// d' x d and the end-of-input vector E of length d'. Rows of the input
/// matrix represent complete statements, not tokens.
struct AttentionHead {
  Matrix wq;
  Matrix wk;
  Matrix wv;
  std::vector<double> end_vector;
};

struct AttentionOutput {
  std::vector<double> weights;  // softmax over input rows, sums to 1
  std::vector<double> value;    // length d
};

/// f(Z) = Softmax(E^T Wq (Z Wk)^T / sqrt(d)) Z Wv. Logits are computed in
/// double precision with max-subtraction before exponentiation.
AttentionOutput attention_forward(const AttentionHead& head,
                                  const Matrix& input);

/// Builds Z = [X; Y repeated t times] for each t and reports the total
/// softmax mass on the Y rows together with the distance of the output from
/// Y^T Wv. The Y mass follows the closed form
/// t e^{l_Y} / (e^{l_X} + t e^{l_Y}).
struct RepetitionPoint {
  std::size_t t = 0;
  double y_mass = 0.0;
  double output_distance = 0.0;
};
std::vector<RepetitionPoint> repetition_experiment(
    const AttentionHead& head, std::span<const double> x,
    std::span<const double> y, std::span<const std::size_t> t_values);

}  // namespace epimi
