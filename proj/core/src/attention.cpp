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

#include "epimi/attention.hpp"

#include <algorithm>
#include <cmath>

#include "epimi/error.hpp"

namespace epimi {

namespace {

void check_head(const AttentionHead& head) {
  const std::size_t dp = head.wq.rows;
  const std::size_t d = head.wq.cols;
  if (dp == 0 || d == 0) throw Error("attention: empty weight matrices");
  if (head.wk.rows != dp || head.wk.cols != d || head.wv.rows != dp ||
      head.wv.cols != d) {
    throw Error("attention: Wq, Wk, Wv must all be d' x d");
  }
  if (head.end_vector.size() != dp) {
    throw Error("attention: end vector must have length d'");
  }
  for (double v : head.end_vector) {
    if (!std::isfinite(v)) throw Error("attention: non-finite end vector");
  }
  for (const Matrix* m : {&head.wq, &head.wk, &head.wv}) {
    for (double v : m->data) {
      if (!std::isfinite(v)) throw Error("attention: non-finite weights");
    }
  }
}

}  // namespace

AttentionOutput attention_forward(const AttentionHead& head,
                                  const Matrix& input) {
  check_head(head);
  const std::size_t dp = head.wq.rows;
  const std::size_t d = head.wq.cols;
  const std::size_t n = input.rows;
  if (n == 0 || input.cols != dp) {
    throw Error("attention: input must be n x d' with n >= 1");
  }

  // q = E^T Wq, length d.
  std::vector<double> q(d, 0.0);
  for (std::size_t a = 0; a < dp; ++a) {
    const double e = head.end_vector[a];
    for (std::size_t b = 0; b < d; ++b) {
      q[b] += e * head.wq.at(a, b);
    }
  }

  // logits_i = q . (row_i Wk) / sqrt(d)
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> logits(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
      double kb = 0.0;
      for (std::size_t a = 0; a < dp; ++a) {
        kb += input.at(i, a) * head.wk.at(a, b);
      }
      dot += q[b] * kb;
    }
    logits[i] = dot * scale;
  }

  AttentionOutput out;
  out.weights.resize(n);
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.weights[i] = std::exp(logits[i] - max_logit);
    norm += out.weights[i];
  }
  for (double& w : out.weights) w /= norm;

  // combined = weights . Z (length d'), output = combined Wv (length d).
  std::vector<double> combined(dp, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < dp; ++a) {
      combined[a] += out.weights[i] * input.at(i, a);
    }
  }
  out.value.assign(d, 0.0);
  for (std::size_t a = 0; a < dp; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      out.value[b] += combined[a] * head.wv.at(a, b);
    }
  }
  return out;
}

std::vector<RepetitionPoint> repetition_experiment(
    const AttentionHead& head, std::span<const double> x,
    std::span<const double> y, std::span<const std::size_t> t_values) {
  check_head(head);
  const std::size_t dp = head.wq.rows;
  const std::size_t d = head.wq.cols;
  if (x.size() != dp || y.size() != dp) {
    throw Error("repetition_experiment: X and Y must have length d'");
  }

  // y_target = Y^T Wv
  std::vector<double> y_target(d, 0.0);
  for (std::size_t a = 0; a < dp; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      y_target[b] += y[a] * head.wv.at(a, b);
    }
  }

  std::vector<RepetitionPoint> points;
  points.reserve(t_values.size());
  for (std::size_t t : t_values) {
    if (t == 0) throw Error("repetition_experiment: t values must be >= 1");
    Matrix z(1 + t, dp);
    for (std::size_t a = 0; a < dp; ++a) z.at(0, a) = x[a];
    for (std::size_t r = 1; r <= t; ++r) {
      for (std::size_t a = 0; a < dp; ++a) z.at(r, a) = y[a];
    }
    const AttentionOutput out = attention_forward(head, z);
    RepetitionPoint p;
    p.t = t;
    p.y_mass = 0.0;
    for (std::size_t r = 1; r <= t; ++r) p.y_mass += out.weights[r];
    double dist2 = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
      const double diff = out.value[b] - y_target[b];
      dist2 += diff * diff;
    }
    p.output_distance = std::sqrt(dist2);
    points.push_back(p);
  }
  return points;
}

}  // namespace epimi
