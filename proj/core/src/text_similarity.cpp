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

#include "epimi/text_similarity.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace epimi {

TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  seq.text = std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    if (i == start) continue;
    std::size_t end = i;
    while (start < end &&
           std::ispunct(static_cast<unsigned char>(text[start]))) {
      ++start;
    }
    while (end > start &&
           std::ispunct(static_cast<unsigned char>(text[end - 1]))) {
      --end;
    }
    if (end == start) continue;
    std::string token(text.substr(start, end - start));
    std::transform(token.begin(), token.end(), token.begin(), [](char c) {
      return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    });
    seq.tokens.push_back(std::move(token));
  }
  return seq;
}

double f1_score(const TokenSeq& a, const TokenSeq& b) {
  if (a.tokens.empty() || b.tokens.empty()) return 0.0;
  std::unordered_map<std::string, int> counts;
  for (const auto& t : a.tokens) ++counts[t];
  std::size_t intersection = 0;
  for (const auto& t : b.tokens) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++intersection;
    }
  }
  if (intersection == 0) return 0.0;
  const double p = static_cast<double>(intersection) / a.tokens.size();
  const double r = static_cast<double>(intersection) / b.tokens.size();
  return 2.0 * p * r / (p + r);
}

double f1_text(std::string_view a, std::string_view b) {
  return f1_score(tokenize(a), tokenize(b));
}

}  // namespace epimi
