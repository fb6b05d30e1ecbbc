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

#include <string>
#include <string_view>
#include <vector>

namespace epimi {

/// A text with its normalized token list (lowercase, whitespace-split,
/// leading/trailing punctuation stripped per token, empties dropped).
struct TokenSeq {
  std::string text;
  std::vector<std::string> tokens;
};

TokenSeq tokenize(std::string_view text);

/// Token-inclusion F1 with multiset intersection (minimum multiplicity per
/// token). p = |a^b|/|a|, r = |a^b|/|b|, F1 = 2pr/(p+r); 0 when either side
/// is empty or the intersection is empty. Symmetric.
double f1_score(const TokenSeq& a, const TokenSeq& b);

/// Convenience: tokenize both sides first.
double f1_text(std::string_view a, std::string_view b);

}  // namespace epimi
