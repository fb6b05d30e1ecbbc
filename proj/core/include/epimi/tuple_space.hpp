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
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace epimi {

/// An element of one coordinate's alphabet: an opaque comparable token.
using Atom = std::variant<std::int64_t, std::string>;

/// A point of the product space, one atom per coordinate.
using Tuple = std::vector<Atom>;

std::string atom_to_string(const Atom& a);
std::string tuple_to_string(const Tuple& t);

struct TupleHash {
  std::size_t operator()(const Tuple& t) const;
};

/// Finite product space Z = Z_1 x ... x Z_n. Coordinates hold distinct atoms;
/// enumeration is row-major with the last coordinate varying fastest, so flat
/// index i maps to a fixed tuple for the lifetime of the space.
class TupleSpace {
 public:
  explicit TupleSpace(std::vector<std::vector<Atom>> coordinates);

  std::size_t arity() const { return coordinates_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<Atom>& coordinate(std::size_t i) const;

  Tuple tuple_at(std::size_t flat_index) const;
  /// Flat index of a tuple; throws Error if any coordinate atom is unknown.
  std::size_t index_of(const Tuple& t) const;
  /// Position of an atom within coordinate i; throws Error if unknown.
  std::size_t atom_index(std::size_t coordinate, const Atom& a) const;

  bool operator==(const TupleSpace& other) const {
    return coordinates_ == other.coordinates_;
  }

  /// Convenience: n copies of the same alphabet.
  static std::shared_ptr<const TupleSpace> uniform_alphabet(
      std::vector<Atom> alphabet, std::size_t arity);

 private:
  std::vector<std::vector<Atom>> coordinates_;
  std::vector<std::unordered_map<Atom, std::size_t>> positions_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace epimi
