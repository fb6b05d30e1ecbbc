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

#include "epimi/tuple_space.hpp"

#include <functional>

#include "epimi/error.hpp"

namespace epimi {

std::string atom_to_string(const Atom& a) {
  if (std::holds_alternative<std::int64_t>(a)) {
    return std::to_string(std::get<std::int64_t>(a));
  }
  return std::get<std::string>(a);
}

std::string tuple_to_string(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ", ";
    out += atom_to_string(t[i]);
  }
  out += ")";
  return out;
}

std::size_t TupleHash::operator()(const Tuple& t) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const Atom& a : t) {
    h ^= std::hash<Atom>{}(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

TupleSpace::TupleSpace(std::vector<std::vector<Atom>> coordinates)
    : coordinates_(std::move(coordinates)) {
  if (coordinates_.empty()) {
    throw Error("TupleSpace: arity must be >= 1");
  }
  positions_.resize(coordinates_.size());
  size_ = 1;
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    const auto& coord = coordinates_[i];
    if (coord.empty()) {
      throw Error("TupleSpace: coordinate " + std::to_string(i) +
                  " has no atoms");
    }
    for (std::size_t j = 0; j < coord.size(); ++j) {
      if (!positions_[i].emplace(coord[j], j).second) {
        throw Error("TupleSpace: duplicate atom '" + atom_to_string(coord[j]) +
                    "' in coordinate " + std::to_string(i));
      }
    }
    size_ *= coord.size();
  }
  // Row-major strides, last coordinate fastest.
  strides_.assign(coordinates_.size(), 1);
  for (std::size_t i = coordinates_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * coordinates_[i].size();
  }
}

const std::vector<Atom>& TupleSpace::coordinate(std::size_t i) const {
  if (i >= coordinates_.size()) {
    throw Error("TupleSpace: coordinate index " + std::to_string(i) +
                " out of range (arity " + std::to_string(arity()) + ")");
  }
  return coordinates_[i];
}

Tuple TupleSpace::tuple_at(std::size_t flat_index) const {
  if (flat_index >= size_) {
    throw Error("TupleSpace: flat index out of range");
  }
  Tuple t(arity());
  for (std::size_t i = 0; i < arity(); ++i) {
    t[i] = coordinates_[i][(flat_index / strides_[i]) % coordinates_[i].size()];
  }
  return t;
}

std::size_t TupleSpace::index_of(const Tuple& t) const {
  if (t.size() != arity()) {
    throw Error("TupleSpace: tuple arity mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < arity(); ++i) {
    flat += atom_index(i, t[i]) * strides_[i];
  }
  return flat;
}

std::size_t TupleSpace::atom_index(std::size_t coordinate,
                                   const Atom& a) const {
  const auto& pos = positions_.at(coordinate);
  const auto it = pos.find(a);
  if (it == pos.end()) {
    throw Error("TupleSpace: atom '" + atom_to_string(a) +
                "' not in coordinate " + std::to_string(coordinate));
  }
  return it->second;
}

std::shared_ptr<const TupleSpace> TupleSpace::uniform_alphabet(
    std::vector<Atom> alphabet, std::size_t arity) {
  std::vector<std::vector<Atom>> coords(arity, alphabet);
  return std::make_shared<const TupleSpace>(std::move(coords));
}

}  // namespace epimi
