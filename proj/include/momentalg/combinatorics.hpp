// Copyright 2026 The momentalg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "momentalg/multiset.hpp"

namespace momentalg {

/// An unordered partition of a multiset into nonempty blocks, blocks in
/// canonical (non-increasing multiplicity-vector) order.
struct Partition {
  std::vector<Multiset> blocks;

  int part_count() const { return static_cast<int>(blocks.size()); }
  /// Multiset sum of the blocks.
  Multiset total() const;
};

/// A partition together with the number of set partitions of the
/// distinctly-labelled multiset that project onto it (1 for plain sets).
struct WeightedPartition {
  Partition partition;
  std::int64_t coefficient;
};

struct OrderedBipartition {
  Multiset first;
  Multiset second;
  /// Product over labels of binomial(mult in whole, mult in first).
  std::int64_t weight;
};

/// Enumeration is streamed through a visitor; returning false stops early.
template <class T>
using Visitor = std::function<bool(const T&)>;

/// Streams the distinct partitions of a nonempty multiset with their
/// multiplicity coefficients. Throws DomainError for the empty multiset.
void for_each_partition(const Multiset& a, const Visitor<WeightedPartition>& visit);
std::vector<WeightedPartition> partitions_of(const Multiset& a);

/// Streams (b, a - b) for every sub-multiset b, b in increasing canonical order.
/// The empty multiset yields the single split (∅, ∅).
void for_each_ordered_bipartition(const Multiset& a, const Visitor<OrderedBipartition>& visit);
std::vector<OrderedBipartition> ordered_bipartitions_of(const Multiset& a);

/// Streams every sub-multiset of a, including ∅ and a.
void for_each_sub_multiset(const Multiset& a, const Visitor<Multiset>& visit);
std::vector<Multiset> sub_multisets_of(const Multiset& a);

/// Streams all k! orderings of 1..k in lexicographic order (one empty ordering for k = 0).
void for_each_permutation(int k, const Visitor<std::vector<int>>& visit);
std::vector<std::vector<int>> permutations_of(int k);

std::int64_t factorial(int n);

}  // namespace momentalg
