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

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace momentalg {

/// Ground-set labels are positive integers 1..n.
using Label = int;

/// A finite multiset of positive labels, stored as strictly increasing
/// (label, multiplicity) pairs. Plain subsets are the multiplicity-1 case.
class Multiset {
 public:
  using Element = std::pair<Label, int>;

  Multiset() = default;
  /// Builds from a flat element list in any order; repetitions raise multiplicity.
  Multiset(std::initializer_list<Label> labels);
  explicit Multiset(std::span<const Label> labels);
  explicit Multiset(const std::vector<Label>& labels) : Multiset(std::span<const Label>(labels)) {}

  /// Builds from per-label counts: counts[i] is the multiplicity of label i+1.
  static Multiset from_counts(std::span<const int> counts);

  const std::vector<Element>& elements() const { return elements_; }
  int multiplicity(Label label) const;
  /// Total number of elements counted with multiplicity.
  int size() const { return size_; }
  bool empty() const { return elements_.empty(); }
  /// Largest label present, 0 for the empty multiset.
  Label max_label() const { return elements_.empty() ? 0 : elements_.back().first; }
  bool is_set() const;

  /// Flat sorted element list, e.g. {1,1,3}.
  std::vector<Label> flatten() const;
  /// Per-label counts for labels 1..n.
  std::vector<int> counts(int n) const;

  /// Multiset sum (multiplicities add).
  Multiset operator+(const Multiset& other) const;
  /// Multiset difference; throws DomainError unless other is a sub-multiset.
  Multiset operator-(const Multiset& other) const;
  bool includes(const Multiset& other) const;
  /// Keeps only the elements whose label is in `labels` (a plain set).
  Multiset restricted_to(const Multiset& labels) const;
  Multiset with(Label label) const;

  /// Bracket form used in every text and JSON payload: [1,1,3], [] for the empty multiset.
  std::string to_string() const;

  friend bool operator==(const Multiset&, const Multiset&) = default;
  friend std::strong_ordering operator<=>(const Multiset& a, const Multiset& b);

 private:
  void canonicalize(std::vector<Label> labels);

  std::vector<Element> elements_;
  int size_ = 0;
};

/// Parses the bracket form produced by Multiset::to_string.
Multiset parse_multiset(const std::string& text);

/// Dense index over every multiset with multiplicity of label i at most caps[i-1].
/// Index layout is mixed radix with label 1 varying fastest, so b <= a implies
/// index(a) - index(b) == index(a - b).
class Lattice {
 public:
  struct Split {
    std::size_t first;
    std::size_t second;
    /// Product over labels of binomial(mult in whole, mult in first).
    double weight;
  };

  Lattice() : Lattice(0, {}) {}
  Lattice(int ground_size, std::vector<int> caps);
  /// All caps 1: the lattice of subsets of {1..n}.
  static Lattice subsets(int ground_size);

  int ground_size() const { return ground_size_; }
  const std::vector<int>& caps() const { return caps_; }
  std::size_t size() const { return size_; }
  /// Sum of caps: the largest multiset size in the lattice.
  int max_degree() const;
  bool multilinear() const;

  bool contains(const Multiset& m) const;
  /// Throws DomainError if m exceeds a cap or uses a label outside 1..n.
  std::size_t index(const Multiset& m) const;
  Multiset multiset(std::size_t index) const;
  std::span<const int> counts(std::size_t index) const;
  int degree(std::size_t index) const;

  /// Every ordered split (b, a - b) of the multiset at `index`, b in increasing index order.
  std::span<const Split> splits(std::size_t index) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.ground_size_ == b.ground_size_ && a.caps_ == b.caps_;
  }

 private:
  struct Tables;

  int ground_size_;
  std::vector<int> caps_;
  std::size_t size_;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace momentalg
