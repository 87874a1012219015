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

#include "momentalg/combinatorics.hpp"

#include <algorithm>
#include <numeric>

#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

using Counts = std::vector<int>;

// Index of the first nonzero entry, or size() for the zero vector.
std::size_t lead(const Counts& v) {
  auto it = std::find_if(v.begin(), v.end(), [](int c) { return c != 0; });
  return static_cast<std::size_t>(it - v.begin());
}

std::int64_t binomial(int n, int k) {
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

class PartitionWalker {
 public:
  PartitionWalker(const Multiset& a, const Visitor<WeightedPartition>& visit)
      : visit_(visit) {
    for (auto [label, mult] : a.elements()) {
      labels_.push_back(label);
      whole_.push_back(mult);
    }
  }

  void run() { recurse(whole_, whole_); }

 private:
  // Blocks are emitted in non-increasing lexicographic order of their count
  // vectors, which makes every distinct partition appear exactly once.
  bool recurse(const Counts& rest, const Counts& bound) {
    if (lead(rest) == rest.size()) {
      return emit();
    }
    Counts block = rest;
    const std::size_t width = rest.size();
    while (true) {
      if (lead(block) == width) break;
      if (block <= bound) {
        Counts remaining(width);
        for (std::size_t i = 0; i < width; ++i) remaining[i] = rest[i] - block[i];
        // Completion with blocks <= block is possible iff the remainder does
        // not lead strictly before the block does.
        if (lead(remaining) >= lead(block)) {
          blocks_.push_back(block);
          bool keep_going = recurse(remaining, block);
          blocks_.pop_back();
          if (!keep_going) return false;
        }
      }
      // Step to the lexicographic predecessor among vectors bounded by rest.
      std::size_t i = width;
      while (i > 0) {
        --i;
        if (block[i] > 0) {
          --block[i];
          for (std::size_t j = i + 1; j < width; ++j) block[j] = rest[j];
          break;
        }
        if (i == 0) return true;
      }
    }
    return true;
  }

  bool emit() {
    WeightedPartition out;
    std::int64_t coefficient = 1;
    for (std::size_t l = 0; l < whole_.size(); ++l) {
      int left = whole_[l];
      for (const Counts& block : blocks_) {
        coefficient *= binomial(left, block[l]);
        left -= block[l];
      }
    }
    for (std::size_t i = 0; i < blocks_.size();) {
      std::size_t j = i;
      while (j < blocks_.size() && blocks_[j] == blocks_[i]) ++j;
      coefficient /= factorial(static_cast<int>(j - i));
      i = j;
    }
    out.coefficient = coefficient;
    out.partition.blocks.reserve(blocks_.size());
    for (const Counts& block : blocks_) {
      std::vector<Label> flat;
      for (std::size_t l = 0; l < block.size(); ++l) flat.insert(flat.end(), block[l], labels_[l]);
      out.partition.blocks.emplace_back(flat);
    }
    return visit_(out);
  }

  const Visitor<WeightedPartition>& visit_;
  std::vector<Label> labels_;
  Counts whole_;
  std::vector<Counts> blocks_;
};

template <class T>
std::vector<T> collect(void (*walk)(const Multiset&, const Visitor<T>&), const Multiset& a) {
  std::vector<T> out;
  walk(a, [&out](const T& item) {
    out.push_back(item);
    return true;
  });
  return out;
}

}  // namespace

Multiset Partition::total() const {
  return std::accumulate(blocks.begin(), blocks.end(), Multiset{});
}

std::int64_t factorial(int n) {
  std::int64_t result = 1;
  for (int i = 2; i <= n; ++i) result *= i;
  return result;
}

void for_each_partition(const Multiset& a, const Visitor<WeightedPartition>& visit) {
  if (a.empty()) {
    throw DomainError("partitions_of requires a nonempty multiset");
  }
  PartitionWalker(a, visit).run();
}

std::vector<WeightedPartition> partitions_of(const Multiset& a) { return collect(&for_each_partition, a); }

void for_each_sub_multiset(const Multiset& a, const Visitor<Multiset>& visit) {
  const auto& elements = a.elements();
  Counts sub(elements.size(), 0);
  while (true) {
    std::vector<Label> flat;
    for (std::size_t i = 0; i < elements.size(); ++i) flat.insert(flat.end(), sub[i], elements[i].first);
    if (!visit(Multiset(flat))) return;
    std::size_t i = 0;
    while (i < elements.size() && sub[i] == elements[i].second) {
      sub[i] = 0;
      ++i;
    }
    if (i == elements.size()) return;
    ++sub[i];
  }
}

std::vector<Multiset> sub_multisets_of(const Multiset& a) { return collect(&for_each_sub_multiset, a); }

void for_each_ordered_bipartition(const Multiset& a, const Visitor<OrderedBipartition>& visit) {
  for_each_sub_multiset(a, [&](const Multiset& first) {
    std::int64_t weight = 1;
    for (auto [label, mult] : a.elements()) weight *= binomial(mult, first.multiplicity(label));
    return visit(OrderedBipartition{first, a - first, weight});
  });
}

std::vector<OrderedBipartition> ordered_bipartitions_of(const Multiset& a) {
  return collect(&for_each_ordered_bipartition, a);
}

void for_each_permutation(int k, const Visitor<std::vector<int>>& visit) {
  if (k < 0) throw DomainError("permutation length must be non-negative");
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 1);
  do {
    if (!visit(order)) return;
  } while (std::next_permutation(order.begin(), order.end()));
}

std::vector<std::vector<int>> permutations_of(int k) {
  std::vector<std::vector<int>> out;
  for_each_permutation(k, [&out](const std::vector<int>& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace momentalg
