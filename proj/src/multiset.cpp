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

#include "momentalg/multiset.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

double binomial(int n, int k) {
  double result = 1.0;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

}  // namespace

Multiset::Multiset(std::initializer_list<Label> labels) { canonicalize(std::vector<Label>(labels)); }

Multiset::Multiset(std::span<const Label> labels) {
  canonicalize(std::vector<Label>(labels.begin(), labels.end()));
}

void Multiset::canonicalize(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  for (Label label : labels) {
    if (label <= 0) {
      throw DomainError("multiset labels must be positive, got " + std::to_string(label));
    }
    if (!elements_.empty() && elements_.back().first == label) {
      ++elements_.back().second;
    } else {
      elements_.emplace_back(label, 1);
    }
  }
  size_ = static_cast<int>(labels.size());
}

Multiset Multiset::from_counts(std::span<const int> counts) {
  Multiset result;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      throw DomainError("negative multiplicity");
    }
    if (counts[i] > 0) {
      result.elements_.emplace_back(static_cast<Label>(i + 1), counts[i]);
      result.size_ += counts[i];
    }
  }
  return result;
}

int Multiset::multiplicity(Label label) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), label,
                             [](const Element& e, Label l) { return e.first < l; });
  return (it != elements_.end() && it->first == label) ? it->second : 0;
}

bool Multiset::is_set() const {
  return std::all_of(elements_.begin(), elements_.end(), [](const Element& e) { return e.second == 1; });
}

std::vector<Label> Multiset::flatten() const {
  std::vector<Label> out;
  out.reserve(size_);
  for (auto [label, mult] : elements_) {
    out.insert(out.end(), mult, label);
  }
  return out;
}

std::vector<int> Multiset::counts(int n) const {
  std::vector<int> out(n, 0);
  for (auto [label, mult] : elements_) {
    if (label > n) {
      throw DomainError("label " + std::to_string(label) + " outside ground set of size " + std::to_string(n));
    }
    out[label - 1] = mult;
  }
  return out;
}

Multiset Multiset::operator+(const Multiset& other) const {
  std::vector<Label> all = flatten();
  std::vector<Label> rhs = other.flatten();
  all.insert(all.end(), rhs.begin(), rhs.end());
  return Multiset(std::span<const Label>(all));
}

Multiset Multiset::operator-(const Multiset& other) const {
  if (!includes(other)) {
    throw DomainError(other.to_string() + " is not a sub-multiset of " + to_string());
  }
  Multiset result;
  for (auto [label, mult] : elements_) {
    int left = mult - other.multiplicity(label);
    if (left > 0) {
      result.elements_.emplace_back(label, left);
      result.size_ += left;
    }
  }
  return result;
}

bool Multiset::includes(const Multiset& other) const {
  return std::all_of(other.elements_.begin(), other.elements_.end(),
                     [this](const Element& e) { return multiplicity(e.first) >= e.second; });
}

Multiset Multiset::restricted_to(const Multiset& labels) const {
  Multiset result;
  for (auto [label, mult] : elements_) {
    if (labels.multiplicity(label) > 0) {
      result.elements_.emplace_back(label, mult);
      result.size_ += mult;
    }
  }
  return result;
}

Multiset Multiset::with(Label label) const {
  std::vector<Label> all = flatten();
  all.push_back(label);
  return Multiset(std::span<const Label>(all));
}

std::string Multiset::to_string() const {
  std::string out = "[";
  bool first = true;
  for (Label label : flatten()) {
    if (!first) out += ",";
    out += std::to_string(label);
    first = false;
  }
  return out + "]";
}

std::strong_ordering operator<=>(const Multiset& a, const Multiset& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  return a.flatten() <=> b.flatten();
}

Multiset parse_multiset(const std::string& text) {
  std::string body;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) body += c;
  }
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    throw DomainError("malformed multiset '" + text + "', expected e.g. [1,1,3]");
  }
  body = body.substr(1, body.size() - 2);
  std::vector<Label> labels;
  std::stringstream stream(body);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) throw DomainError("malformed multiset '" + text + "'");
    std::size_t used = 0;
    int value = std::stoi(item, &used);
    if (used != item.size()) throw DomainError("malformed multiset '" + text + "'");
    labels.push_back(value);
  }
  return Multiset(std::span<const Label>(labels));
}

struct Lattice::Tables {
  std::vector<std::size_t> strides;
  std::vector<int> counts;  // size_ * ground_size, row-major
  std::vector<int> degrees;
  std::vector<std::size_t> split_offsets;
  std::vector<Split> splits;
};

Lattice::Lattice(int ground_size, std::vector<int> caps)
    : ground_size_(ground_size), caps_(std::move(caps)), size_(1) {
  if (ground_size < 0 || static_cast<int>(caps_.size()) != ground_size) {
    throw ShapeError("lattice needs one cap per label");
  }
  auto tables = std::make_shared<Tables>();
  tables->strides.resize(ground_size);
  for (int i = 0; i < ground_size; ++i) {
    if (caps_[i] < 0) throw ShapeError("caps must be non-negative");
    tables->strides[i] = size_;
    size_ *= static_cast<std::size_t>(caps_[i] + 1);
  }
  const auto n = static_cast<std::size_t>(ground_size);
  tables->counts.assign(size_ * n, 0);
  tables->degrees.assign(size_, 0);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    std::size_t rest = idx;
    int degree = 0;
    for (std::size_t i = 0; i < n; ++i) {
      int c = static_cast<int>(rest % static_cast<std::size_t>(caps_[i] + 1));
      rest /= static_cast<std::size_t>(caps_[i] + 1);
      tables->counts[idx * n + i] = c;
      degree += c;
    }
    tables->degrees[idx] = degree;
  }
  // Sub-multisets b <= a via a mixed-radix counter bounded by a's counts.
  tables->split_offsets.reserve(size_ + 1);
  std::vector<int> sub(n);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    tables->split_offsets.push_back(tables->splits.size());
    const int* whole = &tables->counts[idx * n];
    std::fill(sub.begin(), sub.end(), 0);
    while (true) {
      std::size_t b = 0;
      double weight = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        b += static_cast<std::size_t>(sub[i]) * tables->strides[i];
        weight *= binomial(whole[i], sub[i]);
      }
      tables->splits.push_back({b, idx - b, weight});
      std::size_t i = 0;
      while (i < n && sub[i] == whole[i]) {
        sub[i] = 0;
        ++i;
      }
      if (i == n) break;
      ++sub[i];
    }
  }
  tables->split_offsets.push_back(tables->splits.size());
  tables_ = std::move(tables);
}

Lattice Lattice::subsets(int ground_size) { return Lattice(ground_size, std::vector<int>(ground_size, 1)); }

int Lattice::max_degree() const { return std::accumulate(caps_.begin(), caps_.end(), 0); }

bool Lattice::multilinear() const {
  return std::all_of(caps_.begin(), caps_.end(), [](int c) { return c <= 1; });
}

bool Lattice::contains(const Multiset& m) const {
  for (auto [label, mult] : m.elements()) {
    if (label > ground_size_ || mult > caps_[label - 1]) return false;
  }
  return true;
}

std::size_t Lattice::index(const Multiset& m) const {
  std::size_t idx = 0;
  for (auto [label, mult] : m.elements()) {
    if (label > ground_size_) {
      throw DomainError("label " + std::to_string(label) + " outside ground set of size " +
                        std::to_string(ground_size_));
    }
    if (mult > caps_[label - 1]) {
      throw DomainError("multiplicity " + std::to_string(mult) + " of label " + std::to_string(label) +
                        " exceeds cap " + std::to_string(caps_[label - 1]));
    }
    idx += static_cast<std::size_t>(mult) * tables_->strides[label - 1];
  }
  return idx;
}

Multiset Lattice::multiset(std::size_t index) const { return Multiset::from_counts(counts(index)); }

std::span<const int> Lattice::counts(std::size_t index) const {
  const auto n = static_cast<std::size_t>(ground_size_);
  return {tables_->counts.data() + index * n, n};
}

int Lattice::degree(std::size_t index) const { return tables_->degrees[index]; }

std::span<const Lattice::Split> Lattice::splits(std::size_t index) const {
  const auto begin = tables_->split_offsets[index];
  const auto end = tables_->split_offsets[index + 1];
  return {tables_->splits.data() + begin, end - begin};
}

}  // namespace momentalg
