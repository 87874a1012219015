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

#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <vector>

#include "momentalg/combinatorics.hpp"
#include "momentalg/errors.hpp"
#include "momentalg/jet.hpp"
#include "momentalg/multiset.hpp"

namespace momentalg {

inline constexpr double kDefaultTolerance = 1e-10;

/// Coefficient-ring adapter. The algebra is instantiated at complex scalars
/// and at Jets; both provide the same handful of operations through this trait.
template <class R>
struct RingTraits;

template <>
struct RingTraits<Complex> {
  static Complex zero_like(const Complex&) { return 0.0; }
  static Complex one_like(const Complex&) { return 1.0; }
  static Complex constant_part(const Complex& x) { return x; }
  static Complex inverse(const Complex& x) {
    if (x == 0.0) throw DomainError("value at the empty set is not invertible");
    return 1.0 / x;
  }
  static Complex exp(const Complex& x) { return std::exp(x); }
  static Complex log(const Complex& x) {
    if (x == 0.0) throw DomainError("log of zero");
    return std::log(x);
  }
  static double distance(const Complex& a, const Complex& b) { return std::abs(a - b); }
};

template <>
struct RingTraits<Jet> {
  static Jet zero_like(const Jet& x) { return Jet(x.shape(), 0.0); }
  static Jet one_like(const Jet& x) { return jet_constant(x.shape(), 1.0); }
  static Complex constant_part(const Jet& x) { return x.constant_part(); }
  static Jet inverse(const Jet& x) {
    if (x.constant_part() == 0.0) throw DomainError("value at the empty set is not invertible");
    return momentalg::inverse(x);
  }
  static Jet exp(const Jet& x) { return momentalg::exp(x); }
  static Jet log(const Jet& x) { return momentalg::log(x); }
  static double distance(const Jet& a, const Jet& b) { return (a - b).max_abs(); }
};

/// Running sum in fixed insertion order; Neumaier-compensated for complex values.
template <class R>
class Summation {
 public:
  explicit Summation(const R& zero) : total_(zero) {}
  void add(const R& x) { total_ += x; }
  R value() const { return total_; }

 private:
  R total_;
};

template <>
class Summation<Complex> {
 public:
  explicit Summation(const Complex& = 0.0) {}
  void add(const Complex& x) {
    add_part(sum_re_, comp_re_, x.real());
    add_part(sum_im_, comp_im_, x.imag());
  }
  Complex value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

/// An M-map: a ring value for every multiset of the lattice (missing = zero).
/// Entries follow the derivative convention: f(a) stands for the formal
/// derivative d_a f, which fixes the binomial weights of the multiset product.
template <class R>
class MMap {
 public:
  using value_type = R;

  MMap() = default;
  MMap(Lattice lattice, const R& zero) : lattice_(std::move(lattice)), entries_(lattice_.size(), zero) {}
  explicit MMap(Lattice lattice)
    requires std::is_same_v<R, Complex>
      : MMap(std::move(lattice), Complex{}) {}

  const Lattice& lattice() const { return lattice_; }
  int ground_size() const { return lattice_.ground_size(); }
  std::size_t size() const { return entries_.size(); }

  const R& operator[](std::size_t index) const { return entries_[index]; }
  R& operator[](std::size_t index) { return entries_[index]; }
  const R& at(const Multiset& a) const { return entries_[lattice_.index(a)]; }
  R& at(const Multiset& a) { return entries_[lattice_.index(a)]; }
  const R& empty_value() const { return entries_[0]; }

  MMap& operator+=(const MMap& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }
  MMap& operator-=(const MMap& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }
  template <class S>
  MMap& operator*=(const S& scalar) {
    for (auto& e : entries_) e *= scalar;
    return *this;
  }
  friend MMap operator+(MMap a, const MMap& b) { return a += b; }
  friend MMap operator-(MMap a, const MMap& b) { return a -= b; }
  friend MMap operator-(MMap a) {
    a *= -1.0;
    return a;
  }

  void check_same_shape(const MMap& other) const {
    if (!(lattice_ == other.lattice_)) {
      throw ShapeError("M-maps live on different lattices (ground set or caps differ)");
    }
  }

 private:
  Lattice lattice_;
  std::vector<R> entries_;
};

using ComplexMMap = MMap<Complex>;
using JetMMap = MMap<Jet>;

/// Applies fn to every entry, producing an M-map over the same lattice.
template <class R, class Fn>
auto map_entries(const MMap<R>& f, Fn&& fn) {
  using S = std::decay_t<decltype(fn(f[0]))>;
  MMap<S> out(f.lattice(), fn(f[0]));
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

template <class R>
MMap<R> scalar_mmap(const R& alpha, const Lattice& lattice) {
  MMap<R> out(lattice, RingTraits<R>::zero_like(alpha));
  out[0] = alpha;
  return out;
}

inline ComplexMMap scalar_mmap(Complex alpha, int n) { return scalar_mmap(alpha, Lattice::subsets(n)); }

/// The identity 1*: one at the empty set, zero elsewhere.
template <class R>
MMap<R> identity_mmap(const Lattice& lattice, const R& one) {
  return scalar_mmap(one, lattice);
}

inline ComplexMMap identity_mmap(const Lattice& lattice) { return scalar_mmap(Complex{1.0}, lattice); }
inline ComplexMMap identity_mmap(int n) { return identity_mmap(Lattice::subsets(n)); }

/// (f*g)(a) = sum over ordered splits (a1, a2) of weight * f(a1) g(a2).
template <class R>
MMap<R> convolve(const MMap<R>& f, const MMap<R>& g) {
  f.check_same_shape(g);
  const Lattice& lattice = f.lattice();
  MMap<R> out(lattice, RingTraits<R>::zero_like(f[0]));
  for (std::size_t a = 0; a < lattice.size(); ++a) {
    Summation<R> sum(RingTraits<R>::zero_like(f[0]));
    for (const auto& split : lattice.splits(a)) {
      R term = f[split.first] * g[split.second];
      if (split.weight != 1.0) term *= split.weight;
      sum.add(term);
    }
    out[a] = sum.value();
  }
  return out;
}

namespace detail {

// (F*f)(a) = sum over partitions p of a of coefficient * F^(|p|)(f(∅)) * prod_{c in p} f(c),
// given derivatives[k] = F^(k)(f(∅)). Terms are grouped by block count and
// the groups are added in descending block-count order.
template <class R>
MMap<R> partition_sum(const MMap<R>& f, const std::vector<R>& derivatives) {
  const Lattice& lattice = f.lattice();
  const R zero = RingTraits<R>::zero_like(f[0]);
  MMap<R> out(lattice, zero);
  out[0] = derivatives[0];
  for (std::size_t a = 1; a < lattice.size(); ++a) {
    const Multiset whole = lattice.multiset(a);
    std::vector<Summation<R>> by_count(static_cast<std::size_t>(whole.size()) + 1, Summation<R>(zero));
    for_each_partition(whole, [&](const WeightedPartition& wp) {
      const auto& blocks = wp.partition.blocks;
      R product = f[lattice.index(blocks[0])];
      for (std::size_t i = 1; i < blocks.size(); ++i) product = product * f[lattice.index(blocks[i])];
      if (wp.coefficient != 1) product *= static_cast<double>(wp.coefficient);
      by_count[blocks.size()].add(product);
      return true;
    });
    Summation<R> total(zero);
    for (std::size_t k = by_count.size() - 1; k >= 1; --k) {
      total.add(derivatives[k] * by_count[k].value());
    }
    out[a] = total.value();
  }
  return out;
}

template <class R>
R power_of(const R& base, int k) {
  R result = RingTraits<R>::one_like(base);
  for (int i = 0; i < k; ++i) result = result * base;
  return result;
}

}  // namespace detail

/// Scalar function with derivatives: order-indexed evaluator F(order, x).
template <class R>
using DerivativeEvaluator = std::function<R(int order, const R& x)>;

/// (F*f)(a) = d_a F(f) by the combinatorial chain rule.
template <class R>
MMap<R> apply_fstar(const DerivativeEvaluator<R>& F, const MMap<R>& f) {
  std::vector<R> derivatives;
  for (int k = 0; k <= f.lattice().max_degree(); ++k) derivatives.push_back(F(k, f[0]));
  return detail::partition_sum(f, derivatives);
}

/// The cumulant log* f. Requires f(∅) invertible.
template <class R>
MMap<R> log_star(const MMap<R>& f) {
  const R inv = RingTraits<R>::inverse(f[0]);
  std::vector<R> derivatives{RingTraits<R>::log(f[0])};
  R inv_power = inv;
  double signed_factorial = 1.0;  // (k-1)! (-1)^(k-1)
  for (int k = 1; k <= f.lattice().max_degree(); ++k) {
    R d = inv_power;
    d *= signed_factorial;
    derivatives.push_back(d);
    inv_power = inv_power * inv;
    signed_factorial *= -static_cast<double>(k);
  }
  return detail::partition_sum(f, derivatives);
}

/// The anticumulant exp* f.
template <class R>
MMap<R> exp_star(const MMap<R>& f) {
  const R e = RingTraits<R>::exp(f[0]);
  std::vector<R> derivatives(static_cast<std::size_t>(f.lattice().max_degree()) + 1, e);
  return detail::partition_sum(f, derivatives);
}

/// The convolution inverse f^{-1*}. Requires f(∅) invertible.
template <class R>
MMap<R> inverse_star(const MMap<R>& f) {
  const R inv = RingTraits<R>::inverse(f[0]);
  std::vector<R> derivatives;
  R inv_power = inv;
  double signed_factorial = 1.0;  // k! (-1)^k
  for (int k = 0; k <= f.lattice().max_degree(); ++k) {
    R d = inv_power;
    d *= signed_factorial;
    derivatives.push_back(d);
    inv_power = inv_power * inv;
    signed_factorial *= -static_cast<double>(k + 1);
  }
  return detail::partition_sum(f, derivatives);
}

template <class R>
struct SeriesResult {
  MMap<R> sum;
  /// The last term added, entrywise: the per-entry truncation delta.
  MMap<R> last_term;
};

/// Partial sum f - f*f/2 + f*f*f/3 - ... with `depth` terms, which tends to
/// log*(1* + f). Requires |f(∅)| < 1 (constant part for jets).
template <class R>
SeriesResult<R> log1p_series(const MMap<R>& f, int depth) {
  if (depth < 1) throw DomainError("series depth must be at least 1");
  if (std::abs(RingTraits<R>::constant_part(f[0])) >= 1.0) {
    throw DomainError("log series diverges: |f(empty)| >= 1");
  }
  MMap<R> power = f;
  MMap<R> sum = f;
  MMap<R> term = f;
  for (int k = 2; k <= depth; ++k) {
    power = convolve(power, f);
    term = power;
    term *= ((k % 2 == 1) ? 1.0 : -1.0) / k;
    sum += term;
  }
  return {std::move(sum), std::move(term)};
}

/// Shrinks the lattice; every new cap must be at most the old one.
template <class R>
MMap<R> restrict_caps(const MMap<R>& f, const std::vector<int>& caps) {
  Lattice target(f.ground_size(), caps);
  for (int i = 0; i < f.ground_size(); ++i) {
    if (caps[i] > f.lattice().caps()[i]) throw ShapeError("restrict_caps can only lower caps");
  }
  MMap<R> out(target, RingTraits<R>::zero_like(f[0]));
  for (std::size_t i = 0; i < target.size(); ++i) out[i] = f.at(target.multiset(i));
  return out;
}

/// The raising operator: (d_i* f)(a) = f(a + {i}). The result lives on the
/// lattice with cap_i lowered by one so every entry is defined.
template <class R>
MMap<R> raise(Label i, const MMap<R>& f) {
  if (i < 1 || i > f.ground_size()) throw DomainError("raise: label outside the ground set");
  std::vector<int> caps = f.lattice().caps();
  if (caps[i - 1] == 0) throw DomainError("raise: cap of label " + std::to_string(i) + " exceeded");
  --caps[i - 1];
  Lattice target(f.ground_size(), caps);
  MMap<R> out(target, RingTraits<R>::zero_like(f[0]));
  for (std::size_t idx = 0; idx < target.size(); ++idx) out[idx] = f.at(target.multiset(idx).with(i));
  return out;
}

/// Largest entrywise distance over the whole lattice.
template <class R>
double max_distance(const MMap<R>& f, const MMap<R>& g) {
  f.check_same_shape(g);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, RingTraits<R>::distance(f[i], g[i]));
  return worst;
}

template <class R>
bool approx_equal(const MMap<R>& f, const MMap<R>& g, double tol = kDefaultTolerance) {
  return max_distance(f, g) <= tol;
}

/// True iff f(c) = f(c ∩ A) f(c ∩ B) for every c, where {A, B} partitions 1..n.
template <class R>
bool is_factorizing(const MMap<R>& f, const Multiset& A, const Multiset& B, double tol = kDefaultTolerance) {
  const int n = f.ground_size();
  if (!A.is_set() || !B.is_set()) throw DomainError("factorization cut must consist of plain sets");
  for (Label label = 1; label <= n; ++label) {
    if ((A.multiplicity(label) > 0) == (B.multiplicity(label) > 0)) {
      throw DomainError("{A, B} is not a bipartition of the ground set");
    }
  }
  if (A.max_label() > n || B.max_label() > n) throw DomainError("{A, B} is not a bipartition of the ground set");
  const Lattice& lattice = f.lattice();
  for (std::size_t c = 0; c < lattice.size(); ++c) {
    const Multiset whole = lattice.multiset(c);
    const R product = f.at(whole.restricted_to(A)) * f.at(whole.restricted_to(B));
    if (RingTraits<R>::distance(f[c], product) > tol) return false;
  }
  return true;
}

}  // namespace momentalg
