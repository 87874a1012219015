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

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "momentalg/errors.hpp"
#include "momentalg/multiset.hpp"

namespace momentalg {

using Complex = std::complex<double>;

namespace detail {

template <class Coeff>
struct CoeffOps {
  static Coeff zero_like(const Coeff&) { return Coeff{}; }
  static bool is_zero(const Coeff& c) { return c == Coeff{}; }
  static double max_abs(const Coeff& c) { return std::abs(c); }
  static Coeff adjoint(const Coeff& c) { return std::conj(c); }
};

template <class Scalar, int R, int C>
struct CoeffOps<Eigen::Matrix<Scalar, R, C>> {
  using M = Eigen::Matrix<Scalar, R, C>;
  static M zero_like(const M& m) { return M::Zero(m.rows(), m.cols()); }
  static bool is_zero(const M& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }
  static double max_abs(const M& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
  static M adjoint(const M& m) { return m.adjoint(); }
};

template <class T>
auto evaluate(const T& x) {
  if constexpr (requires { x.eval(); }) {
    return x.eval();
  } else {
    return x;
  }
}

}  // namespace detail

/// Truncated multivariate polynomial in gamma_1..gamma_n with per-variable
/// degree caps. coeff(m) is the coefficient of prod_i gamma_i^{m_i}
/// (monomial convention); extract_derivative converts by multiplying prod m_i!.
/// Coefficients are complex scalars (Jet), vectors (JetVector) or square
/// matrices (JetMatrix); products drop monomials that exceed a cap.
template <class Coeff>
class Series {
 public:
  Series() = default;
  Series(Lattice shape, const Coeff& zero) : shape_(std::move(shape)), coeffs_(shape_.size(), zero) {}

  static Series constant(Lattice shape, const Coeff& value) {
    Series s(std::move(shape), detail::CoeffOps<Coeff>::zero_like(value));
    s.coeffs_[0] = value;
    return s;
  }

  const Lattice& shape() const { return shape_; }
  std::size_t size() const { return coeffs_.size(); }

  const Coeff& operator[](std::size_t index) const { return coeffs_[index]; }
  Coeff& operator[](std::size_t index) { return coeffs_[index]; }
  const Coeff& coeff(const Multiset& m) const { return coeffs_[shape_.index(m)]; }
  Coeff& coeff(const Multiset& m) { return coeffs_[shape_.index(m)]; }
  const Coeff& constant_part() const { return coeffs_[0]; }

  Series& operator+=(const Series& other) {
    check_shape(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }
  Series& operator-=(const Series& other) {
    check_shape(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
  }
  template <class S>
  Series& operator*=(const S& scalar) {
    for (auto& c : coeffs_) c *= scalar;
    return *this;
  }

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator-(Series a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }

  /// Largest coefficient magnitude over every monomial.
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, detail::CoeffOps<Coeff>::max_abs(c));
    return m;
  }

  void check_shape(const Series& other) const {
    if (!(shape_ == other.shape_)) throw ShapeError("series shapes differ");
  }

 private:
  Lattice shape_;
  std::vector<Coeff> coeffs_;
};

using Jet = Series<Complex>;
using JetVector = Series<Eigen::VectorXcd>;
using JetMatrix = Series<Eigen::MatrixXcd>;

/// Truncated product; works for any coefficient pair whose product is defined
/// (scalar*scalar, matrix*matrix, matrix*vector, scalar*matrix).
template <class A, class B>
auto operator*(const Series<A>& lhs, const Series<B>& rhs) {
  using Out = std::decay_t<decltype(detail::evaluate(lhs[0] * rhs[0]))>;
  if (!(lhs.shape() == rhs.shape())) throw ShapeError("series shapes differ");
  const Lattice& shape = lhs.shape();
  Series<Out> out(shape, detail::CoeffOps<Out>::zero_like(detail::evaluate(lhs[0] * rhs[0])));
  std::vector<bool> lhs_nonzero(shape.size()), rhs_nonzero(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    lhs_nonzero[i] = !detail::CoeffOps<A>::is_zero(lhs[i]);
    rhs_nonzero[i] = !detail::CoeffOps<B>::is_zero(rhs[i]);
  }
  for (std::size_t a = 0; a < shape.size(); ++a) {
    for (const auto& split : shape.splits(a)) {
      if (lhs_nonzero[split.first] && rhs_nonzero[split.second]) {
        out[a] += lhs[split.first] * rhs[split.second];
      }
    }
  }
  return out;
}

inline Jet operator*(const Jet& lhs, const Jet& rhs) {
  if (!(lhs.shape() == rhs.shape())) throw ShapeError("series shapes differ");
  Jet out(lhs.shape(), Complex{});
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    Complex sum{};
    for (const auto& split : lhs.shape().splits(a)) sum += lhs[split.first] * rhs[split.second];
    out[a] = sum;
  }
  return out;
}

/// Multiplies every coefficient by a fixed left or right factor.
template <class Coeff, class Factor>
auto scale_left(const Factor& factor, const Series<Coeff>& s) {
  using Out = std::decay_t<decltype(detail::evaluate(factor * s[0]))>;
  Series<Out> out(s.shape(), detail::CoeffOps<Out>::zero_like(detail::evaluate(factor * s[0])));
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = factor * s[i];
  return out;
}

template <class Coeff, class Factor>
auto scale_right(const Series<Coeff>& s, const Factor& factor) {
  using Out = std::decay_t<decltype(detail::evaluate(s[0] * factor))>;
  Series<Out> out(s.shape(), detail::CoeffOps<Out>::zero_like(detail::evaluate(s[0] * factor)));
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * factor;
  return out;
}

/// Jet with value c + x*gamma_label (label in 1..n).
Jet jet_variable(const Lattice& shape, Label label, Complex c = 0.0, Complex x = 1.0);
Jet jet_constant(const Lattice& shape, Complex c);

Jet inverse(const Jet& x);
Jet operator/(const Jet& a, const Jet& b);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet pow(const Jet& x, int k);
Jet conj(const Jet& x);

/// Coefficient of prod gamma^{mult}; DomainError if a exceeds a cap.
Complex extract_coefficient(const Jet& j, const Multiset& a);
/// Mixed partial derivative at gamma = 0: coefficient times prod mult!.
Complex extract_derivative(const Jet& j, const Multiset& a);

/// Conjugate transpose for real gamma: each coefficient block is adjointed.
template <class Coeff>
Series<Coeff> adjoint(const Series<Coeff>& s) {
  Series<Coeff> out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = detail::CoeffOps<Coeff>::adjoint(s[i]);
  return out;
}

JetMatrix jet_identity(const Lattice& shape, Eigen::Index dim);
Jet trace(const JetMatrix& m);
/// <bra| M |ket> as a jet.
Jet sandwich(const Eigen::VectorXcd& bra, const JetMatrix& m, const Eigen::VectorXcd& ket);
/// Inner product <u|v> of jet vectors, conjugating u's coefficients (real gamma).
Jet inner(const JetVector& u, const JetVector& v);
JetMatrix multiply(const Jet& scalar, const JetMatrix& m);

/// Exponential in the truncated ring: scale by 2^-s until the constant block
/// has 1-norm <= 0.5, Taylor to degree 20, square s times.
JetMatrix jet_matrix_exp(const JetMatrix& m);

}  // namespace momentalg
