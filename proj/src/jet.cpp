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

#include "momentalg/jet.hpp"

#include <cmath>

namespace momentalg {

namespace {

constexpr int kTaylorDegree = 20;
constexpr double kScaledNormBound = 0.5;

// x / c - 1 for the constant part c of x: a nilpotent jet.
Jet nilpotent_part(const Jet& x, Complex c) {
  Jet u = x;
  u *= 1.0 / c;
  u[0] = 0.0;
  return u;
}

}  // namespace

Jet jet_constant(const Lattice& shape, Complex c) { return Jet::constant(shape, c); }

Jet jet_variable(const Lattice& shape, Label label, Complex c, Complex x) {
  Jet j = Jet::constant(shape, c);
  j.coeff(Multiset{label}) = x;
  return j;
}

Jet inverse(const Jet& x) {
  const Complex c = x.constant_part();
  if (c == 0.0) throw DomainError("jet inverse needs a nonzero constant part");
  const Jet u = nilpotent_part(x, c);
  const Jet one = jet_constant(x.shape(), 1.0);
  Jet result = one;
  for (int k = x.shape().max_degree(); k >= 1; --k) {
    result = one - u * result;
  }
  result *= 1.0 / c;
  return result;
}

Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

Jet exp(const Jet& x) {
  const Complex c = x.constant_part();
  Jet u = x;
  u[0] = 0.0;
  const Jet one = jet_constant(x.shape(), 1.0);
  Jet result = one;
  for (int k = x.shape().max_degree(); k >= 1; --k) {
    Jet term = u * result;
    term *= 1.0 / k;
    result = one + term;
  }
  result *= std::exp(c);
  return result;
}

Jet log(const Jet& x) {
  const Complex c = x.constant_part();
  if (c == 0.0) throw DomainError("jet log needs a nonzero constant part");
  const Jet u = nilpotent_part(x, c);
  Jet result = jet_constant(x.shape(), std::log(c));
  Jet power = u;
  for (int k = 1; k <= x.shape().max_degree(); ++k) {
    Jet term = power;
    term *= ((k % 2 == 1) ? 1.0 : -1.0) / k;
    result += term;
    power = power * u;
  }
  return result;
}

Jet pow(const Jet& x, int k) {
  if (k < 0) return pow(inverse(x), -k);
  Jet result = jet_constant(x.shape(), 1.0);
  for (int i = 0; i < k; ++i) result = result * x;
  return result;
}

Jet conj(const Jet& x) { return adjoint(x); }

Complex extract_coefficient(const Jet& j, const Multiset& a) { return j.coeff(a); }

Complex extract_derivative(const Jet& j, const Multiset& a) {
  double factor = 1.0;
  for (auto [label, mult] : a.elements()) {
    for (int i = 2; i <= mult; ++i) factor *= i;
  }
  return j.coeff(a) * factor;
}

JetMatrix jet_identity(const Lattice& shape, Eigen::Index dim) {
  return JetMatrix::constant(shape, Eigen::MatrixXcd::Identity(dim, dim));
}

Jet trace(const JetMatrix& m) {
  Jet out(m.shape(), Complex{});
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i].trace();
  return out;
}

Jet sandwich(const Eigen::VectorXcd& bra, const JetMatrix& m, const Eigen::VectorXcd& ket) {
  Jet out(m.shape(), Complex{});
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = bra.dot(m[i] * ket);
  return out;
}

Jet inner(const JetVector& u, const JetVector& v) {
  u.check_shape(v);
  Jet out(u.shape(), Complex{});
  for (std::size_t a = 0; a < u.size(); ++a) {
    Complex sum{};
    for (const auto& split : u.shape().splits(a)) sum += u[split.first].dot(v[split.second]);
    out[a] = sum;
  }
  return out;
}

JetMatrix multiply(const Jet& scalar, const JetMatrix& m) {
  if (!(scalar.shape() == m.shape())) throw ShapeError("series shapes differ");
  const auto rows = m[0].rows();
  JetMatrix out(m.shape(), Eigen::MatrixXcd::Zero(rows, m[0].cols()));
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (const auto& split : m.shape().splits(a)) {
      if (scalar[split.first] != 0.0) out[a] += scalar[split.first] * m[split.second];
    }
  }
  return out;
}

JetMatrix jet_matrix_exp(const JetMatrix& m) {
  const Eigen::Index dim = m[0].rows();
  if (m[0].cols() != dim) throw ShapeError("matrix exponential needs square blocks");
  const double norm = dim == 0 ? 0.0 : m[0].cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
  }
  JetMatrix scaled = m;
  scaled *= std::ldexp(1.0, -squarings);

  // Horner: I + X (I + X/2 (I + X/3 (...))).
  const JetMatrix identity = jet_identity(m.shape(), dim);
  JetMatrix result = identity;
  for (int k = kTaylorDegree; k >= 1; --k) {
    JetMatrix term = scaled * result;
    term *= 1.0 / k;
    result = identity + term;
  }
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

}  // namespace momentalg
