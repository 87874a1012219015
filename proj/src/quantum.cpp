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

#include "momentalg/quantum.hpp"

#include <numeric>

#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

Eigen::Index pointer_space_dim(std::span<const PointerSpec> pointers) {
  Eigen::Index dim = 1;
  for (const auto& p : pointers) dim *= p.dim();
  return dim;
}

Matrix pointer_product_state(std::span<const PointerSpec> pointers) {
  Matrix rho = Matrix::Identity(1, 1);
  for (const auto& p : pointers) rho = kron(rho, Matrix(p.state * p.state.adjoint()));
  return rho;
}

// (<f| ⊗ 1) as a P x dP matrix.
Matrix postselection_map(const Vector& final_state, Eigen::Index pointer_dim) {
  return kron(Matrix(final_state.adjoint()), Matrix::Identity(pointer_dim, pointer_dim));
}

JetMatrix project_and_normalize(const JetMatrix& joint, const Vector& final_state, Eigen::Index pointer_dim) {
  const Matrix map = postselection_map(final_state, pointer_dim);
  const JetMatrix projected = scale_right(scale_left(map, joint), Matrix(map.adjoint()));
  return multiply(inverse(trace(projected)), projected);
}

void check_postselection(Complex amplitude, double floor) {
  if (!(std::abs(amplitude) > floor)) throw SingularPostselection(std::abs(amplitude), floor);
}

void check_system(std::span<const Matrix> observables, std::span<const PointerSpec> pointers,
                  const Lattice& shape, Eigen::Index system_dim) {
  if (observables.size() != pointers.size()) throw ShapeError("need one observable per pointer");
  if (shape.ground_size() < static_cast<int>(pointers.size())) {
    throw ShapeError("jet shape has fewer variables than pointers");
  }
  for (const auto& a : observables) {
    if (a.rows() != system_dim || a.cols() != system_dim) throw ShapeError("observable dimension mismatch");
  }
  for (const auto& p : pointers) p.validate();
}

// M with constant block `constant` and block `scale * term_k` on variable k+1.
JetMatrix linear_jet(const Lattice& shape, const Matrix& constant, std::span<const Matrix> terms, Complex scale) {
  JetMatrix m = JetMatrix::constant(shape, constant);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].size() == 0 || shape.caps()[k] == 0) continue;
    m.coeff(Multiset{static_cast<Label>(k + 1)}) = scale * terms[k];
  }
  return m;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vector kron(std::span<const Vector> factors) {
  Vector out = Vector::Ones(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const Eigen::Index> dims, std::size_t subsystem) {
  if (subsystem >= dims.size()) throw ShapeError("partial_trace: no such subsystem");
  const Eigen::Index total = std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
  if (m.rows() != total || m.cols() != total) throw ShapeError("partial_trace: dimension mismatch");
  const Eigen::Index traced = dims[subsystem];
  const Eigen::Index inner = std::accumulate(dims.begin() + subsystem + 1, dims.end(), Eigen::Index{1},
                                             std::multiplies<>());
  const Eigen::Index outer = total / (traced * inner);
  const Eigen::Index kept = outer * inner;
  Matrix out = Matrix::Zero(kept, kept);
  for (Eigen::Index o1 = 0; o1 < outer; ++o1) {
    for (Eigen::Index o2 = 0; o2 < outer; ++o2) {
      for (Eigen::Index t = 0; t < traced; ++t) {
        out.block(o1 * inner, o2 * inner, inner, inner) +=
            m.block((o1 * traced + t) * inner, (o2 * traced + t) * inner, inner, inner);
      }
    }
  }
  return out;
}

Matrix matrix_exp(const Matrix& m, Complex t) {
  return jet_matrix_exp(JetMatrix::constant(Lattice(), Matrix(t * m)))[0];
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return m.size() == 0 || (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return m.size() == 0 || (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

Vector normalized(const Vector& v) {
  const double norm = v.norm();
  if (norm == 0.0) throw DomainError("cannot normalize the zero vector");
  return v / norm;
}

QOperator::QOperator(Matrix m, Property property) : matrix_(std::move(m)), property_(property) {
  if (matrix_.rows() != matrix_.cols()) throw ShapeError("operator must be square");
  if (property_ == Property::hermitian && !is_hermitian(matrix_)) {
    throw DomainError("operator flagged hermitian is not hermitian within 1e-12");
  }
  if (property_ == Property::unitary && !is_unitary(matrix_)) {
    throw DomainError("operator flagged unitary is not unitary within 1e-10");
  }
}

void PointerSpec::validate() const {
  if (coupling.rows() != coupling.cols() || readout.rows() != coupling.rows() || readout.cols() != coupling.cols()) {
    throw ShapeError("pointer operators must be square with a common dimension");
  }
  if (!is_hermitian(coupling)) throw DomainError("pointer coupling operator is not hermitian");
  if (!is_hermitian(readout)) throw DomainError("pointer readout operator is not hermitian");
  if (state.size() != 0) {
    if (state.size() != coupling.rows()) throw ShapeError("pointer state dimension mismatch");
    if (std::abs(state.norm() - 1.0) > 1e-12) throw DomainError("pointer state is not normalized");
  }
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

Vector Rng::state(Eigen::Index dim) {
  Vector v(dim);
  for (auto& x : v) x = Complex(normal(), normal());
  return normalized(v);
}

Matrix Rng::hermitian(Eigen::Index dim) {
  Matrix g(dim, dim);
  for (auto& x : g.reshaped()) x = Complex(normal(), normal());
  return (g + g.adjoint()) / 2.0;
}

Matrix Rng::unitary(Eigen::Index dim) {
  Matrix g(dim, dim);
  for (auto& x : g.reshaped()) x = Complex(normal(), normal());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

RandomInstance random_instance(std::uint64_t seed, std::span<const int> dims) {
  RandomInstance out;
  Rng states(seed, 0), hermitians(seed, 1), unitaries(seed, 2);
  for (int d : dims) {
    if (d < 1) throw DomainError("dimensions must be at least 1");
    out.states.push_back(states.state(d));
    out.hermitians.push_back(hermitians.hermitian(d));
    out.unitaries.push_back(unitaries.unitary(d));
  }
  return out;
}

Matrix coupling_term(const Matrix& observable, std::span<const PointerSpec> pointers, std::size_t k) {
  Matrix out = observable;
  for (std::size_t j = 0; j < pointers.size(); ++j) {
    out = kron(out, j == k ? pointers[j].coupling : Matrix(Matrix::Identity(pointers[j].dim(), pointers[j].dim())));
  }
  return out;
}

Matrix readout_product(std::span<const PointerSpec> pointers, const Multiset& subset) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t j = 0; j < pointers.size(); ++j) {
    const int power = subset.multiplicity(static_cast<Label>(j + 1));
    Matrix factor = Matrix::Identity(pointers[j].dim(), pointers[j].dim());
    for (int p = 0; p < power; ++p) factor = factor * pointers[j].readout;
    out = kron(out, factor);
  }
  if (subset.max_label() > static_cast<Label>(pointers.size())) throw DomainError("subset names a missing pointer");
  return out;
}

JetMatrix postselected_pointer_state(const SequentialSystem& system, std::span<const PointerSpec> pointers,
                                     const Lattice& shape, const std::vector<bool>& coupled, double floor) {
  const std::size_t n = pointers.size();
  const Eigen::Index d = system.initial.size();
  check_system(system.observables, pointers, shape, d);
  if (system.unitaries.size() != n + 1) throw ShapeError("need n + 1 unitaries for n pointers");
  if (coupled.size() != n) throw ShapeError("coupling mask must have one entry per pointer");

  Vector amplitude_path = system.initial;
  for (const auto& u : system.unitaries) amplitude_path = u * amplitude_path;
  check_postselection(system.final_state.dot(amplitude_path), floor);

  const Eigen::Index pointer_dim = pointer_space_dim(pointers);
  const Matrix pointer_identity = Matrix::Identity(pointer_dim, pointer_dim);
  const Matrix rho0 = kron(Matrix(system.initial * system.initial.adjoint()), pointer_product_state(pointers));
  JetMatrix rho = JetMatrix::constant(shape, rho0);
  for (std::size_t k = 0; k <= n; ++k) {
    const Matrix u = kron(system.unitaries[k], pointer_identity);
    rho = scale_right(scale_left(u, rho), Matrix(u.adjoint()));
    if (k == n || !coupled[k] || shape.caps()[k] == 0) continue;
    JetMatrix generator = JetMatrix::constant(shape, Matrix::Zero(d * pointer_dim, d * pointer_dim));
    generator.coeff(Multiset{static_cast<Label>(k + 1)}) =
        Complex(0.0, -1.0) * coupling_term(system.observables[k], pointers, k);
    const JetMatrix kick = jet_matrix_exp(generator);
    rho = kick * rho * adjoint(kick);
  }
  return project_and_normalize(rho, system.final_state, pointer_dim);
}

JetVector postselected_pointer_vector(const SequentialSystem& system, std::span<const PointerSpec> pointers,
                                      const Lattice& shape, const std::vector<bool>& coupled) {
  const std::size_t n = pointers.size();
  const Eigen::Index d = system.initial.size();
  check_system(system.observables, pointers, shape, d);
  if (system.unitaries.size() != n + 1) throw ShapeError("need n + 1 unitaries for n pointers");
  if (coupled.size() != n) throw ShapeError("coupling mask must have one entry per pointer");

  const Eigen::Index pointer_dim = pointer_space_dim(pointers);
  const Matrix pointer_identity = Matrix::Identity(pointer_dim, pointer_dim);
  Vector start = system.initial;
  for (const auto& p : pointers) start = kron(start, p.state);
  JetVector chi = JetVector::constant(shape, start);
  for (std::size_t k = 0; k <= n; ++k) {
    chi = scale_left(kron(system.unitaries[k], pointer_identity), chi);
    if (k == n || !coupled[k] || shape.caps()[k] == 0) continue;
    JetMatrix generator = JetMatrix::constant(shape, Matrix::Zero(d * pointer_dim, d * pointer_dim));
    generator.coeff(Multiset{static_cast<Label>(k + 1)}) =
        Complex(0.0, -1.0) * coupling_term(system.observables[k], pointers, k);
    chi = jet_matrix_exp(generator) * chi;
  }
  return scale_left(postselection_map(system.final_state, pointer_dim), chi);
}

JetMatrix pure_density(const JetVector& chi) {
  const Lattice& shape = chi.shape();
  const Eigen::Index dim = chi[0].size();
  JetMatrix outer(shape, Matrix::Zero(dim, dim));
  for (std::size_t a = 0; a < shape.size(); ++a) {
    for (const auto& split : shape.splits(a)) outer[a] += chi[split.first] * chi[split.second].adjoint();
  }
  return multiply(inverse(trace(outer)), outer);
}

JetMatrix evolved_pointer_state(const EvolutionSystem& system, std::span<const PointerSpec> pointers,
                                const Lattice& shape, double floor) {
  const Eigen::Index d = system.initial.size();
  check_system(system.observables, pointers, shape, d);
  if (system.hamiltonian.rows() != d) throw ShapeError("hamiltonian dimension mismatch");
  check_postselection(system.final_state.dot(matrix_exp(system.hamiltonian, Complex(0.0, -system.tau)) * system.initial),
                      floor);

  const Eigen::Index pointer_dim = pointer_space_dim(pointers);
  std::vector<Matrix> terms;
  for (std::size_t k = 0; k < pointers.size(); ++k) terms.push_back(coupling_term(system.observables[k], pointers, k));
  const Matrix drift = Complex(0.0, -system.tau) * kron(system.hamiltonian, Matrix(Matrix::Identity(pointer_dim, pointer_dim)));
  const JetMatrix propagator = jet_matrix_exp(linear_jet(shape, drift, terms, Complex(0.0, -1.0)));
  const Matrix rho0 = kron(Matrix(system.initial * system.initial.adjoint()), pointer_product_state(pointers));
  const JetMatrix rho = scale_right(propagator, rho0) * adjoint(propagator);
  return project_and_normalize(rho, system.final_state, pointer_dim);
}

JetMatrix thermal_pointer_state(const ThermalSystem& system, std::span<const PointerSpec> pointers,
                                const Lattice& shape) {
  const Eigen::Index d = system.hamiltonian.rows();
  check_system(system.observables, pointers, shape, d);
  const Eigen::Index pointer_dim = pointer_space_dim(pointers);
  std::vector<Matrix> terms;
  for (std::size_t k = 0; k < pointers.size(); ++k) terms.push_back(coupling_term(system.observables[k], pointers, k));
  const Matrix drift = -system.beta * kron(system.hamiltonian, Matrix(Matrix::Identity(pointer_dim, pointer_dim)));
  const JetMatrix gibbs = jet_matrix_exp(linear_jet(shape, drift, terms, -1.0));
  JetMatrix reduced(shape, Matrix::Zero(pointer_dim, pointer_dim));
  for (std::size_t a = 0; a < shape.size(); ++a) {
    for (Eigen::Index s = 0; s < d; ++s) {
      reduced[a] += gibbs[a].block(s * pointer_dim, s * pointer_dim, pointer_dim, pointer_dim);
    }
  }
  return multiply(inverse(trace(reduced)), reduced);
}

}  // namespace momentalg
