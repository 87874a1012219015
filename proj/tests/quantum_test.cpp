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

#include <gtest/gtest.h>

#include <array>

#include "oracles.hpp"

namespace momentalg {
namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
Matrix pauli_y() { return (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

std::vector<PointerSpec> random_pointers(Rng& rng, int count, int dim) {
  std::vector<PointerSpec> pointers;
  for (int k = 0; k < count; ++k) pointers.push_back({rng.state(dim), rng.hermitian(dim), rng.hermitian(dim)});
  return pointers;
}

SequentialSystem random_sequential(Rng& rng, int dim, int n) {
  SequentialSystem s;
  s.initial = rng.state(dim);
  s.final_state = rng.state(dim);
  for (int k = 0; k <= n; ++k) s.unitaries.push_back(rng.unitary(dim));
  for (int k = 0; k < n; ++k) s.observables.push_back(rng.hermitian(dim));
  return s;
}

// Normalized postselected pointer state at numeric couplings, computed
// with plain matrices and Eigen's exponential.
Matrix numeric_pointer_state(const SequentialSystem& s, const std::vector<PointerSpec>& pointers,
                             const std::vector<double>& gamma) {
  Vector chi = s.initial;
  for (const auto& p : pointers) chi = kron(chi, p.state);
  Eigen::Index pointer_dim = 1;
  for (const auto& p : pointers) pointer_dim *= p.dim();
  const Matrix id = Matrix::Identity(pointer_dim, pointer_dim);
  for (std::size_t k = 0; k < s.unitaries.size(); ++k) {
    chi = kron(s.unitaries[k], id) * chi;
    if (k < pointers.size()) {
      chi = oracle::pade_exp(Complex(0, -gamma[k]) * coupling_term(s.observables[k], pointers, k)) * chi;
    }
  }
  Vector projected = Vector::Zero(pointer_dim);
  for (Eigen::Index i = 0; i < s.final_state.size(); ++i) {
    projected += std::conj(s.final_state(i)) * chi.segment(i * pointer_dim, pointer_dim);
  }
  const Matrix rho = projected * projected.adjoint();
  return rho / rho.trace();
}

TEST(Quantum, KronTraceAndPartialTrace) {
  Rng rng(1);
  const Matrix a = oracle::random_complex(rng, 2, 2), b = oracle::random_complex(rng, 3, 3);
  const Matrix ab = kron(a, b);
  EXPECT_EQ(ab.rows(), 6);
  EXPECT_LE(std::abs(ab(4, 2) - a(1, 0) * b(1, 2)), 1e-15);
  EXPECT_LE(std::abs(trace(ab) - trace(a) * trace(b)), 1e-13);

  const std::array<Eigen::Index, 2> dims{2, 3};
  EXPECT_LE(max_abs(partial_trace(ab, dims, 0) - trace(a) * b), 1e-13);
  EXPECT_LE(max_abs(partial_trace(ab, dims, 1) - trace(b) * a), 1e-13);
  const Matrix c = oracle::random_complex(rng, 2, 2);
  const std::array<Matrix, 3> factors{a, b, c};
  const std::array<Eigen::Index, 3> dims3{2, 3, 2};
  EXPECT_LE(max_abs(partial_trace(kron(factors), dims3, 1) - trace(b) * kron(a, c)), 1e-12);
  EXPECT_THROW(partial_trace(ab, dims, 2), ShapeError);

  const Vector u = rng.state(2), v = rng.state(3);
  EXPECT_LE(max_abs(Matrix(kron(u, v)) - Matrix(kron(Matrix(u), Matrix(v)))), 0.0);
  EXPECT_LE(max_abs(dagger(a) - a.adjoint()), 0.0);
}

TEST(Quantum, PauliExponentials) {
  const double theta = 0.83;
  for (const Matrix& sigma : {pauli_x(), pauli_y(), pauli_z()}) {
    const Matrix expected = std::cos(theta) * Matrix::Identity(2, 2) - Complex(0, std::sin(theta)) * sigma;
    EXPECT_LE(max_abs(matrix_exp(sigma, Complex(0, -theta)) - expected), 1e-14);
  }
}

TEST(Quantum, MatrixExpMatchesEigendecomposition) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed, 50);
    const Matrix h = rng.hermitian(8);
    EXPECT_LE(max_abs(matrix_exp(h, Complex(0, -1.7)) - oracle::hermitian_exp(h, Complex(0, -1.7))), 1e-10);
    EXPECT_LE(max_abs(matrix_exp(h, -0.9) - oracle::hermitian_exp(h, -0.9)), 1e-10);
  }
}

TEST(Quantum, RandomObjectsAreValidAndDeterministic) {
  Rng first(42, 3), second(42, 3), other(42, 4);
  const Matrix u = first.unitary(4);
  EXPECT_TRUE(is_unitary(u));
  EXPECT_LE(max_abs(u - second.unitary(4)), 0.0);
  EXPECT_GT(max_abs(u - other.unitary(4)), 1e-3);
  EXPECT_TRUE(is_hermitian(first.hermitian(5)));
  EXPECT_LE(std::abs(first.state(6).norm() - 1.0), 1e-14);

  const std::array<int, 2> dims{2, 3};
  const RandomInstance a = random_instance(7, dims), b = random_instance(7, dims);
  ASSERT_EQ(a.states.size(), 2u);
  EXPECT_LE(max_abs(a.unitaries[1] - b.unitaries[1]), 0.0);
  EXPECT_EQ(a.states[1].size(), 3);
}

TEST(Quantum, OperatorValidation) {
  EXPECT_NO_THROW(QOperator(pauli_y(), QOperator::Property::hermitian));
  EXPECT_THROW(QOperator(pauli_x() + Complex(0, 1) * pauli_z(), QOperator::Property::hermitian), DomainError);
  EXPECT_THROW(QOperator(2.0 * pauli_x(), QOperator::Property::unitary), DomainError);
  EXPECT_THROW(QOperator(Matrix::Zero(2, 3)), ShapeError);
  EXPECT_THROW(normalized(Vector::Zero(3)), DomainError);
}

TEST(Quantum, PostselectedStateMatchesFiniteDifferences) {
  Rng rng(8);
  const SequentialSystem s = random_sequential(rng, 3, 2);
  const auto pointers = random_pointers(rng, 2, 2);
  const JetMatrix rho = postselected_pointer_state(s, pointers, Lattice::subsets(2), {true, true});

  const Matrix base = numeric_pointer_state(s, pointers, {0, 0});
  EXPECT_LE(max_abs(rho[0] - base), 1e-12);
  EXPECT_LE(max_abs(base - kron(Matrix(pointers[0].state * pointers[0].state.adjoint()),
                                Matrix(pointers[1].state * pointers[1].state.adjoint()))),
            1e-12);

  const double h = 1e-5;
  const Matrix d1 = (numeric_pointer_state(s, pointers, {h, 0}) - numeric_pointer_state(s, pointers, {-h, 0})) / (2 * h);
  const Matrix d2 = (numeric_pointer_state(s, pointers, {0, h}) - numeric_pointer_state(s, pointers, {0, -h})) / (2 * h);
  EXPECT_LE(max_abs(rho.coeff({1}) - d1), 1e-8);
  EXPECT_LE(max_abs(rho.coeff({2}) - d2), 1e-8);

  const double k = 1e-3;
  const Matrix d12 = (numeric_pointer_state(s, pointers, {k, k}) - numeric_pointer_state(s, pointers, {k, -k}) -
                      numeric_pointer_state(s, pointers, {-k, k}) + numeric_pointer_state(s, pointers, {-k, -k})) /
                     (4 * k * k);
  EXPECT_LE(max_abs(rho.coeff({1, 2}) - d12), 1e-5);
}

TEST(Quantum, DensityAndPureRoutesAgree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, 60);
    const SequentialSystem s = random_sequential(rng, 2, 3);
    const auto pointers = random_pointers(rng, 3, 2);
    const Lattice shape(3, {2, 1, 2});
    const std::vector<bool> mask{true, false, true};
    const JetMatrix density = postselected_pointer_state(s, pointers, shape, mask);
    const JetMatrix pure = pure_density(postselected_pointer_vector(s, pointers, shape, mask));
    for (std::size_t i = 0; i < shape.size(); ++i) EXPECT_LE(max_abs(density[i] - pure[i]), 1e-11);
    // An uncoupled pointer contributes no dependence on its variable.
    EXPECT_LE(max_abs(density.coeff({2})), 1e-14);
  }
}

TEST(Quantum, PointerStateIsHermitianNormalizedAndPositive) {
  Rng rng(12);
  const SequentialSystem s = random_sequential(rng, 2, 2);
  const auto pointers = random_pointers(rng, 2, 3);
  const JetMatrix rho = postselected_pointer_state(s, pointers, Lattice::subsets(2), {true, true});
  EXPECT_LE(std::abs(rho[0].trace() - 1.0), 1e-13);
  for (std::size_t i = 1; i < rho.size(); ++i) {
    EXPECT_LE(std::abs(rho[i].trace()), 1e-13);
    EXPECT_TRUE(is_hermitian(rho[i], 1e-12));
  }
  const Matrix numeric = numeric_pointer_state(s, pointers, {0.4, -0.7});
  Eigen::SelfAdjointEigenSolver<Matrix> solver(numeric);
  EXPECT_GE(solver.eigenvalues().minCoeff(), -1e-12);
}

TEST(Quantum, ZeroCapDropsThatPointersVariable) {
  Rng rng(2);
  const SequentialSystem s = random_sequential(rng, 2, 2);
  const auto pointers = random_pointers(rng, 2, 2);
  const JetMatrix truncated = postselected_pointer_state(s, pointers, Lattice(2, {1, 0}), {true, true});
  const JetMatrix full = postselected_pointer_state(s, pointers, Lattice::subsets(2), {true, true});
  EXPECT_LE(max_abs(truncated[0] - full[0]), 1e-14);
  EXPECT_LE(max_abs(truncated.coeff({1}) - full.coeff({1})), 1e-14);
  EXPECT_THROW(postselected_pointer_state(s, pointers, Lattice::subsets(1), {true, true}), ShapeError);
}

TEST(Quantum, OrthogonalPostselectionIsSingular) {
  SequentialSystem s;
  s.initial = (Vector(2) << 1, 0).finished();
  s.final_state = (Vector(2) << 0, 1).finished();
  s.unitaries = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  s.observables = {pauli_x()};
  const std::vector<PointerSpec> pointers{{(Vector(2) << 1, 0).finished(), pauli_x(), pauli_z()}};
  EXPECT_THROW(postselected_pointer_state(s, pointers, Lattice::subsets(1), {true}), SingularPostselection);
}

TEST(Quantum, EvolvedStateMatchesFiniteDifference) {
  Rng rng(14);
  EvolutionSystem s{rng.state(2), rng.state(2), rng.hermitian(2), 0.8, {rng.hermitian(2)}};
  const auto pointers = random_pointers(rng, 1, 3);
  const JetMatrix rho = evolved_pointer_state(s, pointers, Lattice::subsets(1));
  auto at = [&](double gamma) {
    const Matrix generator = Complex(0, -s.tau) * kron(s.hamiltonian, Matrix(Matrix::Identity(3, 3))) +
                             Complex(0, -gamma) * coupling_term(s.observables[0], pointers, 0);
    const Vector chi = oracle::pade_exp(generator) * kron(s.initial, pointers[0].state);
    Vector projected = Vector::Zero(3);
    for (Eigen::Index i = 0; i < 2; ++i) projected += std::conj(s.final_state(i)) * chi.segment(3 * i, 3);
    const Matrix out = projected * projected.adjoint();
    return Matrix(out / out.trace());
  };
  const double h = 1e-5;
  EXPECT_LE(max_abs(rho[0] - at(0.0)), 1e-12);
  EXPECT_LE(max_abs(rho[1] - (at(h) - at(-h)) / (2 * h)), 1e-8);
}

TEST(Quantum, ThermalStateMatchesFiniteDifference) {
  Rng rng(15);
  ThermalSystem s{rng.hermitian(3), 0.7, {rng.hermitian(3)}};
  const std::vector<PointerSpec> pointers{{Vector(), rng.hermitian(2), rng.hermitian(2)}};
  const JetMatrix rho = thermal_pointer_state(s, pointers, Lattice::subsets(1));
  const std::array<Eigen::Index, 2> dims{3, 2};
  auto at = [&](double gamma) {
    const Matrix gibbs = oracle::hermitian_exp(
        s.beta * kron(s.hamiltonian, Matrix(Matrix::Identity(2, 2))) + gamma * coupling_term(s.observables[0], pointers, 0),
        -1.0);
    const Matrix reduced = partial_trace(gibbs, dims, 0);
    return Matrix(reduced / reduced.trace());
  };
  const double h = 1e-5;
  EXPECT_LE(max_abs(rho[0] - Matrix::Identity(2, 2) / 2.0), 1e-12);
  EXPECT_LE(max_abs(rho[1] - (at(h) - at(-h)) / (2 * h)), 1e-8);
}

TEST(Quantum, ReadoutProductUsesPowers) {
  Rng rng(16);
  const auto pointers = random_pointers(rng, 2, 2);
  const Matrix r = readout_product(pointers, {1, 1, 2});
  EXPECT_LE(max_abs(r - kron(Matrix(pointers[0].readout * pointers[0].readout), pointers[1].readout)), 1e-14);
  EXPECT_THROW(readout_product(pointers, {3}), DomainError);
}

}  // namespace
}  // namespace momentalg
