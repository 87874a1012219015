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
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "momentalg/jet.hpp"

namespace momentalg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kDefaultPostselectionFloor = 1e-8;

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::span<const Matrix> factors);
Vector kron(const Vector& a, const Vector& b);
Vector kron(std::span<const Vector> factors);

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }
inline Complex trace(const Matrix& m) { return m.trace(); }

/// Traces out factor `subsystem` of a tensor product with the given factor dimensions.
Matrix partial_trace(const Matrix& m, std::span<const Eigen::Index> dims, std::size_t subsystem);

/// exp(t * m) by scaling and squaring.
Matrix matrix_exp(const Matrix& m, Complex t = 1.0);

bool is_hermitian(const Matrix& m, double tol = kHermitianTolerance);
bool is_unitary(const Matrix& m, double tol = kUnitaryTolerance);
Vector normalized(const Vector& v);

/// A dense operator together with the property its producer asserted.
/// Construction validates the assertion and throws DomainError if it fails.
class QOperator {
 public:
  enum class Property { general, hermitian, unitary };

  explicit QOperator(Matrix m, Property property = Property::general);

  const Matrix& matrix() const { return matrix_; }
  Property property() const { return property_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
  Property property_;
};

/// A finite-dimensional probe: initial state, coupling operator s and readout r.
struct PointerSpec {
  Vector state;
  Matrix coupling;
  Matrix readout;

  Eigen::Index dim() const { return coupling.rows(); }
  /// Throws DomainError unless s and r are hermitian and the state is normalized
  /// (a pointer without a state is allowed: thermal pointers start maximally mixed).
  void validate() const;
};

/// System ⊗ pointer_1 ⊗ ... ⊗ pointer_n. Pointer k couples through s_k ⊗ A_k.
struct SequentialSystem {
  Vector initial;
  Vector final_state;
  /// U_1 .. U_{n+1}; pointer k couples between U_k and U_{k+1}.
  std::vector<Matrix> unitaries;
  std::vector<Matrix> observables;
};

/// Simultaneous coupling over a window tau with system Hamiltonian H_S.
struct EvolutionSystem {
  Vector initial;
  Vector final_state;
  Matrix hamiltonian;
  double tau = 1.0;
  std::vector<Matrix> observables;
};

struct ThermalSystem {
  Matrix hamiltonian;
  double beta = 1.0;
  std::vector<Matrix> observables;
};

/// Seeded random source. Each (seed, stream) pair gives an independent
/// mt19937_64 seeded through std::seed_seq.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

  /// Uniform on the unit sphere: a normalized complex gaussian vector.
  Vector state(Eigen::Index dim);
  /// (G + G†)/2 with complex gaussian G.
  Matrix hermitian(Eigen::Index dim);
  /// Q from the QR factorization of a complex gaussian matrix, columns rephased
  /// so that R has a positive diagonal.
  Matrix unitary(Eigen::Index dim);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

struct RandomInstance {
  std::vector<Vector> states;
  std::vector<Matrix> hermitians;
  std::vector<Matrix> unitaries;
};

/// One state, one hermitian and one unitary per requested dimension.
RandomInstance random_instance(std::uint64_t seed, std::span<const int> dims);

/// Pointer k (1-based) coupling term: A ⊗ 1 ⊗ .. ⊗ s ⊗ .. ⊗ 1 on system ⊗ pointers.
Matrix coupling_term(const Matrix& observable, std::span<const PointerSpec> pointers, std::size_t k);
/// Product of readouts r_j for j in `subset` on the pointer space, identity elsewhere.
Matrix readout_product(std::span<const PointerSpec> pointers, const Multiset& subset);

/// Postselected pointer state of a sequential experiment, density-matrix route:
/// kicks e^{-i gamma_k s_k ⊗ A_k} conjugate the joint state between the unitaries,
/// then <psi_f| . |psi_f> on the system and normalize. Pointer k uses variable
/// gamma_k of `shape`; only pointers with coupled[k] set are kicked.
/// Throws SingularPostselection if |<psi_f|U_{n+1}..U_1|psi_i>| <= floor.
JetMatrix postselected_pointer_state(const SequentialSystem& system, std::span<const PointerSpec> pointers,
                                     const Lattice& shape, const std::vector<bool>& coupled,
                                     double floor = kDefaultPostselectionFloor);

/// Unnormalized postselected pointer vector (<psi_f| ⊗ 1) U_{n+1} K_n .. K_1 U_1 |psi_i>|phi>.
JetVector postselected_pointer_vector(const SequentialSystem& system, std::span<const PointerSpec> pointers,
                                      const Lattice& shape, const std::vector<bool>& coupled);

/// chi chi† / <chi|chi>.
JetMatrix pure_density(const JetVector& chi);

/// Postselected pointer state after e^{-i tau H_S - i sum_k gamma_k s_k ⊗ A_k}.
JetMatrix evolved_pointer_state(const EvolutionSystem& system, std::span<const PointerSpec> pointers,
                                const Lattice& shape, double floor = kDefaultPostselectionFloor);

/// Joint Gibbs state e^{-beta H_S - sum_k gamma_k s_k ⊗ A_k} / tr, reduced to the pointers.
JetMatrix thermal_pointer_state(const ThermalSystem& system, std::span<const PointerSpec> pointers,
                                const Lattice& shape);

}  // namespace momentalg
