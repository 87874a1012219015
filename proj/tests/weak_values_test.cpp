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

#include "momentalg/weak_values.hpp"

#include <gtest/gtest.h>

#include <array>

#include "oracles.hpp"

namespace momentalg {
namespace {

SequentialSystem random_sequential(Rng& rng, int dim, int n) {
  SequentialSystem s;
  s.initial = rng.state(dim);
  s.final_state = rng.state(dim);
  for (int k = 0; k <= n; ++k) s.unitaries.push_back(rng.unitary(dim));
  for (int k = 0; k < n; ++k) s.observables.push_back(rng.hermitian(dim));
  return s;
}

EvolutionSystem random_evolution(Rng& rng, int dim, int n, double tau) {
  EvolutionSystem s{rng.state(dim), rng.state(dim), rng.hermitian(dim), tau, {}};
  for (int k = 0; k < n; ++k) s.observables.push_back(rng.hermitian(dim));
  return s;
}

ThermalSystem random_thermal(Rng& rng, int dim, int n, double beta) {
  ThermalSystem s{rng.hermitian(dim), beta, {}};
  for (int k = 0; k < n; ++k) s.observables.push_back(rng.hermitian(dim));
  return s;
}

// <f| e^{-i t_last H} A_{k} ... A_{1} e^{-i t_0 H} |i> / <f|e^{-i tau H}|i> from eigen-based exponentials.
Complex direct_evolution_weak_value(const EvolutionSystem& s, const std::vector<int>& order,
                                    const std::vector<double>& times) {
  Vector v = oracle::hermitian_exp(s.hamiltonian, Complex(0, -times[0])) * s.initial;
  for (std::size_t i = 0; i < order.size(); ++i) {
    v = oracle::hermitian_exp(s.hamiltonian, Complex(0, -times[i + 1])) * (s.observables[order[i] - 1] * v);
  }
  return s.final_state.dot(v) / s.final_state.dot(oracle::hermitian_exp(s.hamiltonian, Complex(0, -s.tau)) * s.initial);
}

// Second mixed derivative of tr exp(X + g1 Y1 + g2 Y2) at zero for hermitian X,
// written with divided differences of exp over the spectrum of X.
Complex trace_exp_second_derivative(const Matrix& x, const Matrix& y1, const Matrix& y2) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x);
  const Matrix& v = solver.eigenvectors();
  const Matrix a = v.adjoint() * y1 * v, b = v.adjoint() * y2 * v;
  const auto& e = solver.eigenvalues();
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double gap = e(j) - e(i);
      const double divided = std::abs(gap) < 1e-9 ? std::exp(e(i)) : (std::exp(e(j)) - std::exp(e(i))) / gap;
      sum += a(i, j) * b(j, i) * divided;
    }
  }
  return sum;
}

TEST(SequentialWeakValue, MatchesDirectProductAtFourPointers) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, 70);
    const SequentialSystem s = random_sequential(rng, 3, 4);
    const ComplexMMap aw = sequential_weak_value_mmap(s);
    EXPECT_LE(std::abs(aw.at({2, 4}) - oracle::direct_sequential_weak_value(s, {2, 4})), 1e-12);
    EXPECT_LE(std::abs(aw.at({1, 2, 3, 4}) - oracle::direct_sequential_weak_value(s, {1, 2, 3, 4})), 1e-12);
    EXPECT_LE(std::abs(aw.at({}) - 1.0), 1e-15);
  }
}

TEST(SequentialWeakValue, EigenstateGivesEigenvalue) {
  Rng rng(3);
  SequentialSystem s = random_sequential(rng, 3, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.observables[0]);
  s.initial = solver.eigenvectors().col(1);
  s.unitaries[0] = Matrix::Identity(3, 3);
  EXPECT_LE(std::abs(sequential_weak_value_mmap(s).at({1}) - solver.eigenvalues()(1)), 1e-12);
}

TEST(SequentialWeakValue, IdentityInsertionIsTransparent) {
  Rng rng(4);
  SequentialSystem s = random_sequential(rng, 2, 3);
  s.observables[1] = Matrix::Identity(2, 2);
  const ComplexMMap aw = sequential_weak_value_mmap(s);
  EXPECT_LE(std::abs(aw.at({1, 2, 3}) - aw.at({1, 3})), 1e-12);
  EXPECT_LE(std::abs(aw.at({2})), 1.0 + 1e-12);
  EXPECT_LE(std::abs(aw.at({2}) - 1.0), 1e-12);
}

TEST(SequentialWeakValue, GlobalPhasesCancel) {
  Rng rng(5);
  const SequentialSystem s = random_sequential(rng, 2, 2);
  SequentialSystem rotated = s;
  rotated.initial *= std::polar(1.0, 0.7);
  rotated.final_state *= std::polar(1.0, -2.1);
  rotated.unitaries[1] *= std::polar(1.0, 1.3);
  EXPECT_LE(max_distance(sequential_weak_value_mmap(s), sequential_weak_value_mmap(rotated)), 1e-12);
}

TEST(SequentialWeakValue, OrthogonalStatesAreSingular) {
  SequentialSystem s;
  s.initial = (Vector(2) << 1, 0).finished();
  s.final_state = (Vector(2) << 0, 1).finished();
  s.unitaries = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  s.observables = {Matrix::Identity(2, 2)};
  EXPECT_THROW(sequential_weak_value_mmap(s), SingularPostselection);
}

TEST(SimultaneousWeakValue, SingletonAndCommutingCases) {
  Rng rng(6);
  const Vector i = rng.state(3), f = rng.state(3);
  const Matrix a = rng.hermitian(3), b = rng.hermitian(3);
  const std::array<Matrix, 2> observables{a, b};
  EXPECT_LE(std::abs(simultaneous_weak_value(i, f, observables, {1}) - f.dot(a * i) / f.dot(i)), 1e-13);
  EXPECT_LE(std::abs(simultaneous_weak_value(i, f, observables, {1, 2}) - f.dot((a * b + b * a) * i) / (2.0 * f.dot(i))),
            1e-13);
  EXPECT_LE(std::abs(simultaneous_weak_value(i, f, observables, {1, 1}) - f.dot(a * a * i) / f.dot(i)), 1e-13);

  const std::array<Matrix, 2> commuting{a, Matrix(a * a + 2.0 * a)};
  EXPECT_LE(std::abs(simultaneous_weak_value(i, f, commuting, {1, 2}) - f.dot(a * commuting[1] * i) / f.dot(i)),
            1e-12);
  EXPECT_THROW(simultaneous_weak_value(i, f, observables, {3}), DomainError);
}

TEST(ScriptD, ZeroHamiltonianGivesSymmetrizedWeakValue) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, 71);
    EvolutionSystem s = random_evolution(rng, 3, 3, 1.4);
    s.hamiltonian.setZero();
    const ComplexMMap d = script_D_mmap(s, Lattice(3, {2, 1, 1}));
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      const Multiset a = d.lattice().multiset(idx);
      EXPECT_LE(std::abs(d[idx] - simultaneous_weak_value(s.initial, s.final_state, s.observables, a)), 1e-12)
          << a.to_string();
    }
  }
}

TEST(ScriptD, FirstOrderMatchesSimpsonQuadrature) {
  Rng rng(7);
  const EvolutionSystem s = random_evolution(rng, 3, 1, 1.3);
  const Complex integral = oracle::simpson(
      [&](double t) { return direct_evolution_weak_value(s, {1}, {t, s.tau - t}); }, 0.0, s.tau, 1000);
  EXPECT_LE(std::abs(script_D(s, {1}) - integral / s.tau), 1e-8);
}

TEST(ScriptD, SecondOrderMatchesNestedQuadrature) {
  Rng rng(8);
  const EvolutionSystem s = random_evolution(rng, 2, 2, 0.9);
  // Work in the eigenbasis of H so every integrand evaluation is diagonal.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.hamiltonian);
  const Matrix& v = solver.eigenvectors();
  const Vector fi = v.adjoint() * s.initial, ff = v.adjoint() * s.final_state;
  const Matrix a1 = v.adjoint() * s.observables[0] * v, a2 = v.adjoint() * s.observables[1] * v;
  auto phase = [&](double t) { return Vector((Complex(0, -t) * solver.eigenvalues().cast<Complex>()).array().exp()); };
  const Complex denominator = ff.dot(phase(s.tau).cwiseProduct(fi));
  auto ordered = [&](const Matrix& first, const Matrix& second, double t0, double t1) {
    const double t2 = s.tau - t0 - t1;
    return ff.dot(phase(t2).cwiseProduct(second * phase(t1).cwiseProduct(first * phase(t0).cwiseProduct(fi))));
  };
  const int intervals = 400;
  const Complex integral = oracle::simpson(
      [&](double t0) {
        return oracle::simpson(
            [&](double t1) { return ordered(a1, a2, t0, t1) + ordered(a2, a1, t0, t1); }, 0.0, s.tau - t0, intervals);
      },
      0.0, s.tau, intervals);
  const Complex expected = integral / (s.tau * s.tau) / denominator;
  EXPECT_LE(std::abs(script_D(s, {1, 2}) - expected), 1e-7);
}

TEST(ScriptD, MonteCarloAgreesWithinThreeStandardErrors) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(seed, 72);
    const EvolutionSystem s = random_evolution(rng, 2, 2, 1.0);
    for (const Multiset& a : {Multiset{1}, Multiset{1, 2}}) {
      const MonteCarloEstimate mc = script_D_monte_carlo(s, a, 100000, seed);
      EXPECT_LE(std::abs(mc.estimate - script_D(s, a)), 3 * mc.standard_error) << a.to_string();
      EXPECT_EQ(mc.samples, 100000);
    }
  }
}

TEST(ScriptD, MonteCarloErrorShrinksWithSamples) {
  Rng rng(9);
  const EvolutionSystem s = random_evolution(rng, 2, 2, 1.5);
  const MonteCarloEstimate small = script_D_monte_carlo(s, {1, 2}, 10000, 1);
  const MonteCarloEstimate large = script_D_monte_carlo(s, {1, 2}, 1000000, 1);
  EXPECT_NEAR(small.standard_error / large.standard_error, 10.0, 1.0);
  const MonteCarloEstimate repeat = script_D_monte_carlo(s, {1, 2}, 10000, 1);
  EXPECT_EQ(small.estimate, repeat.estimate);
}

TEST(ScriptD, SymmetricUnderRelabelling) {
  Rng rng(10);
  const EvolutionSystem s = random_evolution(rng, 3, 2, 0.7);
  EvolutionSystem swapped = s;
  std::swap(swapped.observables[0], swapped.observables[1]);
  EXPECT_LE(std::abs(script_D(s, {1, 2}) - script_D(swapped, {1, 2})), 1e-12);

  EvolutionSystem doubled = s;
  doubled.observables[1] = doubled.observables[0];
  EXPECT_LE(std::abs(script_D(s, {1, 1}) - script_D(doubled, {1, 2})), 1e-12);
}

TEST(Thermal, FirstAndSecondOrderMatchEigenOracles) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, 73);
    const ThermalSystem s = random_thermal(rng, 4, 2, 0.3 + seed * 0.6);
    const Matrix gibbs = oracle::hermitian_exp(s.hamiltonian, -s.beta);
    const Complex z = gibbs.trace();
    EXPECT_LE(std::abs(thermal_E(s, {1}) + (s.observables[0] * gibbs).trace() / z), 1e-12);
    const Complex second = trace_exp_second_derivative(-s.beta * s.hamiltonian, -s.observables[0], -s.observables[1]);
    EXPECT_LE(std::abs(thermal_E(s, {1, 2}) - second / z), 1e-10);
    const Complex repeated = trace_exp_second_derivative(-s.beta * s.hamiltonian, -s.observables[0], -s.observables[0]);
    EXPECT_LE(std::abs(thermal_E(s, {1, 1}) - repeated / z), 1e-10);
  }
}

TEST(Thermal, CumulantsAreFreeEnergyDerivatives) {
  for (double beta : {0.3, 1.0, 3.0}) {
    Rng rng(11, static_cast<std::uint64_t>(beta * 10));
    const ThermalSystem s = random_thermal(rng, 3, 3, beta);
    const ComplexMMap e = thermal_E_mmap(s, Lattice::subsets(3));
    const ComplexMMap cumulant = log_star(e);
    const oracle::Lookup lookup = [&e](const Multiset& m) { return e.at(m); };
    for (std::size_t i = 1; i < e.size(); ++i) {
      const Multiset a = e.lattice().multiset(i);
      const Complex expected = -beta * free_energy_susceptibility(s, a);
      EXPECT_LE(std::abs(cumulant[i] - expected), 1e-10 * (1 + std::abs(expected))) << a.to_string();
      EXPECT_LE(std::abs(oracle::cumulant_by_set_partitions(lookup, a) - expected), 1e-10 * (1 + std::abs(expected)));
    }
  }
}

TEST(Thermal, MonteCarloAgreesWithinThreeStandardErrors) {
  Rng rng(12);
  const ThermalSystem s = random_thermal(rng, 3, 2, 0.8);
  for (const Multiset& a : {Multiset{1}, Multiset{1, 2}, Multiset{2, 2}}) {
    const MonteCarloEstimate mc = thermal_E_monte_carlo(s, a, 100000, 5);
    EXPECT_LE(std::abs(mc.estimate - thermal_E(s, a)), 3 * mc.standard_error + 1e-14) << a.to_string();
  }
  EXPECT_THROW(partition_function(ThermalSystem{s.hamiltonian, -1.0, s.observables}, Lattice::subsets(1)), DomainError);
}

}  // namespace
}  // namespace momentalg
