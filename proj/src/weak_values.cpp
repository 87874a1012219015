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

#include <algorithm>
#include <numeric>

#include "momentalg/combinatorics.hpp"
#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

// exp(rate * t * H) for hermitian H through one eigendecomposition.
class Propagator {
 public:
  Propagator(const Matrix& hamiltonian, Complex rate) : rate_(rate) {
    if (!is_hermitian(hamiltonian)) throw DomainError("system Hamiltonian is not hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
    basis_ = solver.eigenvectors();
    energies_ = solver.eigenvalues();
  }

  Vector apply(double t, const Vector& v) const {
    Vector w = basis_.adjoint() * v;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) *= std::exp(rate_ * t * energies_(i));
    return basis_ * w;
  }

  Matrix apply(double t, const Matrix& m) const {
    Matrix w = basis_.adjoint() * m;
    for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) *= std::exp(rate_ * t * energies_(i));
    return basis_ * w;
  }

 private:
  Complex rate_;
  Matrix basis_;
  Eigen::VectorXd energies_;
};

void check_labels(const Multiset& a, std::size_t count) {
  if (a.max_label() > static_cast<Label>(count)) {
    throw DomainError("multiset " + a.to_string() + " names an observable beyond the " + std::to_string(count) +
                      " supplied");
  }
}

Lattice lattice_for(const Multiset& a, std::size_t count) {
  check_labels(a, count);
  return Lattice(static_cast<int>(count), a.counts(static_cast<int>(count)));
}

void check_amplitude(Complex amplitude, double floor) {
  if (!(std::abs(amplitude) > floor)) throw SingularPostselection(std::abs(amplitude), floor);
}

// Uniform point on the simplex {t_i >= 0, sum t_i = total} via normalized exponential spacings.
std::vector<double> simplex_times(Rng& rng, std::size_t parts, double total) {
  std::vector<double> t(parts);
  for (auto& x : t) x = -std::log1p(-rng.uniform());
  const double sum = std::accumulate(t.begin(), t.end(), 0.0);
  for (auto& x : t) x *= total / sum;
  return t;
}

class RunningMean {
 public:
  void add(Complex x) {
    ++count_;
    const Complex delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    spread_ += std::real(std::conj(delta) * (x - mean_));
  }
  MonteCarloEstimate result() const {
    const double variance = count_ > 1 ? spread_ / (count_ - 1) : 0.0;
    return {mean_, std::sqrt(variance / static_cast<double>(count_)), static_cast<int>(count_)};
  }

 private:
  long count_ = 0;
  Complex mean_{};
  double spread_ = 0.0;
};

JetMatrix linear_jet(const Lattice& shape, const Matrix& constant, std::span<const Matrix> terms, Complex scale) {
  JetMatrix m = JetMatrix::constant(shape, constant);
  for (std::size_t k = 0; k < terms.size() && static_cast<int>(k) < shape.ground_size(); ++k) {
    // A label with cap 0 is never differentiated, so its term cannot contribute.
    if (shape.caps()[k] == 0) continue;
    m.coeff(Multiset{static_cast<Label>(k + 1)}) = scale * terms[k];
  }
  return m;
}

}  // namespace

ComplexMMap sequential_weak_value_mmap(const SequentialSystem& system, double floor) {
  const std::size_t n = system.observables.size();
  if (system.unitaries.size() != n + 1) throw ShapeError("need n + 1 unitaries for n observables");
  const Lattice lattice = Lattice::subsets(static_cast<int>(n));
  auto amplitude = [&](std::size_t index) {
    const auto inserted = lattice.counts(index);
    Vector v = system.initial;
    for (std::size_t k = 0; k <= n; ++k) {
      v = system.unitaries[k] * v;
      if (k < n && inserted[k] > 0) v = system.observables[k] * v;
    }
    return system.final_state.dot(v);
  };
  const Complex denominator = amplitude(0);
  check_amplitude(denominator, floor);
  ComplexMMap out(lattice);
  for (std::size_t i = 0; i < lattice.size(); ++i) out[i] = amplitude(i) / denominator;
  return out;
}

Complex simultaneous_weak_value(const Vector& initial, const Vector& final_state, std::span<const Matrix> observables,
                                const Multiset& a, double floor) {
  check_labels(a, observables.size());
  const Complex denominator = final_state.dot(initial);
  check_amplitude(denominator, floor);
  const std::vector<Label> labels = a.flatten();
  Complex sum{};
  long orderings = 0;
  for_each_permutation(static_cast<int>(labels.size()), [&](const std::vector<int>& order) {
    Vector v = initial;
    for (int position : order) v = observables[labels[position - 1] - 1] * v;
    sum += final_state.dot(v);
    ++orderings;
    return true;
  });
  return sum / static_cast<double>(orderings) / denominator;
}

Jet evolution_amplitude(const EvolutionSystem& system, const Lattice& shape) {
  const Matrix drift = Complex(0.0, -system.tau) * system.hamiltonian;
  const JetMatrix propagator =
      jet_matrix_exp(linear_jet(shape, drift, system.observables, Complex(0.0, -1.0)));
  return sandwich(system.final_state, propagator, system.initial);
}

ComplexMMap script_D_mmap(const EvolutionSystem& system, const Lattice& shape, double floor) {
  if (shape.ground_size() > static_cast<int>(system.observables.size())) {
    throw ShapeError("lattice has more labels than observables");
  }
  const Jet amplitude = evolution_amplitude(system, shape);
  const Complex denominator = amplitude.constant_part();
  check_amplitude(denominator, floor);
  ComplexMMap out(shape);
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const Multiset m = shape.multiset(i);
    out[i] = std::pow(Complex(0.0, 1.0), m.size()) * extract_derivative(amplitude, m) / denominator;
  }
  return out;
}

Complex script_D(const EvolutionSystem& system, const Multiset& a, double floor) {
  const Lattice shape = lattice_for(a, system.observables.size());
  const EvolutionSystem trimmed{system.initial, system.final_state, system.hamiltonian, system.tau,
                                std::vector<Matrix>(system.observables.begin(),
                                                    system.observables.begin() + shape.ground_size())};
  return script_D_mmap(trimmed, shape, floor).at(a);
}

Complex evolution_weak_value(const EvolutionSystem& system, std::span<const Label> order,
                             std::span<const double> times, double floor) {
  if (times.size() != order.size() + 1) throw ShapeError("need one more waiting time than insertions");
  const Propagator propagator(system.hamiltonian, Complex(0.0, -1.0));
  const Complex denominator = system.final_state.dot(propagator.apply(system.tau, system.initial));
  check_amplitude(denominator, floor);
  Vector v = propagator.apply(times[0], system.initial);
  for (std::size_t i = 0; i < order.size(); ++i) {
    v = propagator.apply(times[i + 1], Vector(system.observables[order[i] - 1] * v));
  }
  return system.final_state.dot(v) / denominator;
}

MonteCarloEstimate script_D_monte_carlo(const EvolutionSystem& system, const Multiset& a, int samples,
                                        std::uint64_t seed, double floor) {
  if (samples < 1) throw DomainError("need at least one sample");
  check_labels(a, system.observables.size());
  const Propagator propagator(system.hamiltonian, Complex(0.0, -1.0));
  const Complex denominator = system.final_state.dot(propagator.apply(system.tau, system.initial));
  check_amplitude(denominator, floor);
  const std::vector<Label> labels = a.flatten();
  std::vector<int> order(labels.size());
  Rng rng(seed, 4);
  RunningMean mean;
  for (int s = 0; s < samples; ++s) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    const auto times = simplex_times(rng, labels.size() + 1, system.tau);
    Vector v = propagator.apply(times[0], system.initial);
    for (std::size_t i = 0; i < order.size(); ++i) {
      v = propagator.apply(times[i + 1], Vector(system.observables[labels[order[i]] - 1] * v));
    }
    mean.add(system.final_state.dot(v) / denominator);
  }
  return mean.result();
}

Jet partition_function(const ThermalSystem& system, const Lattice& shape) {
  if (system.beta <= 0.0) throw DomainError("beta must be positive");
  const Matrix drift = -system.beta * system.hamiltonian;
  return trace(jet_matrix_exp(linear_jet(shape, drift, system.observables, -1.0)));
}

ComplexMMap thermal_E_mmap(const ThermalSystem& system, const Lattice& shape) {
  if (shape.ground_size() > static_cast<int>(system.observables.size())) {
    throw ShapeError("lattice has more labels than observables");
  }
  const Jet z = partition_function(system, shape);
  ComplexMMap out(shape);
  for (std::size_t i = 0; i < shape.size(); ++i) out[i] = extract_derivative(z, shape.multiset(i)) / z.constant_part();
  return out;
}

Complex thermal_E(const ThermalSystem& system, const Multiset& a) {
  const Lattice shape = lattice_for(a, system.observables.size());
  return thermal_E_mmap(system, shape).at(a);
}

Complex free_energy_susceptibility(const ThermalSystem& system, const Multiset& a) {
  const Lattice shape = lattice_for(a, system.observables.size());
  const Jet free_energy = log(partition_function(system, shape));
  return -extract_derivative(free_energy, a) / system.beta;
}

MonteCarloEstimate thermal_E_monte_carlo(const ThermalSystem& system, const Multiset& a, int samples,
                                         std::uint64_t seed) {
  if (samples < 1) throw DomainError("need at least one sample");
  if (system.beta <= 0.0) throw DomainError("beta must be positive");
  check_labels(a, system.observables.size());
  const Propagator propagator(system.hamiltonian, -1.0);
  const Eigen::Index d = system.hamiltonian.rows();
  const Matrix identity = Matrix::Identity(d, d);
  const Complex z0 = propagator.apply(system.beta, identity).trace();
  const double sign = a.size() % 2 == 0 ? 1.0 : -1.0;
  const std::vector<Label> labels = a.flatten();
  std::vector<int> order(labels.size());
  Rng rng(seed, 4);
  RunningMean mean;
  for (int s = 0; s < samples; ++s) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    const auto times = simplex_times(rng, labels.size() + 1, system.beta);
    Matrix m = propagator.apply(times[0], identity);
    for (std::size_t i = 0; i < order.size(); ++i) {
      m = propagator.apply(times[i + 1], Matrix(system.observables[labels[order[i]] - 1] * m));
    }
    mean.add(sign * m.trace() / z0);
  }
  return mean.result();
}

}  // namespace momentalg
