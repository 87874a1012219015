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

#include <cstdint>
#include <span>

#include "momentalg/moment_algebra.hpp"
#include "momentalg/quantum.hpp"

namespace momentalg {

struct MonteCarloEstimate {
  Complex estimate;
  double standard_error = 0.0;
  int samples = 0;
};

/// A_w(a) for every subset a of the n observables: A_j is inserted right after
/// U_j exactly when j is in a, normalized by <psi_f|U_{n+1}..U_1|psi_i>.
ComplexMMap sequential_weak_value_mmap(const SequentialSystem& system,
                                       double floor = kDefaultPostselectionFloor);

/// (1/k!) sum over orderings of the k elements of a of <psi_f|A..A|psi_i> / <psi_f|psi_i>.
/// Labels index `observables` (1-based) and may repeat.
Complex simultaneous_weak_value(const Vector& initial, const Vector& final_state,
                                std::span<const Matrix> observables, const Multiset& a,
                                double floor = kDefaultPostselectionFloor);

/// <psi_f| exp(-i tau H_S - i sum_j gamma_j A_j) |psi_i> on the given jet shape.
Jet evolution_amplitude(const EvolutionSystem& system, const Lattice& shape);

/// D(a) = i^{|a|} d_a <psi_f|exp(-i tau H_S - i sum gamma_j A_j)|psi_i> / <psi_f|e^{-i tau H_S}|psi_i>,
/// derivative convention in gamma, for every multiset of the lattice.
ComplexMMap script_D_mmap(const EvolutionSystem& system, const Lattice& shape,
                          double floor = kDefaultPostselectionFloor);
Complex script_D(const EvolutionSystem& system, const Multiset& a, double floor = kDefaultPostselectionFloor);

/// <psi_f| e^{-i H t_{k+1}} A_{o_k} .. e^{-i H t_2} A_{o_1} e^{-i H t_1} |psi_i> / <psi_f|e^{-i tau H}|psi_i>
/// for observable labels `order` (earliest first) and k + 1 waiting times.
Complex evolution_weak_value(const EvolutionSystem& system, std::span<const Label> order,
                             std::span<const double> times, double floor = kDefaultPostselectionFloor);

/// Samples a uniform ordering of a and uniform simplex times summing to tau and
/// averages evolution_weak_value; the mean estimates D(a).
MonteCarloEstimate script_D_monte_carlo(const EvolutionSystem& system, const Multiset& a, int samples,
                                        std::uint64_t seed, double floor = kDefaultPostselectionFloor);

/// tr exp(-beta H_S - sum_j gamma_j A_j) on the given jet shape.
Jet partition_function(const ThermalSystem& system, const Lattice& shape);

/// E(a) = d_a tr exp(-beta H_S - sum gamma_j A_j) / tr exp(-beta H_S), derivative convention.
ComplexMMap thermal_E_mmap(const ThermalSystem& system, const Lattice& shape);
Complex thermal_E(const ThermalSystem& system, const Multiset& a);

/// d_a F at zero field, F = -(1/beta) log tr exp(-beta H_S - sum gamma_j A_j).
Complex free_energy_susceptibility(const ThermalSystem& system, const Multiset& a);

/// Imaginary-time counterpart of script_D_monte_carlo: (-1)^{|a|} times the mean of
/// tr(e^{-H t_{k+1}} A .. A e^{-H t_1}) / tr e^{-beta H} over orderings and simplex times summing to beta.
MonteCarloEstimate thermal_E_monte_carlo(const ThermalSystem& system, const Multiset& a, int samples,
                                         std::uint64_t seed);

}  // namespace momentalg
