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
#include <map>
#include <string>
#include <vector>

#include "momentalg/moment_algebra.hpp"
#include "momentalg/quantum.hpp"
#include "momentalg/weak_values.hpp"

namespace momentalg {

enum class Scenario {
  sequential_per_subset,
  sequential_all_coupled,
  simultaneous_evolution,
  thermal,
  multiset,
  generating_function,
};

std::string scenario_name(Scenario s);
/// Accepts the long names and the CLI aliases thm1, thm2, thm3, thm4, thermal, multiset, genfun.
Scenario parse_scenario(const std::string& name);

/// Finite joint distribution: outcome rows of n values with probabilities.
struct ProbabilityTable {
  std::vector<std::vector<double>> outcomes;
  std::vector<double> probabilities;

  int variables() const { return outcomes.empty() ? 0 : static_cast<int>(outcomes.front().size()); }
  /// Throws DomainError unless probabilities are non-negative and sum to 1 within 1e-12.
  void validate() const;
  /// <prod_k X_k^{m_k}>.
  double moment(const Multiset& m) const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::sequential_all_coupled;
  std::uint64_t seed = 0;
  std::vector<PointerSpec> pointers;
  SequentialSystem sequential;
  EvolutionSystem evolution;
  ThermalSystem thermal;
  ProbabilityTable table;
  /// Multisets to check; empty means every nonempty subset (or, for the
  /// generating-function scenario, every multiset up to `max_order`).
  std::vector<Multiset> targets;
  int max_order = 4;
  double tolerance = 1e-9;
  double postselection_floor = kDefaultPostselectionFloor;
  /// Monte-Carlo samples for the D(a) cross-check of the evolution scenario; 0 disables it.
  int mc_samples = 0;
};

struct RandomConfigOptions {
  int system_dim = 2;
  int pointers = 2;
  int pointer_dim = 2;
  bool zero_hamiltonian = false;
  double tau = 1.0;
  double beta = 1.0;
  int variables = 3;
  int mc_samples = 0;
  double tolerance = 1e-9;
};

/// Deterministic per seed. Random objects come from Rng(seed, stream) with
/// streams 0 system states, 1 unitaries and Hamiltonians, 2 observables,
/// 3 pointers, 4 Monte Carlo, 5 probability tables.
ExperimentConfig random_config(Scenario scenario, std::uint64_t seed, const RandomConfigOptions& options = {});

/// One comparison. pass is abs_error <= tolerance.
struct CheckRecord {
  Multiset subset;
  std::string check;
  Complex lhs;
  Complex rhs;
  Complex xi;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> extras;
};

enum class ReportStatus { ok, singular };

struct VerificationReport {
  Scenario scenario = Scenario::sequential_all_coupled;
  std::uint64_t seed = 0;
  int system_dim = 0;
  std::vector<int> pointer_dims;
  ReportStatus status = ReportStatus::ok;
  std::string message;
  std::vector<CheckRecord> records;
  std::map<std::string, double> notes;
  double runtime_seconds = 0.0;

  bool passed() const;
  double max_error() const;
  void add(const Multiset& subset, std::string check, Complex lhs, Complex rhs, Complex xi, double tolerance,
           std::map<std::string, double> extras = {});
};

/// Moments <prod_{j in b} r_j> of a jet-valued pointer state for every subset b.
JetMMap pointer_moments(const JetMatrix& state, std::span<const PointerSpec> pointers);

/// Pointer moments of the configured scenario. In per-subset mode the entry for b
/// comes from its own experiment in which exactly the pointers of b are coupled;
/// every other mode couples all pointers once and reads all entries from one state.
JetMMap pointer_moment_mmap(const ExperimentConfig& config);

/// 2 (-i)^{|a|} (prod <r s> - prod <r><s>), expectations in the pointer states.
Complex xi_difference_of_products(std::span<const PointerSpec> pointers, const Multiset& a);
/// 2 (-i)^{|a|} prod (<r s> - <r><s>).
Complex xi_product_of_differences(std::span<const PointerSpec> pointers, const Multiset& a);
/// prod (tr(r s)/d - tr(r) tr(s)/d^2); normalized when true, raw traces otherwise.
Complex xi_thermal(std::span<const PointerSpec> pointers, const Multiset& a, bool normalized);

VerificationReport verify_theorem1(const ExperimentConfig& config);
VerificationReport verify_theorem3(const ExperimentConfig& config);
VerificationReport verify_theorem4(const ExperimentConfig& config);
VerificationReport verify_thermal(const ExperimentConfig& config);
VerificationReport verify_multiset(const ExperimentConfig& config);
VerificationReport verify_generating_function(const ExperimentConfig& config);

/// Dispatches on config.scenario; singular postselection yields a report with status singular.
VerificationReport verify(const ExperimentConfig& config);

}  // namespace momentalg
