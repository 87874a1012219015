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

#include "momentalg/experiments.hpp"

#include <algorithm>
#include <chrono>

#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

constexpr double kStructureTolerance = 1e-10;
constexpr double kAgreementTolerance = 1e-10;

Complex expectation(const Vector& state, const Matrix& op) { return state.dot(op * state); }

std::vector<Multiset> nonempty_subsets(int n) {
  const Lattice lattice = Lattice::subsets(n);
  std::vector<Multiset> out;
  for (std::size_t i = 1; i < lattice.size(); ++i) out.push_back(lattice.multiset(i));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Multiset> multisets_up_to(int n, int max_order) {
  std::vector<Multiset> out;
  const Lattice lattice(n, std::vector<int>(n, max_order));
  for (std::size_t i = 1; i < lattice.size(); ++i) {
    if (lattice.degree(i) <= max_order) out.push_back(lattice.multiset(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Multiset> targets_or_subsets(const ExperimentConfig& config, int n) {
  if (config.targets.empty()) return nonempty_subsets(n);
  for (const auto& a : config.targets) {
    if (a.empty() || !a.is_set() || a.max_label() > n) {
      throw DomainError("target " + a.to_string() + " is not a nonempty subset of the pointers");
    }
  }
  return config.targets;
}

std::vector<int> pointer_dims(std::span<const PointerSpec> pointers) {
  std::vector<int> dims;
  for (const auto& p : pointers) dims.push_back(static_cast<int>(p.dim()));
  return dims;
}

VerificationReport start_report(const ExperimentConfig& config, int system_dim) {
  VerificationReport report;
  report.scenario = config.scenario;
  report.seed = config.seed;
  report.system_dim = system_dim;
  report.pointer_dims = pointer_dims(config.pointers);
  return report;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Pointer readouts shifted by their expectation in the initial pointer state.
std::vector<PointerSpec> centered(std::span<const PointerSpec> pointers) {
  std::vector<PointerSpec> out(pointers.begin(), pointers.end());
  for (auto& p : out) {
    const Complex mean = expectation(p.state, p.readout);
    p.readout -= mean.real() * Matrix::Identity(p.dim(), p.dim());
  }
  return out;
}

// Largest jet coefficient of `value` on a monomial that does not contain every label of a.
double off_support_max(const Jet& value, const Multiset& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value.shape().multiset(i).includes(a)) worst = std::max(worst, std::abs(value[i]));
  }
  return worst;
}

bool is_zero_matrix(const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::sequential_per_subset: return "sequential-per-subset";
    case Scenario::sequential_all_coupled: return "sequential-all-coupled";
    case Scenario::simultaneous_evolution: return "simultaneous-evolution";
    case Scenario::thermal: return "thermal";
    case Scenario::multiset: return "multiset";
    case Scenario::generating_function: return "generating-function";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  static const std::map<std::string, Scenario> names{
      {"sequential-per-subset", Scenario::sequential_per_subset},
      {"thm1", Scenario::sequential_per_subset},
      {"sequential-all-coupled", Scenario::sequential_all_coupled},
      {"thm3", Scenario::sequential_all_coupled},
      {"simultaneous-evolution", Scenario::simultaneous_evolution},
      {"thm2", Scenario::simultaneous_evolution},
      {"thm4", Scenario::simultaneous_evolution},
      {"thermal", Scenario::thermal},
      {"multiset", Scenario::multiset},
      {"generating-function", Scenario::generating_function},
      {"genfun", Scenario::generating_function},
  };
  const auto it = names.find(name);
  if (it == names.end()) throw DomainError("unknown scenario '" + name + "'");
  return it->second;
}

void ProbabilityTable::validate() const {
  if (outcomes.size() != probabilities.size() || outcomes.empty()) {
    throw DomainError("probability table needs one probability per outcome");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (static_cast<int>(outcomes[i].size()) != variables()) throw DomainError("ragged probability table");
    if (probabilities[i] < 0.0) throw DomainError("negative probability");
    total += probabilities[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("probabilities sum to " + std::to_string(total) + ", not 1");
}

double ProbabilityTable::moment(const Multiset& m) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    double term = probabilities[i];
    for (auto [label, mult] : m.elements()) term *= std::pow(outcomes[i][label - 1], mult);
    sum += term;
  }
  return sum;
}

ExperimentConfig random_config(Scenario scenario, std::uint64_t seed, const RandomConfigOptions& options) {
  ExperimentConfig config;
  config.scenario = scenario;
  config.seed = seed;
  config.tolerance = options.tolerance;
  config.mc_samples = options.mc_samples;
  Rng states(seed, 0), dynamics(seed, 1), observables(seed, 2), probes(seed, 3), tables(seed, 5);
  const int d = options.system_dim;
  const int n = scenario == Scenario::multiset ? 2 : options.pointers;

  if (scenario == Scenario::generating_function) {
    const int outcomes = 6;
    double total = 0.0;
    for (int i = 0; i < outcomes; ++i) {
      std::vector<double> row;
      for (int k = 0; k < options.variables; ++k) row.push_back(tables.normal());
      config.table.outcomes.push_back(row);
      config.table.probabilities.push_back(-std::log1p(-tables.uniform()));
      total += config.table.probabilities.back();
    }
    for (auto& p : config.table.probabilities) p /= total;
    return config;
  }

  if (scenario == Scenario::multiset) {
    const PointerSpec copy{probes.state(options.pointer_dim), probes.hermitian(options.pointer_dim),
                           probes.hermitian(options.pointer_dim)};
    config.pointers = {copy, copy};
  } else {
    for (int k = 0; k < n; ++k) {
      config.pointers.push_back(
          {probes.state(options.pointer_dim), probes.hermitian(options.pointer_dim), probes.hermitian(options.pointer_dim)});
    }
  }

  const Vector initial = states.state(d);
  const Vector final_state = states.state(d);
  std::vector<Matrix> couplings;
  for (int k = 0; k < n; ++k) couplings.push_back(observables.hermitian(d));
  if (scenario == Scenario::multiset) couplings = {couplings[0], couplings[0]};

  config.sequential.initial = initial;
  config.sequential.final_state = final_state;
  for (int k = 0; k <= n; ++k) config.sequential.unitaries.push_back(dynamics.unitary(d));
  config.sequential.observables = couplings;

  const Matrix hamiltonian = dynamics.hermitian(d);
  config.evolution = {initial, final_state,
                      (options.zero_hamiltonian || scenario == Scenario::multiset) ? Matrix(Matrix::Zero(d, d))
                                                                                   : hamiltonian,
                      options.tau, couplings};
  config.thermal = {hamiltonian, options.beta, couplings};
  return config;
}

bool VerificationReport::passed() const {
  return status == ReportStatus::ok && std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

double VerificationReport::max_error() const {
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, r.abs_error);
  return worst;
}

void VerificationReport::add(const Multiset& subset, std::string check, Complex lhs, Complex rhs, Complex xi,
                             double tolerance, std::map<std::string, double> extras) {
  CheckRecord r;
  r.subset = subset;
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.xi = xi;
  r.abs_error = std::abs(lhs - rhs);
  r.rel_error = r.abs_error / std::max(std::abs(rhs), 1e-300);
  r.tolerance = tolerance;
  r.pass = r.abs_error <= tolerance;
  r.extras = std::move(extras);
  records.push_back(std::move(r));
}

JetMMap pointer_moments(const JetMatrix& state, std::span<const PointerSpec> pointers) {
  const Lattice lattice = Lattice::subsets(static_cast<int>(pointers.size()));
  JetMMap out(lattice, Jet(state.shape(), Complex{}));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    out[i] = trace(scale_left(readout_product(pointers, lattice.multiset(i)), state));
  }
  return out;
}

JetMMap pointer_moment_mmap(const ExperimentConfig& config) {
  const auto n = config.pointers.size();
  const Lattice shape = Lattice::subsets(static_cast<int>(n));
  switch (config.scenario) {
    case Scenario::sequential_per_subset: {
      JetMMap out(shape, Jet(shape, Complex{}));
      for (std::size_t i = 0; i < shape.size(); ++i) {
        const auto counts = shape.counts(i);
        const std::vector<bool> coupled(counts.begin(), counts.end());
        const JetMatrix state =
            postselected_pointer_state(config.sequential, config.pointers, shape, coupled, config.postselection_floor);
        out[i] = trace(scale_left(readout_product(config.pointers, shape.multiset(i)), state));
      }
      return out;
    }
    case Scenario::sequential_all_coupled:
      return pointer_moments(postselected_pointer_state(config.sequential, config.pointers, shape,
                                                        std::vector<bool>(n, true), config.postselection_floor),
                             config.pointers);
    case Scenario::simultaneous_evolution:
    case Scenario::multiset:
      return pointer_moments(evolved_pointer_state(config.evolution, config.pointers, shape, config.postselection_floor),
                             config.pointers);
    case Scenario::thermal:
      return pointer_moments(thermal_pointer_state(config.thermal, config.pointers, shape), config.pointers);
    case Scenario::generating_function: break;
  }
  throw DomainError("scenario " + scenario_name(config.scenario) + " has no pointers");
}

Complex xi_difference_of_products(std::span<const PointerSpec> pointers, const Multiset& a) {
  Complex joint = 1.0, separate = 1.0;
  for (auto [label, mult] : a.elements()) {
    const auto& p = pointers[label - 1];
    for (int i = 0; i < mult; ++i) {
      joint *= expectation(p.state, p.readout * p.coupling);
      separate *= expectation(p.state, p.readout) * expectation(p.state, p.coupling);
    }
  }
  return 2.0 * std::pow(Complex(0.0, -1.0), a.size()) * (joint - separate);
}

Complex xi_product_of_differences(std::span<const PointerSpec> pointers, const Multiset& a) {
  Complex product = 1.0;
  for (auto [label, mult] : a.elements()) {
    const auto& p = pointers[label - 1];
    const Complex difference =
        expectation(p.state, p.readout * p.coupling) - expectation(p.state, p.readout) * expectation(p.state, p.coupling);
    for (int i = 0; i < mult; ++i) product *= difference;
  }
  return 2.0 * std::pow(Complex(0.0, -1.0), a.size()) * product;
}

Complex xi_thermal(std::span<const PointerSpec> pointers, const Multiset& a, bool normalized) {
  Complex product = 1.0;
  for (auto [label, mult] : a.elements()) {
    const auto& p = pointers[label - 1];
    const double d = normalized ? static_cast<double>(p.dim()) : 1.0;
    const Complex difference = (p.readout * p.coupling).trace() / d - p.readout.trace() * p.coupling.trace() / (d * d);
    for (int i = 0; i < mult; ++i) product *= difference;
  }
  return product;
}

VerificationReport verify_theorem1(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(config.pointers.size());
  VerificationReport report = start_report(config, static_cast<int>(config.sequential.initial.size()));
  const ComplexMMap weak_cumulant = log_star(sequential_weak_value_mmap(config.sequential, config.postselection_floor));
  const JetMMap cumulant = log_star(pointer_moment_mmap(config));
  for (const auto& a : targets_or_subsets(config, n)) {
    const Complex lhs = extract_coefficient(cumulant.at(a), a);
    const Complex xi = xi_difference_of_products(config.pointers, a);
    report.add(a, "theorem", lhs, std::real(xi * weak_cumulant.at(a)), xi, config.tolerance);
  }
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify_theorem3(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(config.pointers.size());
  VerificationReport report = start_report(config, static_cast<int>(config.sequential.initial.size()));
  const ComplexMMap weak_cumulant = log_star(sequential_weak_value_mmap(config.sequential, config.postselection_floor));
  const JetMMap cumulant = log_star(pointer_moment_mmap(config));

  ExperimentConfig shifted = config;
  shifted.pointers = centered(config.pointers);
  const JetMMap centered_cumulant = log_star(pointer_moment_mmap(shifted));

  for (const auto& a : targets_or_subsets(config, n)) {
    const Complex lhs = extract_coefficient(cumulant.at(a), a);
    const Complex xi = xi_product_of_differences(config.pointers, a);
    report.add(a, "theorem", lhs, std::real(xi * weak_cumulant.at(a)), xi, config.tolerance);
    report.add(a, "support", off_support_max(centered_cumulant.at(a), a), 0.0, xi, kStructureTolerance);
  }
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify_theorem4(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto& system = config.evolution;
  const int n = static_cast<int>(config.pointers.size());
  VerificationReport report = start_report(config, static_cast<int>(system.initial.size()));
  const bool no_evolution = is_zero_matrix(system.hamiltonian);
  report.notes["theorem2_regime"] = no_evolution ? 1.0 : 0.0;
  report.notes["tau"] = system.tau;

  const Lattice shape = Lattice::subsets(n);
  const ComplexMMap averaged = script_D_mmap(system, shape, config.postselection_floor);
  const ComplexMMap averaged_cumulant = log_star(averaged);
  const JetMMap cumulant = log_star(pointer_moment_mmap(config));
  for (const auto& a : targets_or_subsets(config, n)) {
    const Complex lhs = extract_coefficient(cumulant.at(a), a);
    const Complex xi = xi_product_of_differences(config.pointers, a);
    report.add(a, "theorem", lhs, std::real(xi * averaged_cumulant.at(a)), xi, config.tolerance);
    if (no_evolution) {
      const Complex symmetrized = simultaneous_weak_value(system.initial, system.final_state, system.observables, a,
                                                         config.postselection_floor);
      report.add(a, "symmetrized", averaged.at(a), symmetrized, xi, kAgreementTolerance);
    }
    if (config.mc_samples > 0 && a.size() <= 2) {
      const auto mc = script_D_monte_carlo(system, a, config.mc_samples, config.seed, config.postselection_floor);
      const double band = mc.standard_error > 0.0 ? 3.0 * mc.standard_error : kAgreementTolerance;
      report.add(a, "monte-carlo", averaged.at(a), mc.estimate, xi, band,
                 {{"standard_error", mc.standard_error}, {"samples", static_cast<double>(mc.samples)}});
    }
  }
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify_thermal(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto& system = config.thermal;
  const int n = static_cast<int>(config.pointers.size());
  VerificationReport report = start_report(config, static_cast<int>(system.hamiltonian.rows()));
  report.notes["beta"] = system.beta;

  const Lattice shape = Lattice::subsets(n);
  const ComplexMMap field_cumulant = log_star(thermal_E_mmap(system, shape));
  const Jet free_energy_times_beta = -log(partition_function(system, shape));
  const JetMMap cumulant = log_star(pointer_moment_mmap(config));
  for (const auto& a : targets_or_subsets(config, n)) {
    const Complex lhs = extract_coefficient(cumulant.at(a), a);
    const Complex xi = xi_thermal(config.pointers, a, true);
    const Complex via_field = xi * field_cumulant.at(a);
    const Complex susceptibility = extract_derivative(free_energy_times_beta, a) / system.beta;
    const Complex via_free_energy = -system.beta * xi * susceptibility;
    const Complex literal = xi_thermal(config.pointers, a, false) * field_cumulant.at(a);
    const Complex ratio = literal != 0.0 ? lhs / literal : Complex{};
    report.add(a, "theorem", lhs, via_field, xi, config.tolerance,
               {{"literal_rhs_re", literal.real()},
                {"literal_rhs_im", literal.imag()},
                {"literal_ratio_re", ratio.real()},
                {"literal_ratio_im", ratio.imag()}});
    report.add(a, "free-energy", lhs, via_free_energy, xi, config.tolerance,
               {{"susceptibility_re", susceptibility.real()}, {"susceptibility_im", susceptibility.imag()}});
    report.add(a, "rhs-agreement", via_field, via_free_energy, xi, kAgreementTolerance);
    if (a.size() == n) report.notes["literal_xi_ratio_full_set"] = ratio.real();
  }
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify_multiset(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.pointers.size() != 2 || config.evolution.observables.size() != 2 ||
      config.thermal.observables.size() != 2) {
    throw DomainError("multiset scenario needs two pointer copies coupled to one observable");
  }
  const auto& evolution = config.evolution;
  const auto& thermal = config.thermal;
  if ((evolution.observables[0] - evolution.observables[1]).cwiseAbs().maxCoeff() != 0.0 ||
      (thermal.observables[0] - thermal.observables[1]).cwiseAbs().maxCoeff() != 0.0) {
    throw DomainError("multiset scenario pointers must couple to the same observable");
  }
  VerificationReport report = start_report(config, static_cast<int>(evolution.initial.size()));
  const Multiset pair{1, 2};
  const Multiset repeated{1, 1};
  const Lattice doubled(1, {2});

  // Simultaneous copies: pointer covariance against the weak variance of A.
  ExperimentConfig simultaneous = config;
  simultaneous.scenario = Scenario::simultaneous_evolution;
  const JetMMap cumulant = log_star(pointer_moment_mmap(simultaneous));
  const EvolutionSystem single{evolution.initial, evolution.final_state, evolution.hamiltonian, evolution.tau,
                               {evolution.observables[0]}};
  const Complex weak_variance = log_star(script_D_mmap(single, doubled, config.postselection_floor)).at(repeated);
  const Complex xi = xi_product_of_differences(config.pointers, pair);
  report.add(repeated, "k2", extract_coefficient(cumulant.at(pair), pair), std::real(xi * weak_variance), xi,
             config.tolerance);
  if (is_zero_matrix(evolution.hamiltonian)) {
    const std::vector<Matrix> a{evolution.observables[0]};
    const Complex mean = simultaneous_weak_value(evolution.initial, evolution.final_state, a, Multiset{1},
                                                 config.postselection_floor);
    const Complex square = simultaneous_weak_value(evolution.initial, evolution.final_state, a, repeated,
                                                   config.postselection_floor);
    report.add(repeated, "weak-variance", weak_variance, square - mean * mean, xi, kAgreementTolerance);
  }

  // Thermal copies: second-order susceptibility through a cap-2 jet.
  ExperimentConfig heat = config;
  heat.scenario = Scenario::thermal;
  const JetMMap thermal_cumulant = log_star(pointer_moment_mmap(heat));
  const ThermalSystem single_field{thermal.hamiltonian, thermal.beta, {thermal.observables[0]}};
  const Complex field_cumulant = log_star(thermal_E_mmap(single_field, doubled)).at(repeated);
  const Complex second_derivative = free_energy_susceptibility(single_field, repeated);
  const Complex thermal_xi = xi_thermal(config.pointers, pair, true);
  const Complex lhs = extract_coefficient(thermal_cumulant.at(pair), pair);
  report.add(repeated, "thermal-copies", lhs, thermal_xi * field_cumulant, thermal_xi, config.tolerance);
  report.add(repeated, "thermal-free-energy", lhs, -thermal.beta * thermal_xi * second_derivative, thermal_xi,
             config.tolerance,
             {{"susceptibility_re", second_derivative.real()}, {"susceptibility_im", second_derivative.imag()}});
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify_generating_function(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.table.validate();
  const int n = config.table.variables();
  VerificationReport report = start_report(config, 0);
  report.notes["variables"] = n;

  auto log_generating_function = [&](const Lattice& shape) {
    Jet sum(shape, Complex{});
    for (std::size_t o = 0; o < config.table.outcomes.size(); ++o) {
      Jet exponent(shape, Complex{});
      for (int k = 0; k < shape.ground_size(); ++k) {
        if (shape.caps()[k] > 0) exponent.coeff(Multiset{k + 1}) = config.table.outcomes[o][k];
      }
      Jet term = exp(exponent);
      term *= config.table.probabilities[o];
      sum += term;
    }
    return log(sum);
  };

  const auto targets = config.targets.empty() ? multisets_up_to(n, config.max_order) : config.targets;
  for (const auto& a : targets) {
    if (a.empty() || a.max_label() > n) throw DomainError("target " + a.to_string() + " is not a nonempty multiset");
    const Lattice shape(n, a.counts(n));
    ComplexMMap moments(shape);
    for (std::size_t i = 0; i < shape.size(); ++i) moments[i] = config.table.moment(shape.multiset(i));
    const Complex partition_sum = log_star(moments).at(a);
    const Complex jet_route = extract_derivative(log_generating_function(shape), a);
    report.add(a, "partition-vs-jet", partition_sum, jet_route, 0.0, config.tolerance);
  }

  if (n >= 2) {
    std::vector<int> caps(n, 0);
    caps[0] = caps[1] = 2;
    const Jet log_g = log_generating_function(Lattice(n, caps));
    const double m1 = config.table.moment({1}), m2 = config.table.moment({2});
    const double covariance = config.table.moment({1, 2}) - m1 * m2;
    report.add({1, 2}, "standard-covariance", extract_coefficient(log_g, {1, 2}), covariance, 0.0, config.tolerance);
    report.add({1, 1}, "standard-variance", extract_coefficient(log_g, {1, 1}),
               (config.table.moment({1, 1}) - m1 * m1) / 2.0, 0.0, config.tolerance);
    report.add({2, 2}, "standard-variance", extract_coefficient(log_g, {2, 2}),
               (config.table.moment({2, 2}) - m2 * m2) / 2.0, 0.0, config.tolerance);
  }
  report.runtime_seconds = elapsed_since(start);
  return report;
}

VerificationReport verify(const ExperimentConfig& config) {
  try {
    switch (config.scenario) {
      case Scenario::sequential_per_subset: return verify_theorem1(config);
      case Scenario::sequential_all_coupled: return verify_theorem3(config);
      case Scenario::simultaneous_evolution: return verify_theorem4(config);
      case Scenario::thermal: return verify_thermal(config);
      case Scenario::multiset: return verify_multiset(config);
      case Scenario::generating_function: return verify_generating_function(config);
    }
  } catch (const SingularPostselection& e) {
    VerificationReport report = start_report(config, static_cast<int>(config.sequential.initial.size()));
    report.status = ReportStatus::singular;
    report.message = e.what();
    return report;
  }
  throw DomainError("unknown scenario");
}

}  // namespace momentalg
