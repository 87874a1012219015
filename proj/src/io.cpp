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

#include "momentalg/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "momentalg/errors.hpp"

namespace momentalg {

namespace {

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw InputError(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(where + "/" + key, "missing field");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j[key], where + "/" + key) : fallback;
}

std::int64_t integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where, "expected an array");
  return j;
}

std::vector<Matrix> matrices_from_json(const Json& j, const std::string& where) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) {
    out.push_back(matrix_from_json(j[i], where + "/" + std::to_string(i)));
  }
  return out;
}

Json matrices_to_json(const std::vector<Matrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<Multiset> multisets_from_json(const Json& j, const std::string& where) {
  std::vector<Multiset> out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) {
    out.push_back(multiset_from_json(j[i], where + "/" + std::to_string(i)));
  }
  return out;
}

Json extras_to_json(const std::map<std::string, double>& extras) {
  Json out = Json::object();
  for (const auto& [k, v] : extras) out[k] = v;
  return out;
}

SequentialSystem sequential_from_json(const Json& j, const std::string& where) {
  SequentialSystem s;
  s.initial = state_from_json(field(j, "initial", where), where + "/initial");
  s.final_state = state_from_json(field(j, "final", where), where + "/final");
  s.unitaries = matrices_from_json(field(j, "unitaries", where), where + "/unitaries");
  s.observables = matrices_from_json(field(j, "observables", where), where + "/observables");
  for (std::size_t i = 0; i < s.unitaries.size(); ++i) {
    if (!is_unitary(s.unitaries[i])) throw InputError(where + "/unitaries/" + std::to_string(i), "not unitary");
  }
  return s;
}

EvolutionSystem evolution_from_json(const Json& j, const std::string& where) {
  EvolutionSystem s;
  s.initial = state_from_json(field(j, "initial", where), where + "/initial");
  s.final_state = state_from_json(field(j, "final", where), where + "/final");
  s.hamiltonian = j.contains("hamiltonian") ? matrix_from_json(j["hamiltonian"], where + "/hamiltonian")
                                            : Matrix(Matrix::Zero(s.initial.size(), s.initial.size()));
  s.tau = number_or(j, "tau", 1.0, where);
  s.observables = matrices_from_json(field(j, "observables", where), where + "/observables");
  return s;
}

ThermalSystem thermal_from_json(const Json& j, const std::string& where) {
  ThermalSystem s;
  s.hamiltonian = matrix_from_json(field(j, "hamiltonian", where), where + "/hamiltonian");
  s.beta = number_or(j, "beta", 1.0, where);
  if (!(s.beta > 0.0)) throw InputError(where + "/beta", "beta must be positive");
  s.observables = matrices_from_json(field(j, "observables", where), where + "/observables");
  return s;
}

void check_observables(const std::vector<Matrix>& observables, const std::string& where) {
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (!is_hermitian(observables[i])) throw InputError(where + "/" + std::to_string(i), "observable is not hermitian");
  }
}

Json mc_to_json(const MonteCarloEstimate& mc) {
  return {{"estimate", complex_to_json(mc.estimate)}, {"standard_error", mc.standard_error}, {"samples", mc.samples}};
}

std::string csv_number(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(source + "@byte " + std::to_string(e.byte), e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path);
}

Json complex_to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  return {number(field(j, "re", where), where + "/re"), number_or(j, "im", 0.0, where)};
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c).real());
      data.push_back(m(r, c).imag());
    }
  }
  return {{"dim", m.rows()}, {"data", data}};
}

QOperator operator_from_json(const Json& j, const std::string& where) {
  const auto dim = integer(field(j, "dim", where), where + "/dim");
  const Json& data = array(field(j, "data", where), where + "/data");
  if (dim < 1 || data.size() != static_cast<std::size_t>(2 * dim * dim)) {
    throw InputError(where + "/data", "expected 2*dim*dim numbers");
  }
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const std::size_t k = static_cast<std::size_t>(2 * (r * dim + c));
      m(r, c) = Complex(number(data[k], where + "/data/" + std::to_string(k)),
                        number(data[k + 1], where + "/data/" + std::to_string(k + 1)));
    }
  }
  auto property = QOperator::Property::general;
  if (j.value("hermitian", false)) property = QOperator::Property::hermitian;
  if (j.value("unitary", false)) property = QOperator::Property::unitary;
  try {
    return QOperator(std::move(m), property);
  } catch (const DomainError& e) {
    throw InputError(where, e.what());
  }
}

Matrix matrix_from_json(const Json& j, const std::string& where) { return operator_from_json(j, where).matrix(); }

Json state_to_json(const Vector& v) {
  Json data = Json::array();
  for (const auto& x : v) {
    data.push_back(x.real());
    data.push_back(x.imag());
  }
  return {{"dim", v.size()}, {"data", data}};
}

Vector state_from_json(const Json& j, const std::string& where) {
  const auto dim = integer(field(j, "dim", where), where + "/dim");
  const Json& data = array(field(j, "data", where), where + "/data");
  if (dim < 1 || data.size() != static_cast<std::size_t>(2 * dim)) {
    throw InputError(where + "/data", "expected 2*dim numbers");
  }
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = Complex(number(data[2 * i], where + "/data"), number(data[2 * i + 1], where + "/data"));
  }
  if (v.norm() == 0.0) throw InputError(where, "zero state vector");
  return normalized(v);
}

Json multiset_to_json(const Multiset& m) { return m.flatten(); }

Multiset multiset_from_json(const Json& j, const std::string& where) {
  std::vector<Label> labels;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) {
    const auto label = integer(j[i], where + "/" + std::to_string(i));
    if (label < 1) throw InputError(where + "/" + std::to_string(i), "labels must be positive");
    labels.push_back(static_cast<Label>(label));
  }
  return Multiset(labels);
}

Json mmap_to_json(const ComplexMMap& f) {
  const Lattice& lattice = f.lattice();
  std::vector<std::size_t> order(lattice.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lattice.multiset(a) < lattice.multiset(b); });
  Json entries = Json::array();
  for (std::size_t i : order) {
    if (f[i] == Complex{}) continue;
    entries.push_back({{"m", multiset_to_json(lattice.multiset(i))}, {"re", f[i].real()}, {"im", f[i].imag()}});
  }
  return {{"schema", kSchemaVersion}, {"n", lattice.ground_size()}, {"caps", lattice.caps()}, {"entries", entries}};
}

ComplexMMap mmap_from_json(const Json& j) {
  const auto n = integer(field(j, "n", ""), "/n");
  if (n < 0) throw InputError("/n", "ground size must be non-negative");
  std::vector<int> caps(static_cast<std::size_t>(n), 1);
  if (j.contains("caps")) {
    const Json& c = array(j["caps"], "/caps");
    if (c.size() != caps.size()) throw InputError("/caps", "need one cap per label");
    for (std::size_t i = 0; i < caps.size(); ++i) caps[i] = static_cast<int>(integer(c[i], "/caps/" + std::to_string(i)));
  }
  ComplexMMap f(Lattice(static_cast<int>(n), caps));
  const Json& entries = array(field(j, "entries", ""), "/entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "/entries/" + std::to_string(i);
    const Multiset m = multiset_from_json(field(entries[i], "m", where), where + "/m");
    if (!f.lattice().contains(m)) throw InputError(where + "/m", m.to_string() + " is outside the declared caps");
    f.at(m) = complex_from_json(entries[i], where);
  }
  return f;
}

Json config_to_json(const ExperimentConfig& config) {
  Json j{{"schema", kSchemaVersion},
         {"scenario", scenario_name(config.scenario)},
         {"seed", config.seed},
         {"tolerance", config.tolerance},
         {"postselection_floor", config.postselection_floor},
         {"mc_samples", config.mc_samples},
         {"max_order", config.max_order}};
  Json targets = Json::array();
  for (const auto& t : config.targets) targets.push_back(multiset_to_json(t));
  j["targets"] = targets;
  if (config.scenario == Scenario::generating_function) {
    j["table"] = {{"outcomes", config.table.outcomes}, {"probabilities", config.table.probabilities}};
    return j;
  }
  Json pointers = Json::array();
  for (const auto& p : config.pointers) {
    pointers.push_back(
        {{"state", state_to_json(p.state)}, {"coupling", matrix_to_json(p.coupling)}, {"readout", matrix_to_json(p.readout)}});
  }
  j["pointers"] = pointers;
  const auto& s = config.sequential;
  if (s.initial.size() > 0) {
    j["sequential"] = {{"initial", state_to_json(s.initial)},
                       {"final", state_to_json(s.final_state)},
                       {"unitaries", matrices_to_json(s.unitaries)},
                       {"observables", matrices_to_json(s.observables)}};
  }
  const auto& e = config.evolution;
  if (e.initial.size() > 0) {
    j["evolution"] = {{"initial", state_to_json(e.initial)},
                      {"final", state_to_json(e.final_state)},
                      {"hamiltonian", matrix_to_json(e.hamiltonian)},
                      {"tau", e.tau},
                      {"observables", matrices_to_json(e.observables)}};
  }
  const auto& t = config.thermal;
  if (t.hamiltonian.size() > 0) {
    j["thermal"] = {{"hamiltonian", matrix_to_json(t.hamiltonian)},
                    {"beta", t.beta},
                    {"observables", matrices_to_json(t.observables)}};
  }
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (j.contains("schema") && integer(j["schema"], "/schema") != kSchemaVersion) {
    throw InputError("/schema", "unsupported schema version");
  }
  Scenario scenario;
  try {
    scenario = parse_scenario(text(field(j, "scenario", ""), "/scenario"));
  } catch (const DomainError& e) {
    throw InputError("/scenario", e.what());
  }
  const std::uint64_t seed = j.contains("seed") ? static_cast<std::uint64_t>(integer(j["seed"], "/seed")) : 0;

  ExperimentConfig config;
  if (j.contains("random")) {
    const Json& r = j["random"];
    RandomConfigOptions options;
    options.system_dim = static_cast<int>(number_or(r, "system_dim", options.system_dim, "/random"));
    options.pointers = static_cast<int>(number_or(r, "pointers", options.pointers, "/random"));
    options.pointer_dim = static_cast<int>(number_or(r, "pointer_dim", options.pointer_dim, "/random"));
    options.zero_hamiltonian = r.value("zero_hamiltonian", false);
    options.tau = number_or(r, "tau", options.tau, "/random");
    options.beta = number_or(r, "beta", options.beta, "/random");
    options.variables = static_cast<int>(number_or(r, "variables", options.variables, "/random"));
    config = random_config(scenario, seed, options);
  } else {
    config.scenario = scenario;
    config.seed = seed;
    if (scenario == Scenario::generating_function) {
      const Json& t = field(j, "table", "");
      config.table.outcomes = field(t, "outcomes", "/table").get<std::vector<std::vector<double>>>();
      config.table.probabilities = field(t, "probabilities", "/table").get<std::vector<double>>();
      try {
        config.table.validate();
      } catch (const DomainError& e) {
        throw InputError("/table", e.what());
      }
    } else {
      const Json& ps = array(field(j, "pointers", ""), "/pointers");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string where = "/pointers/" + std::to_string(i);
        PointerSpec p;
        if (ps[i].contains("state")) p.state = state_from_json(ps[i]["state"], where + "/state");
        p.coupling = matrix_from_json(field(ps[i], "coupling", where), where + "/coupling");
        p.readout = matrix_from_json(field(ps[i], "readout", where), where + "/readout");
        try {
          p.validate();
        } catch (const std::exception& e) {
          throw InputError(where, e.what());
        }
        config.pointers.push_back(std::move(p));
      }
      if (j.contains("sequential")) {
        config.sequential = sequential_from_json(j["sequential"], "/sequential");
        check_observables(config.sequential.observables, "/sequential/observables");
      }
      if (j.contains("evolution")) {
        config.evolution = evolution_from_json(j["evolution"], "/evolution");
        check_observables(config.evolution.observables, "/evolution/observables");
      }
      if (j.contains("thermal")) {
        config.thermal = thermal_from_json(j["thermal"], "/thermal");
        check_observables(config.thermal.observables, "/thermal/observables");
      }
    }
  }
  config.tolerance = number_or(j, "tolerance", config.tolerance, "");
  config.postselection_floor = number_or(j, "postselection_floor", config.postselection_floor, "");
  if (j.contains("mc_samples")) config.mc_samples = static_cast<int>(integer(j["mc_samples"], "/mc_samples"));
  if (j.contains("max_order")) config.max_order = static_cast<int>(integer(j["max_order"], "/max_order"));
  if (j.contains("targets")) config.targets = multisets_from_json(j["targets"], "/targets");
  return config;
}

Json report_to_json(const VerificationReport& report, const std::string& generated_at) {
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back({{"subset", multiset_to_json(r.subset)},
                       {"check", r.check},
                       {"lhs", complex_to_json(r.lhs)},
                       {"rhs", complex_to_json(r.rhs)},
                       {"xi", complex_to_json(r.xi)},
                       {"abs_error", r.abs_error},
                       {"rel_error", r.rel_error},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass},
                       {"extras", extras_to_json(r.extras)}});
  }
  return {{"schema", kSchemaVersion},
          {"scenario", scenario_name(report.scenario)},
          {"seed", report.seed},
          {"system_dim", report.system_dim},
          {"pointer_dims", report.pointer_dims},
          {"status", report.status == ReportStatus::ok ? "ok" : "singular"},
          {"message", report.message},
          {"passed", report.passed()},
          {"max_error", report.max_error()},
          {"notes", extras_to_json(report.notes)},
          {"records", records},
          {"timestamp", {{"generated_at", generated_at}, {"runtime_seconds", report.runtime_seconds}}}};
}

std::string csv_header() {
  return "scenario,seed,status,subset,check,lhs_re,lhs_im,rhs_re,rhs_im,xi_re,xi_im,abs_error,rel_error,tolerance,pass";
}

void write_report_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  out << csv_header() << "\n";
  for (const auto& report : reports) {
    const std::string status = report.status == ReportStatus::ok ? "ok" : "singular";
    if (report.records.empty()) {
      out << scenario_name(report.scenario) << "," << report.seed << "," << status << ",,,,,,,,,,,,\n";
    }
    for (const auto& r : report.records) {
      out << scenario_name(report.scenario) << "," << report.seed << "," << status << ",\"" << r.subset.to_string()
          << "\"," << r.check << "," << csv_number(r.lhs.real()) << "," << csv_number(r.lhs.imag()) << ","
          << csv_number(r.rhs.real()) << "," << csv_number(r.rhs.imag()) << "," << csv_number(r.xi.real()) << ","
          << csv_number(r.xi.imag()) << "," << csv_number(r.abs_error) << "," << csv_number(r.rel_error) << ","
          << csv_number(r.tolerance) << "," << (r.pass ? "true" : "false") << "\n";
    }
  }
}

Json answer_weak_value_query(const Json& query) {
  const std::string kind = text(field(query, "kind", ""), "/kind");
  const Json& system = field(query, "system", "");
  const std::vector<Multiset> subsets = multisets_from_json(field(query, "subsets", ""), "/subsets");
  const double floor = number_or(query, "floor", kDefaultPostselectionFloor, "");
  int samples = 0;
  std::uint64_t seed = 0;
  if (query.contains("monte_carlo")) {
    samples = static_cast<int>(integer(field(query["monte_carlo"], "samples", "/monte_carlo"), "/monte_carlo/samples"));
    if (query["monte_carlo"].contains("seed")) {
      seed = static_cast<std::uint64_t>(integer(query["monte_carlo"]["seed"], "/monte_carlo/seed"));
    }
  }

  Json results = Json::array();
  auto emit = [&](const Multiset& a, Complex value, Json extra = Json::object()) {
    extra["subset"] = multiset_to_json(a);
    extra["value"] = complex_to_json(value);
    results.push_back(extra);
  };

  if (kind == "sequential") {
    const SequentialSystem s = sequential_from_json(system, "/system");
    check_observables(s.observables, "/system/observables");
    const ComplexMMap values = sequential_weak_value_mmap(s, floor);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      if (!values.lattice().contains(subsets[i])) {
        throw InputError("/subsets/" + std::to_string(i), "sequential weak values take plain subsets of the observables");
      }
      emit(subsets[i], values.at(subsets[i]));
    }
  } else if (kind == "simultaneous") {
    const EvolutionSystem s = evolution_from_json(system, "/system");
    check_observables(s.observables, "/system/observables");
    for (const auto& a : subsets) emit(a, simultaneous_weak_value(s.initial, s.final_state, s.observables, a, floor));
  } else if (kind == "evolution") {
    const EvolutionSystem s = evolution_from_json(system, "/system");
    check_observables(s.observables, "/system/observables");
    for (const auto& a : subsets) {
      Json extra = Json::object();
      if (samples > 0) extra["monte_carlo"] = mc_to_json(script_D_monte_carlo(s, a, samples, seed, floor));
      emit(a, script_D(s, a, floor), extra);
    }
  } else if (kind == "thermal") {
    const ThermalSystem s = thermal_from_json(system, "/system");
    check_observables(s.observables, "/system/observables");
    for (const auto& a : subsets) {
      Json extra{{"susceptibility", complex_to_json(free_energy_susceptibility(s, a))}};
      if (samples > 0) extra["monte_carlo"] = mc_to_json(thermal_E_monte_carlo(s, a, samples, seed));
      emit(a, thermal_E(s, a), extra);
    }
  } else {
    throw InputError("/kind", "expected sequential, simultaneous, evolution or thermal");
  }
  return {{"schema", kSchemaVersion}, {"kind", kind}, {"results", results}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace momentalg
