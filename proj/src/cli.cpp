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

#include "momentalg/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "momentalg/errors.hpp"
#include "momentalg/io.hpp"

namespace momentalg {

namespace {

namespace fs = std::filesystem;

double default_tolerance(double fallback) {
  if (const char* value = std::getenv(kToleranceVariable)) {
    char* end = nullptr;
    const double parsed = std::strtod(value, &end);
    if (end == value || *end != '\0' || !(parsed > 0.0)) {
      throw InputError(kToleranceVariable, "expected a positive number, got '" + std::string(value) + "'");
    }
    return parsed;
  }
  return fallback;
}

Json read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json(buffer.str(), "<stdin>");
  }
  return read_json_file(path);
}

// Writes to a sibling temporary and renames so readers never see partial files.
void write_atomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream file(tmp);
    if (!file) throw InputError(path.string(), "cannot write file");
    file << contents;
  }
  fs::rename(tmp, path);
}

void emit(const Json& j, const std::string& output, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (output.empty() || output == "-") {
    out << text;
  } else {
    write_atomically(output, text);
  }
}

struct AlgebraOptions {
  std::string op;
  std::vector<std::string> inputs;
  int label = 1;
  int depth = 20;
  std::string first;
  std::string second;
  double tolerance = 0.0;
  std::string output;
};

int run_algebra(const AlgebraOptions& o, std::istream& in, std::ostream& out) {
  auto expect_inputs = [&](std::size_t count) {
    if (o.inputs.size() != count) {
      throw InputError("argv", "'" + o.op + "' takes " + std::to_string(count) + " input file(s)");
    }
  };
  auto load = [&](std::size_t i) { return mmap_from_json(read_input(o.inputs[i], in)); };

  if (o.op == "convolve") {
    expect_inputs(2);
    const ComplexMMap f = load(0), g = load(1);
    if (!(f.lattice() == g.lattice())) throw InputError(o.inputs[1], "M-maps have different ground sets or caps");
    emit(mmap_to_json(convolve(f, g)), o.output, out);
  } else if (o.op == "log") {
    expect_inputs(1);
    emit(mmap_to_json(log_star(load(0))), o.output, out);
  } else if (o.op == "exp") {
    expect_inputs(1);
    emit(mmap_to_json(exp_star(load(0))), o.output, out);
  } else if (o.op == "inverse") {
    expect_inputs(1);
    emit(mmap_to_json(inverse_star(load(0))), o.output, out);
  } else if (o.op == "series") {
    expect_inputs(1);
    const auto result = log1p_series(load(0), o.depth);
    Json j = mmap_to_json(result.sum);
    j["depth"] = o.depth;
    j["truncation"] = mmap_to_json(result.last_term)["entries"];
    emit(j, o.output, out);
  } else if (o.op == "raise") {
    expect_inputs(1);
    emit(mmap_to_json(raise(o.label, load(0))), o.output, out);
  } else if (o.op == "factorizing-check") {
    expect_inputs(1);
    const bool factorizing = is_factorizing(load(0), parse_multiset(o.first), parse_multiset(o.second), o.tolerance);
    emit({{"schema", kSchemaVersion}, {"factorizing", factorizing}}, o.output, out);
    return factorizing ? kExitPass : kExitVerificationFailure;
  } else {
    throw InputError("argv", "unknown algebra op '" + o.op +
                                 "' (expected convolve, log, exp, inverse, series, raise, factorizing-check)");
  }
  return kExitPass;
}

struct VerifyOptions {
  std::string scenario;
  std::string seeds = "1";
  int pointers = 2;
  int system_dim = 2;
  std::string hamiltonian = "random";
  double tau = 1.0;
  double beta = 1.0;
  int variables = 3;
  int samples = 0;
  double tolerance = 0.0;
  std::string out_dir = "reports";
  std::string config;
};

std::string fixed(double x, int precision) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(precision) << x;
  return s.str();
}

void print_summary(std::ostream& out, const std::vector<Json>& reports) {
  out << std::left << std::setw(24) << "scenario" << std::setw(8) << "seed" << std::setw(10) << "status"
      << std::setw(8) << "checks" << std::setw(12) << "max_error" << "result\n";
  int passed = 0, singular = 0;
  for (const auto& r : reports) {
    const bool ok = r.value("passed", false);
    const bool is_singular = r.value("status", "") == "singular";
    passed += ok;
    singular += is_singular;
    out << std::left << std::setw(24) << r.value("scenario", "?") << std::setw(8) << r.value("seed", 0)
        << std::setw(10) << r.value("status", "?") << std::setw(8) << r["records"].size() << std::setw(12)
        << fixed(r.value("max_error", 0.0), 2) << (is_singular ? "SKIP" : (ok ? "PASS" : "FAIL")) << "\n";
    if (r.contains("notes") && r["notes"].contains("theorem2_regime") && r["notes"]["theorem2_regime"] == 1.0) {
      out << "  (H_S = 0: theorem-2 regime, D equals the symmetrized weak value)\n";
    }
  }
  out << passed << "/" << reports.size() << " passed";
  if (singular > 0) out << ", " << singular << " skipped (singular postselection)";
  out << "\n";
}

bool all_pass(const std::vector<Json>& reports) {
  for (const auto& r : reports) {
    if (r.value("status", "") == "singular") continue;
    if (!r.value("passed", false)) return false;
  }
  return true;
}

int run_verify(const VerifyOptions& o, std::ostream& out) {
  Scenario scenario;
  try {
    scenario = parse_scenario(o.scenario);
  } catch (const DomainError& e) {
    throw InputError("argv", e.what());
  }
  if (o.hamiltonian != "zero" && o.hamiltonian != "random") throw InputError("--hs", "expected zero or random");
  const bool no_evolution = o.scenario == "thm2" || o.hamiltonian == "zero";

  RandomConfigOptions options;
  options.system_dim = o.system_dim;
  options.pointers = o.pointers;
  options.zero_hamiltonian = no_evolution;
  options.tau = o.tau;
  options.beta = o.beta;
  options.variables = o.variables;
  options.mc_samples = o.samples;
  options.tolerance = o.tolerance;
  if (o.system_dim < 1 || o.pointers < 1 || o.variables < 1) throw InputError("argv", "dimensions must be positive");

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const std::string stamp = utc_timestamp();
  std::vector<Json> reports;
  Json manifest{{"schema", kSchemaVersion}, {"scenario", scenario_name(scenario)}, {"files", Json::array()}};
  for (std::uint64_t seed : parse_seed_range(o.seeds)) {
    ExperimentConfig config;
    if (!o.config.empty()) {
      Json j = read_json_file(o.config);
      j["seed"] = seed;
      j["scenario"] = o.scenario;
      config = config_from_json(j);
      if (!j.contains("tolerance")) config.tolerance = o.tolerance;
      if (!j.contains("mc_samples")) config.mc_samples = o.samples;
    } else {
      config = random_config(scenario, seed, options);
    }
    const VerificationReport report = verify(config);
    const Json j = report_to_json(report, stamp);
    const std::string stem = scenario_name(scenario) + "-seed-" + std::to_string(seed);
    write_atomically(dir / (stem + ".json"), j.dump(2) + "\n");
    std::ostringstream csv;
    write_report_csv(csv, {report});
    write_atomically(dir / (stem + ".csv"), csv.str());
    manifest["files"].push_back({{"seed", seed}, {"json", stem + ".json"}, {"csv", stem + ".csv"},
                                 {"status", j["status"]}, {"passed", j["passed"]}});
    reports.push_back(j);
  }
  manifest["passed"] = all_pass(reports);
  manifest["timestamp"] = {{"generated_at", stamp}};
  write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
  print_summary(out, reports);
  return all_pass(reports) ? kExitPass : kExitVerificationFailure;
}

int run_report(const std::vector<std::string>& paths, std::ostream& out) {
  std::vector<Json> reports;
  for (const auto& p : paths) {
    const fs::path path(p);
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "manifest.json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) reports.push_back(read_json_file(f.string()));
    } else {
      reports.push_back(read_json_file(p));
    }
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].contains("records") || !reports[i].contains("passed")) {
      throw InputError("report " + std::to_string(i), "not a verification report");
    }
  }
  print_summary(out, reports);
  return all_pass(reports) ? kExitPass : kExitVerificationFailure;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw InputError("--seeds", "expected N or A..B, got '" + text + "'");
    }
    return static_cast<std::uint64_t>(std::stoull(s));
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_one(text)};
  const std::uint64_t first = parse_one(text.substr(0, dots));
  const std::uint64_t last = parse_one(text.substr(dots + 2));
  if (last < first) throw InputError("--seeds", "empty seed range '" + text + "'");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
  return seeds;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment-algebra toolkit and weak-measurement theorem verifier"};
  app.require_subcommand(1);

  AlgebraOptions algebra;
  auto* algebra_cmd = app.add_subcommand("algebra", "Apply a moment-algebra operation to M-map JSON files");
  algebra_cmd->add_option("op", algebra.op, "convolve | log | exp | inverse | series | raise | factorizing-check")
      ->required();
  algebra_cmd->add_option("inputs", algebra.inputs, "Input M-map files ('-' for stdin)")->required();
  algebra_cmd->add_option("--label", algebra.label, "Label for raise");
  algebra_cmd->add_option("--depth", algebra.depth, "Number of terms for series");
  algebra_cmd->add_option("--first", algebra.first, "First block of the cut for factorizing-check, e.g. [1,2]");
  algebra_cmd->add_option("--second", algebra.second, "Second block of the cut, e.g. [3]");
  algebra_cmd->add_option("--tol", algebra.tolerance, "Absolute tolerance");
  algebra_cmd->add_option("-o,--output", algebra.output, "Output file (default stdout)");

  std::string query_path, query_output;
  auto* weak_cmd = app.add_subcommand("weak-values", "Answer a weak-value query JSON");
  weak_cmd->add_option("query", query_path, "Query file ('-' for stdin)")->required();
  weak_cmd->add_option("-o,--output", query_output, "Output file (default stdout)");

  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Run seeded theorem verifications");
  verify_cmd->add_option("scenario", verify_opts.scenario, "thm1 | thm2 | thm3 | thm4 | thermal | multiset | genfun")
      ->required();
  verify_cmd->add_option("--seeds", verify_opts.seeds, "Seed or inclusive range A..B");
  verify_cmd->add_option("--pointers", verify_opts.pointers, "Number of qubit pointers");
  verify_cmd->add_option("--sysdim", verify_opts.system_dim, "System dimension");
  verify_cmd->add_option("--hs", verify_opts.hamiltonian, "System Hamiltonian: zero | random");
  verify_cmd->add_option("--tau", verify_opts.tau, "Interaction window");
  verify_cmd->add_option("--beta", verify_opts.beta, "Inverse temperature");
  verify_cmd->add_option("--vars", verify_opts.variables, "Random variables for genfun");
  verify_cmd->add_option("--samples", verify_opts.samples, "Monte-Carlo samples for the D(a) cross-check");
  verify_cmd->add_option("--tol", verify_opts.tolerance, "Absolute tolerance");
  verify_cmd->add_option("--out", verify_opts.out_dir, "Report directory");
  verify_cmd->add_option("--config", verify_opts.config, "Config JSON used instead of random instances");

  std::vector<std::string> report_paths;
  auto* report_cmd = app.add_subcommand("report", "Summarize report files or directories");
  report_cmd->add_option("paths", report_paths, "Report JSON files or directories")->required();

  try {
    algebra.tolerance = default_tolerance(kDefaultTolerance);
    verify_opts.tolerance = default_tolerance(1e-9);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*algebra_cmd) return run_algebra(algebra, in, out);
    if (*weak_cmd) {
      emit(answer_weak_value_query(read_input(query_path, in)), query_output, out);
      return kExitPass;
    }
    if (*verify_cmd) return run_verify(verify_opts, out);
    if (*report_cmd) return run_report(report_paths, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::logic_error& e) {
    // DomainError and ShapeError both derive from std::logic_error.
    err << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace momentalg
