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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "momentalg/cli.hpp"
#include "momentalg/io.hpp"
#include "oracles.hpp"

namespace momentalg {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("momentalg-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

const char* kPairFixture = R"({"n": 2, "entries": [
  {"m": [], "re": 1}, {"m": [1], "re": 2}, {"m": [2], "re": 3}, {"m": [1, 2], "re": 10}]})";

Complex entry(const Json& mmap, const Multiset& m) {
  for (const auto& e : mmap["entries"]) {
    if (multiset_from_json(e["m"], "") == m) return {e["re"].get<double>(), e["im"].get<double>()};
  }
  return 0.0;
}

class ToleranceEnv : public ::testing::Test {
 protected:
  void TearDown() override { unsetenv(kToleranceVariable); }
};

TEST(Io, MMapRoundTripIsBitExact) {
  Rng rng(1);
  const ComplexMMap f = oracle::random_mmap(rng, Lattice(3, {2, 1, 1}), 1.0, Complex(0.7, -1.0 / 3.0));
  const Json j = mmap_to_json(f);
  const ComplexMMap back = mmap_from_json(parse_json(j.dump(), "test"));
  ASSERT_TRUE(back.lattice() == f.lattice());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
  EXPECT_EQ(j["schema"], kSchemaVersion);
}

TEST(Io, MMapEntriesAreCanonicalAndSparse) {
  ComplexMMap f(Lattice::subsets(2));
  f.at({}) = 1.0;
  f.at({1, 2}) = Complex(0.0, 2.0);
  const Json j = mmap_to_json(f);
  ASSERT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][0]["m"], Json::array());
  EXPECT_EQ(j["entries"][1]["m"], Json({1, 2}));
  EXPECT_EQ(j["caps"], Json({1, 1}));
  EXPECT_THROW(mmap_from_json(parse_json(R"({"n": 1, "entries": [{"m": [1, 1], "re": 1}]})", "t")), InputError);
  EXPECT_THROW(mmap_from_json(parse_json(R"({"n": 1, "entries": [{"m": [0], "re": 1}]})", "t")), InputError);
}

TEST(Io, ParseErrorsCarryByteOffsets) {
  try {
    parse_json("{\"n\": 2,, }", "fixture.json");
    FAIL() << "expected an InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.location().rfind("fixture.json@byte ", 0), 0u) << e.location();
  }
}

TEST(Io, ConfigRoundTripReproducesVerification) {
  for (Scenario s : {Scenario::sequential_per_subset, Scenario::simultaneous_evolution, Scenario::thermal,
                     Scenario::generating_function}) {
    const ExperimentConfig config = random_config(s, 17);
    const ExperimentConfig back = config_from_json(parse_json(config_to_json(config).dump(), "cfg"));
    const VerificationReport a = verify(config), b = verify(back);
    ASSERT_EQ(a.records.size(), b.records.size()) << scenario_name(s);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      EXPECT_LE(std::abs(a.records[i].lhs - b.records[i].lhs), 1e-13 * (1 + std::abs(a.records[i].lhs)));
    }
  }
}

TEST(Io, ReportJsonAndCsvShapes) {
  const VerificationReport report = verify(random_config(Scenario::sequential_all_coupled, 2));
  const Json j = report_to_json(report, "2026-01-01T00:00:00Z");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["records"].size(), report.records.size());
  EXPECT_EQ(j["timestamp"]["generated_at"], "2026-01-01T00:00:00Z");
  std::ostringstream csv;
  write_report_csv(csv, {report});
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, csv_header());
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, static_cast<int>(report.records.size()));
}

TEST(Io, WeakValueQueryMatchesDirectComputation) {
  const Json query = parse_json(R"({
    "kind": "sequential",
    "system": {
      "initial": {"dim": 2, "data": [1, 0, 1, 0]},
      "final": {"dim": 2, "data": [1, 0, 0, 1]},
      "unitaries": [{"dim": 2, "data": [1, 0, 0, 0, 0, 0, 1, 0]}, {"dim": 2, "data": [1, 0, 0, 0, 0, 0, 1, 0]}],
      "observables": [{"dim": 2, "data": [1, 0, 0, 0, 0, 0, -1, 0]}]
    },
    "subsets": [[1]]})",
                                "query");
  const Json answer = answer_weak_value_query(query);
  // <f|Z|i>/<f|i> with |i> = (1,1)/sqrt2 and |f> = (1,i)/sqrt2.
  const Complex expected = Complex(1.0, 1.0) / Complex(1.0, -1.0);
  const Json& value = answer["results"][0]["value"];
  EXPECT_LE(std::abs(Complex(value["re"], value["im"]) - expected), 1e-15);
  Json bad = query;
  bad["kind"] = "unknown";
  EXPECT_THROW(answer_weak_value_query(bad), InputError);
}

TEST(Cli, AlgebraLogOnPairFixture) {
  const CliResult r = run({"algebra", "log", "-"}, kPairFixture);
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const Json out = parse_json(r.out, "stdout");
  EXPECT_LE(std::abs(entry(out, {1, 2}) - 4.0), 1e-12);
  EXPECT_LE(std::abs(entry(out, {1}) - 2.0), 1e-12);
}

TEST(Cli, AlgebraOperationsRoundTripThroughFiles) {
  const fs::path dir = scratch_dir("algebra");
  write_file(dir / "f.json", kPairFixture);
  ASSERT_EQ(run({"algebra", "log", (dir / "f.json").string(), "-o", (dir / "log.json").string()}).code, kExitPass);
  const CliResult back = run({"algebra", "exp", (dir / "log.json").string()});
  ASSERT_EQ(back.code, kExitPass) << back.err;
  EXPECT_LE(std::abs(entry(parse_json(back.out, "out"), {1, 2}) - 10.0), 1e-12);

  const CliResult conv = run({"algebra", "convolve", (dir / "f.json").string(), (dir / "f.json").string()});
  ASSERT_EQ(conv.code, kExitPass) << conv.err;
  // (f*f)({1,2}) = 2 f(12) f(0) + 2 f(1) f(2).
  EXPECT_LE(std::abs(entry(parse_json(conv.out, "out"), {1, 2}) - 32.0), 1e-12);

  const CliResult raised = run({"algebra", "raise", (dir / "f.json").string(), "--label", "2"});
  ASSERT_EQ(raised.code, kExitPass) << raised.err;
  EXPECT_LE(std::abs(entry(parse_json(raised.out, "out"), {1}) - 10.0), 1e-12);

  const CliResult series = run({"algebra", "series", "-", "--depth", "30"},
                               R"({"n": 1, "entries": [{"m": [], "re": 0.5}, {"m": [1], "re": 0.2}]})");
  ASSERT_EQ(series.code, kExitPass) << series.err;
  const Json s = parse_json(series.out, "out");
  EXPECT_EQ(s["depth"], 30);
  EXPECT_LE(std::abs(entry(s, {}) - std::log(1.5)), 1e-9);
  EXPECT_LE(std::abs(entry(s, {1}) - 0.2 / 1.5), 1e-9);
  fs::remove_all(dir);
}

TEST(Cli, FactorizingCheckExitCodes) {
  const char* product = R"({"n": 2, "entries": [
    {"m": [], "re": 1}, {"m": [1], "re": 2}, {"m": [2], "re": 3}, {"m": [1, 2], "re": 6}]})";
  EXPECT_EQ(run({"algebra", "factorizing-check", "-", "--first", "[1]", "--second", "[2]"}, product).code, kExitPass);
  EXPECT_EQ(run({"algebra", "factorizing-check", "-", "--first", "[1]", "--second", "[2]"}, kPairFixture).code,
            kExitVerificationFailure);
}

TEST(Cli, ErrorExitCodes) {
  const CliResult singular = run({"algebra", "log", "-"}, R"({"n": 1, "entries": [{"m": [1], "re": 1}]})");
  EXPECT_EQ(singular.code, kExitDomainError);
  EXPECT_NE(singular.err.find("domain error"), std::string::npos);

  const CliResult malformed = run({"algebra", "log", "-"}, "{\"n\": 1,, }");
  EXPECT_EQ(malformed.code, kExitInputError);
  EXPECT_NE(malformed.err.find("@byte"), std::string::npos);

  EXPECT_EQ(run({"algebra", "transpose", "-"}, kPairFixture).code, kExitInputError);
  EXPECT_EQ(run({"verify", "thm9"}).code, kExitInputError);
  EXPECT_EQ(run({"algebra", "log", "/nonexistent/f.json"}).code, kExitInputError);
  EXPECT_EQ(run({"nonsense"}).code, kExitInputError);
  EXPECT_EQ(run({"--help"}).code, kExitPass);
}

TEST(Cli, SeedRanges) {
  EXPECT_EQ(parse_seed_range("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seed_range("3..5"), (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_THROW(parse_seed_range("5..3"), InputError);
  EXPECT_THROW(parse_seed_range("a..b"), InputError);
}

TEST(Cli, VerifyWritesReportsAndManifest) {
  const fs::path dir = scratch_dir("verify");
  const CliResult r = run({"verify", "thm3", "--seeds", "1..3", "--pointers", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitPass) << r.err << r.out;
  EXPECT_NE(r.out.find("3/3 passed"), std::string::npos) << r.out;
  for (int seed = 1; seed <= 3; ++seed) {
    const std::string stem = "sequential-all-coupled-seed-" + std::to_string(seed);
    EXPECT_TRUE(fs::exists(dir / (stem + ".json")));
    EXPECT_TRUE(fs::exists(dir / (stem + ".csv")));
  }
  const Json manifest = read_json_file((dir / "manifest.json").string());
  EXPECT_EQ(manifest["files"].size(), 3u);
  EXPECT_EQ(manifest["passed"], true);

  const CliResult summary = run({"report", dir.string()});
  EXPECT_EQ(summary.code, kExitPass);
  EXPECT_NE(summary.out.find("3/3 passed"), std::string::npos);

  const CliResult zero = run({"verify", "thm4", "--hs", "zero", "--out", dir.string()});
  EXPECT_EQ(zero.code, kExitPass);
  EXPECT_NE(zero.out.find("theorem-2 regime"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, VerifyFromConfigFile) {
  const fs::path dir = scratch_dir("config");
  Json config = config_to_json(random_config(Scenario::thermal, 4));
  write_file(dir / "config.json", config.dump());
  const CliResult r =
      run({"verify", "thermal", "--config", (dir / "config.json").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  config["thermal"]["beta"] = -1.0;
  write_file(dir / "bad.json", config.dump());
  EXPECT_EQ(run({"verify", "thermal", "--config", (dir / "bad.json").string(), "--out", (dir / "out").string()}).code,
            kExitInputError);
  fs::remove_all(dir);
}

TEST_F(ToleranceEnv, EnvironmentSetsDefaultTolerance) {
  const fs::path dir = scratch_dir("env");
  setenv(kToleranceVariable, "1e-30", 1);
  // No floating-point pipeline reaches 1e-30, so the run must fail.
  EXPECT_EQ(run({"verify", "thm1", "--out", dir.string()}).code, kExitVerificationFailure);
  // An explicit flag overrides the environment.
  EXPECT_EQ(run({"verify", "thm1", "--tol", "1e-8", "--out", dir.string()}).code, kExitPass);
  const Json report = read_json_file((dir / "sequential-per-subset-seed-1.json").string());
  EXPECT_EQ(report["records"][0]["tolerance"], 1e-8);
  setenv(kToleranceVariable, "loose", 1);
  EXPECT_EQ(run({"verify", "thm1", "--out", dir.string()}).code, kExitInputError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace momentalg
