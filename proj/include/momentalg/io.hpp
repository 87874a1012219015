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

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "momentalg/experiments.hpp"

namespace momentalg {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent input; `location` is a JSON pointer such as /pointers/1/coupling.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Parses text, turning parser failures into InputError with a byte offset.
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);

/// {"dim": d, "data": [re, im, ...]} row-major; optional "hermitian"/"unitary" flags are validated.
Json matrix_to_json(const Matrix& m);
QOperator operator_from_json(const Json& j, const std::string& where);
Matrix matrix_from_json(const Json& j, const std::string& where);
/// {"dim": d, "data": [re, im, ...]}; normalized on ingestion.
Json state_to_json(const Vector& v);
Vector state_from_json(const Json& j, const std::string& where);

Json multiset_to_json(const Multiset& m);
Multiset multiset_from_json(const Json& j, const std::string& where);

/// {"schema":1, "n":2, "caps":[1,1], "entries":[{"m":[1,2], "re":..., "im":...}, ...]};
/// entries that are exactly zero are omitted, caps default to 1.
Json mmap_to_json(const ComplexMMap& f);
ComplexMMap mmap_from_json(const Json& j);

Json config_to_json(const ExperimentConfig& config);
/// Accepts explicit matrices or a {"random": {...}} block expanded through random_config.
ExperimentConfig config_from_json(const Json& j);

/// The report plus a "timestamp" object that holds the only non-reproducible fields.
Json report_to_json(const VerificationReport& report, const std::string& generated_at);
void write_report_csv(std::ostream& out, const std::vector<VerificationReport>& reports);
std::string csv_header();

/// Answers a weak-value query (see README for the schema).
Json answer_weak_value_query(const Json& query);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace momentalg
