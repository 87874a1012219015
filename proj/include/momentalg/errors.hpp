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

#include <stdexcept>
#include <string>

namespace momentalg {

/// A precondition on the value of an argument was violated (f(∅) = 0 for log*,
/// |f(∅)| >= 1 for the log series, a multiplicity cap exceeded, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operands have incompatible shapes (ground sets, caps, matrix dimensions).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The postselection amplitude <psi_f|U...|psi_i> is below the configured floor.
class SingularPostselection : public DomainError {
 public:
  explicit SingularPostselection(double amplitude, double floor)
      : DomainError("singular postselection: |<psi_f|...|psi_i>| = " + std::to_string(amplitude) +
                    " is below the floor " + std::to_string(floor)),
        amplitude_(amplitude) {}

  double amplitude() const { return amplitude_; }

 private:
  double amplitude_;
};

}  // namespace momentalg
