// Copyright 2026 The davqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace davqe {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: ParseError 2, ConstraintError 3, BudgetError 4,
// NumericError 5.

// Malformed input text or structured file. Carries a 1-based line/column
// when the failure is tied to a location in the input (0 when it is not).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

// A physical or structural constraint was violated: atom spacing, qubit
// caps, parameter bounds, dimension mismatches.
class ConstraintError : public std::invalid_argument {
 public:
  explicit ConstraintError(const std::string& message)
      : std::invalid_argument(message) {}
};

// A shot or evaluation budget cannot accommodate the request.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& message)
      : std::runtime_error(message) {}
};

// Numerical breakdown: non-finite amplitudes, norm drift, non-Hermitian
// residues beyond tolerance.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace davqe
