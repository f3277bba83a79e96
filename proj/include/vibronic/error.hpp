// Copyright 2026 The vibronic Authors
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

namespace vibronic {

// Base class for every error raised by the library. `exit_code()` is the
// process status the command-line tool reports for it.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

// Malformed input or a violated model invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Syntax error in a model document; carries a 1-based line/column.
class ParseError : public ValidationError {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : ValidationError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

// A dense or simulated object would exceed the desk-scale budget.
class SizeCapError : public Error {
  public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// Fixed-point overflow, rejected fits and similar numerical failures.
class NumericalError : public Error {
  public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace vibronic
