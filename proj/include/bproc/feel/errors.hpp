// Copyright 2026 The bproc Authors.
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

#include <string>
#include <vector>

#include "bproc/error.hpp"

namespace bproc::feel {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t column, std::vector<std::string> expected, const std::string& detail)
      : Error("SyntaxError", format(column, expected, detail)),
        column_(column),
        expected_(std::move(expected)) {}

  /// 1-based column of the offending token.
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t column, const std::vector<std::string>& expected,
                            const std::string& detail) {
    std::string msg = "column " + std::to_string(column) + ": " + detail;
    if (!expected.empty()) {
      msg += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += ", ";
        msg += expected[i];
      }
      msg += ")";
    }
    return msg;
  }

  std::size_t column_;
  std::vector<std::string> expected_;
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& m) : Error("TypeError", m) {}
};

// Arithmetic or ordering touched the undefined value.
class UndefinedError : public Error {
 public:
  explicit UndefinedError(const std::string& m) : Error("UndefinedError", m) {}
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const std::string& m) : Error("DivisionByZero", m) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& m) : Error("IndexOutOfRange", m) {}
};

class TypeConflict : public Error {
 public:
  TypeConflict(std::string variable, const std::string& m)
      : Error("TypeConflict", m), variable_(std::move(variable)) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

}  // namespace bproc::feel
