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

#include <stdexcept>
#include <string>

namespace bproc {

// Base of every diagnostic the toolchain throws. `kind()` is a stable short
// name ("SyntaxError", "NoMatch", ...) used in summaries and exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace bproc

namespace bproc {

// Structurally invalid BPMN/DMN document.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error("SchemaError", m) {}
};

}  // namespace bproc
