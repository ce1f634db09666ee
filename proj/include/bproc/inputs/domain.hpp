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

#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bproc/error.hpp"
#include "bproc/feel/ast.hpp"
#include "bproc/feel/types.hpp"
#include "bproc/feel/unary_test.hpp"
#include "bproc/feel/value.hpp"

namespace bproc::bpmn {
struct ProcessModel;
}
namespace bproc::dmn {
struct DecisionTable;
}

namespace bproc::inputs {

struct Domain {
  enum class Kind { Enum, Ball, Range, Unhandled };

  Kind kind = Kind::Unhandled;
  std::vector<feel::Value> values;  // Enum, canonical order, no duplicates
  feel::Value center;               // Ball
  feel::Range range;                // Range
  std::vector<std::string> exprs;   // Unhandled, sorted source texts

  static Domain enumeration(std::vector<feel::Value> values);
  static Domain ball(feel::Value center);
  static Domain interval(feel::Range r);
  static Domain unhandled(std::vector<std::string> exprs);

  friend bool operator==(const Domain&, const Domain&) = default;
};

// ENUM("a","b"), BALL(9), RANGE((11,50]), UNHANDLED(e1;e2)
std::string render(const Domain& d);

struct SamplingOptions {
  double minRadius = 1.0;     // R = max(minRadius, radiusScale * |w|)
  double radiusScale = 1.0;
  double boundaryBias = 0.3;  // probability of drawing w or one of its neighbours
};

double ballRadius(const feel::Value& center, const SamplingOptions& opts = {});

struct InputSpec {
  std::string name;
  feel::StaticType type = feel::StaticType::UnknownT;
  Domain domain;
  feel::Value sample;
  std::vector<feel::Value> overrides;  // from `override` lines

  friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& m)
      : Error("ParseError", "line " + std::to_string(line) + ": " + m), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DomainMismatch : public Error {
 public:
  explicit DomainMismatch(const std::string& m) : Error("DomainMismatch", m) {}
};

class MissingOverride : public Error {
 public:
  explicit MissingOverride(const std::string& variable)
      : Error("MissingOverride", "variable '" + variable +
                                     "' has an unhandled domain; add `override " + variable +
                                     " = v1, v2, ...` to the inputs file"),
        variable_(variable) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

// Places where input variables meet expressions.
struct ConditionSite {
  feel::ExprPtr expr;
  bool gatewayHasDefault = false;
};
struct CellSite {
  feel::ExprPtr subject;  // table input expression after the task's input mapping
  feel::UnaryTestPtr cell;
};
struct Sites {
  std::vector<ConditionSite> conditions;
  std::vector<CellSite> cells;
  std::vector<feel::ExprPtr> values;  // assignments, table arguments, message parts
};

Sites collectSites(const bpmn::ProcessModel& m, const std::vector<dmn::DecisionTable>& tables);

struct Inference {
  std::map<std::string, Domain, std::less<>> domains;
  std::vector<std::string> diagnostics;
};

Inference inferDomains(const std::set<std::string>& inputVars, const Sites& sites,
                       const SamplingOptions& opts = {});

bool contains(const Domain& d, feel::StaticType t, const feel::Value& v,
              const SamplingOptions& opts = {});

// Throws MissingOverride for Unhandled (the variable name is unknown here).
feel::Value sampleDomain(const Domain& d, feel::StaticType t, std::mt19937_64& rng,
                         const SamplingOptions& opts = {});

// Uses the override list when present, the domain otherwise.
feel::Value sample(const InputSpec& spec, std::mt19937_64& rng, const SamplingOptions& opts = {});

// Placeholder sample for Unhandled variables: 0, 0.0, "", false or null.
feel::Value typeDefault(feel::StaticType t);

std::string writeInputsFile(const std::vector<InputSpec>& specs);
std::vector<InputSpec> parseInputsFile(std::string_view text, const SamplingOptions& opts = {});

}  // namespace bproc::inputs
