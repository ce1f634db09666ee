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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bproc/error.hpp"
#include "bproc/feel/ast.hpp"
#include "bproc/feel/unary_test.hpp"
#include "bproc/feel/value.hpp"

namespace bproc::dmn {

enum class HitPolicy { First, Unique, Any };

const char* hitPolicyName(HitPolicy p);

struct InputClause {
  std::string label;
  feel::ExprPtr expression;  // header expression over process variables
};

struct Rule {
  std::vector<feel::UnaryTestPtr> inputEntries;
  std::vector<feel::ExprPtr> outputEntries;  // variable-free
  std::string annotation;

  bool isDefault() const;  // every input entry is a dash
};

struct DecisionTable {
  std::string id;    // decision id, the name business-rule tasks refer to
  std::string name;
  HitPolicy hitPolicy = HitPolicy::First;
  std::vector<InputClause> inputs;
  std::vector<std::string> outputs;
  std::vector<Rule> rules;
};

struct TableResult {
  std::vector<feel::Value> outputs;  // aligned with DecisionTable::outputs
  std::size_t rule;                  // 0-based index of the selected rule
};

class UnsupportedHitPolicy : public Error {
 public:
  explicit UnsupportedHitPolicy(const std::string& m) : Error("UnsupportedHitPolicy", m) {}
};

class NoMatch : public Error {
 public:
  explicit NoMatch(const std::string& table)
      : Error("NoMatch", "no rule of table '" + table + "' matches and there is no default row") {}
};

class UniquenessViolation : public Error {
 public:
  explicit UniquenessViolation(const std::string& m) : Error("UniquenessViolation", m) {}
};

class AnyConflict : public Error {
 public:
  explicit AnyConflict(const std::string& m) : Error("AnyConflict", m) {}
};

std::vector<DecisionTable> parseDmn(std::string_view xml);

// `args` are the values of in_1..in_k, already evaluated by the caller.
TableResult evaluateTable(const DecisionTable& t, const std::vector<feel::Value>& args);

}  // namespace bproc::dmn
