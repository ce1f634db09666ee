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
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bproc/feel/ast.hpp"
#include "bproc/feel/unary_test.hpp"

namespace bproc::feel {

enum class StaticType { IntegerT, DoubleT, StringT, BooleanT, DateT, TimeT, UnknownT };

const char* typeName(StaticType t);  // "Integer", "Double", ...
std::optional<StaticType> typeFromName(std::string_view name);

// Least upper bound: Unknown is the identity, Integer ⊔ Double = Double.
// Any other disagreement throws TypeConflict naming `variable`.
StaticType join(StaticType a, StaticType b, const std::string& variable);

StaticType typeOf(const Value& v);

using TypeMap = std::map<std::string, StaticType, std::less<>>;

// Accumulates type evidence from the places a variable meets constants.
class TypeInference {
 public:
  void addExpr(const Expr& e);
  // `subject` is the column's input expression; constants in `cell` type it.
  void addUnaryTest(const Expr& subject, const UnaryTest& cell);
  // `variable := e`; the variable gets the static type of `e`.
  void addAssignment(const std::string& variable, const Expr& e);
  void addValue(const std::string& variable, const Value& v);
  // Makes the variable known (UnknownT) without evidence.
  void declare(const std::string& variable);

  const TypeMap& result() const { return types_; }

  // Static type of an expression under the evidence gathered so far.
  StaticType typeOfExpr(const Expr& e) const;

 private:
  void note(const std::string& variable, StaticType t);
  void visit(const Expr& e);

  TypeMap types_;
};

TypeMap inferTypes(std::span<const ExprPtr> exprs);

}  // namespace bproc::feel
