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

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bproc/feel/value.hpp"

namespace bproc::feel {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

enum class Builtin { Abs, Floor, Ceiling, Sqrt, Length, OverlapsBefore };

enum class InstanceType { String, Number, Boolean };

namespace node {

// Numeric, string, boolean and null literals.
struct Literal {
  Value value;
};
// date("...") / time("..."); `text` is the argument exactly as written.
struct TemporalLiteral {
  TemporalKind kind;
  std::string text;
};
struct Variable {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Builtin fn;
  std::vector<ExprPtr> args;
};
struct InstanceOf {
  ExprPtr operand;
  InstanceType type;
};
struct ListLiteral {
  std::vector<ExprPtr> items;
};
// base[index], 1-based; negative indexes count from the end.
struct Index {
  ExprPtr base;
  ExprPtr index;
};
// base[predicate]; `item` is bound to each element.
struct Filter {
  ExprPtr base;
  ExprPtr predicate;
};
struct ContextLiteral {
  std::vector<std::pair<std::string, ExprPtr>> entries;
};
struct Path {
  ExprPtr base;
  std::string member;
};
struct RangeLiteral {
  ExprPtr lo;
  ExprPtr hi;
  bool loClosed;
  bool hiClosed;
};
struct In {
  ExprPtr operand;
  ExprPtr container;
};

}  // namespace node

struct Expr {
  using Node = std::variant<node::Literal, node::TemporalLiteral, node::Variable, node::Unary,
                            node::Binary, node::Call, node::InstanceOf, node::ListLiteral,
                            node::Index, node::Filter, node::ContextLiteral, node::Path,
                            node::RangeLiteral, node::In>;
  Node node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

template <class T>
ExprPtr make(T n) {
  return std::make_shared<const Expr>(Expr{std::move(n)});
}

// Deep structural comparison; literals compare with Value structural equality.
bool structurallyEqual(const Expr& a, const Expr& b);

// Every variable name referenced (excluding `item` inside filter predicates
// that refer to the filtered element), in first-occurrence order.
std::vector<std::string> freeVariables(const Expr& e);

// True when the expression references no variables and so can be evaluated
// in an empty environment.
bool isConstant(const Expr& e);

// Replaces variable references by expressions (used to push task input
// mappings into decision-table header expressions).
ExprPtr substitute(const ExprPtr& e,
                   const std::vector<std::pair<std::string, ExprPtr>>& bindings);

const char* opSymbol(BinaryOp op);
const char* builtinName(Builtin fn);

}  // namespace bproc::feel
