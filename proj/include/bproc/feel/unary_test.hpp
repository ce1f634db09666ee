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
#include <string_view>
#include <variant>
#include <vector>

#include "bproc/feel/ast.hpp"
#include "bproc/feel/evaluator.hpp"
#include "bproc/feel/value.hpp"

namespace bproc::feel {

struct UnaryTest;
using UnaryTestPtr = std::shared_ptr<const UnaryTest>;

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

namespace test {
struct Dash {};
struct EqualsConst {
  Value value;
};
struct Comparison {
  CompareOp op;
  ExprPtr operand;
};
struct RangeTest {
  Range range;
};
struct Negation {
  UnaryTestPtr inner;
};
struct Disjunction {
  std::vector<UnaryTestPtr> alternatives;
};
}  // namespace test

// A decision-table input cell.
struct UnaryTest {
  std::variant<test::Dash, test::EqualsConst, test::Comparison, test::RangeTest, test::Negation,
               test::Disjunction>
      node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  bool isDash() const { return as<test::Dash>() != nullptr; }
};

// Parses cell text: `-`, `"a","b"`, `< 5`, `[3..10]`, `not("x")`, constants.
// Empty text is a dash.
UnaryTestPtr parseUnaryTests(std::string_view text);

std::string render(const UnaryTest& t);

// Does `v` satisfy the cell? Comparison operands are evaluated in `env`.
bool matchUnary(const UnaryTest& t, const Value& v, const Environment& env = emptyEnvironment());

const char* compareSymbol(CompareOp op);

}  // namespace bproc::feel
