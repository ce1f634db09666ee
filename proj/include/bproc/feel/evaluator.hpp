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
#include <string>
#include <string_view>

#include "bproc/feel/ast.hpp"
#include "bproc/feel/value.hpp"

namespace bproc::feel {

// Read-only variable lookup. Implementations must be safe for concurrent
// lookups; the evaluator never mutates an environment.
class Environment {
 public:
  virtual ~Environment() = default;
  // nullptr when the name is not bound at all. A bound-but-undefined
  // variable returns a pointer to a Null value.
  virtual const Value* lookup(std::string_view name) const = 0;
};

class MapEnvironment : public Environment {
 public:
  MapEnvironment() = default;
  explicit MapEnvironment(std::map<std::string, Value, std::less<>> bindings)
      : bindings_(std::move(bindings)) {}

  void set(std::string name, Value v) { bindings_[std::move(name)] = std::move(v); }
  const Value* lookup(std::string_view name) const override;

 private:
  std::map<std::string, Value, std::less<>> bindings_;
};

const Environment& emptyEnvironment();

Value evaluate(const Expr& e, const Environment& env);
inline Value evaluate(const ExprPtr& e, const Environment& env) { return evaluate(*e, env); }

// FEEL `=`: numbers compare by value across Integer/Decimal, null equals
// only null, otherwise kinds must agree (TypeError if they do not).
bool feelEquals(const Value& a, const Value& b);

// Ordering comparison for numbers, text and same-kind temporals.
// Returns <0, 0, >0. Throws UndefinedError on null, TypeError on mismatch.
int feelCompare(const Value& a, const Value& b);

bool rangeContains(const Range& r, const Value& v);

}  // namespace bproc::feel
