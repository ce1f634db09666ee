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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bproc::feel {

class Value;

enum class TemporalKind { Date, Time };

// Dates are days since 1970-01-01; times are seconds since midnight.
struct Temporal {
  TemporalKind kind;
  std::int64_t scalar;

  friend bool operator==(const Temporal&, const Temporal&) = default;
};

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

using List = std::vector<Value>;
using ContextEntries = std::vector<std::pair<std::string, Value>>;

struct Range;

// Immutable runtime value of the expression subset. Compound payloads are
// shared so values copy cheaply and can be read from several threads.
class Value {
 public:
  enum class Kind { Null, Boolean, Integer, Decimal, Text, Temporal, List, Context, Range };

  Value() = default;
  Value(Null) {}
  Value(bool b) : data_(b) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i) : data_(i) {}
  Value(double d) : data_(d) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(Temporal t) : data_(t) {}
  Value(List items);
  static Value context(ContextEntries entries);
  Value(Range r);

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool isNull() const noexcept { return kind() == Kind::Null; }
  bool isNumber() const noexcept { return kind() == Kind::Integer || kind() == Kind::Decimal; }

  bool asBool() const { return std::get<bool>(data_); }
  std::int64_t asInteger() const { return std::get<std::int64_t>(data_); }
  double asDecimal() const { return std::get<double>(data_); }
  // Integer or Decimal widened to double.
  double asNumber() const;
  const std::string& asText() const { return std::get<std::string>(data_); }
  const Temporal& asTemporal() const { return std::get<Temporal>(data_); }
  const List& asList() const { return *std::get<std::shared_ptr<const List>>(data_); }
  const ContextEntries& asContext() const {
    return *std::get<std::shared_ptr<const ContextEntries>>(data_);
  }
  const Range& asRange() const { return *std::get<std::shared_ptr<const Range>>(data_); }

  // Context lookup; nullptr when the key is absent.
  const Value* field(std::string_view key) const;

  // Structural equality: same kind and equal payload; Integer 2 and Decimal
  // 2.0 are different values here (see numericEquals for FEEL `=`).
  friend bool operator==(const Value& a, const Value& b);

 private:
  std::variant<Null, bool, std::int64_t, double, std::string, Temporal,
               std::shared_ptr<const List>, std::shared_ptr<const ContextEntries>,
               std::shared_ptr<const Range>>
      data_;
};

struct Range {
  Value lo;
  Value hi;
  bool loClosed = true;
  bool hiClosed = true;

  friend bool operator==(const Range&, const Range&) = default;
};

const char* kindName(Value::Kind k);

// Renders a value as expression source that parses back to an equal value.
std::string render(const Value& v);

std::string renderTemporal(const Temporal& t);
std::optional<Temporal> parseDate(std::string_view text);
std::optional<Temporal> parseTime(std::string_view text);

// Total order used to canonicalise value sets (kind first, then payload).
bool canonicalLess(const Value& a, const Value& b);

}  // namespace bproc::feel
