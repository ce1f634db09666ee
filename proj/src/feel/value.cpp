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

#include "bproc/feel/value.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace bproc::feel {

Value::Value(List items) : data_(std::make_shared<const List>(std::move(items))) {}

Value Value::context(ContextEntries entries) {
  Value v;
  v.data_ = std::make_shared<const ContextEntries>(std::move(entries));
  return v;
}

Value::Value(Range r) : data_(std::make_shared<const Range>(std::move(r))) {}

double Value::asNumber() const {
  if (kind() == Kind::Integer) return static_cast<double>(asInteger());
  return asDecimal();
}

const Value* Value::field(std::string_view key) const {
  for (const auto& [k, v] : asContext()) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Null:
      return true;
    case Value::Kind::Boolean:
      return a.asBool() == b.asBool();
    case Value::Kind::Integer:
      return a.asInteger() == b.asInteger();
    case Value::Kind::Decimal:
      return a.asDecimal() == b.asDecimal();
    case Value::Kind::Text:
      return a.asText() == b.asText();
    case Value::Kind::Temporal:
      return a.asTemporal() == b.asTemporal();
    case Value::Kind::List:
      return a.asList() == b.asList();
    case Value::Kind::Context:
      return a.asContext() == b.asContext();
    case Value::Kind::Range:
      return a.asRange() == b.asRange();
  }
  return false;
}

const char* kindName(Value::Kind k) {
  switch (k) {
    case Value::Kind::Null: return "null";
    case Value::Kind::Boolean: return "boolean";
    case Value::Kind::Integer: return "integer";
    case Value::Kind::Decimal: return "decimal";
    case Value::Kind::Text: return "string";
    case Value::Kind::Temporal: return "temporal";
    case Value::Kind::List: return "list";
    case Value::Kind::Context: return "context";
    case Value::Kind::Range: return "range";
  }
  return "?";
}

namespace {

std::string renderDecimal(double d) {
  if (std::isnan(d) || std::isinf(d)) return "null";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

bool isIdentifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

}  // namespace

std::string renderTemporal(const Temporal& t) {
  char buf[48];
  if (t.kind == TemporalKind::Date) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{t.scalar}}};
    std::snprintf(buf, sizeof buf, "date(\"%04d-%02u-%02u\")", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  } else {
    std::snprintf(buf, sizeof buf, "time(\"%02lld:%02lld:%02lld\")",
                  static_cast<long long>(t.scalar / 3600),
                  static_cast<long long>((t.scalar / 60) % 60),
                  static_cast<long long>(t.scalar % 60));
  }
  return buf;
}

std::optional<Temporal> parseDate(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  std::string s(text);
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Temporal{TemporalKind::Date, sys_days{ymd}.time_since_epoch().count()};
}

std::optional<Temporal> parseTime(std::string_view text) {
  int h = 0, m = 0, sec = 0;
  char tail = 0;
  std::string s(text);
  if (std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &m, &sec, &tail) != 3) return std::nullopt;
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 59) return std::nullopt;
  return Temporal{TemporalKind::Time, h * 3600LL + m * 60LL + sec};
}

std::string render(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null:
      return "null";
    case Value::Kind::Boolean:
      return v.asBool() ? "true" : "false";
    case Value::Kind::Integer:
      return std::to_string(v.asInteger());
    case Value::Kind::Decimal:
      return renderDecimal(v.asDecimal());
    case Value::Kind::Text:
      return quote(v.asText());
    case Value::Kind::Temporal:
      return renderTemporal(v.asTemporal());
    case Value::Kind::List: {
      std::string out = "[";
      const auto& items = v.asList();
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += render(items[i]);
      }
      return out + "]";
    }
    case Value::Kind::Context: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, val] : v.asContext()) {
        if (!first) out += ", ";
        first = false;
        out += isIdentifier(k) ? k : quote(k);
        out += ": ";
        out += render(val);
      }
      return out + "}";
    }
    case Value::Kind::Range: {
      const Range& r = v.asRange();
      return std::string(r.loClosed ? "[" : "(") + render(r.lo) + ".." + render(r.hi) +
             (r.hiClosed ? "]" : ")");
    }
  }
  return "null";
}

bool canonicalLess(const Value& a, const Value& b) {
  if (a.isNumber() && b.isNumber()) {
    double x = a.asNumber(), y = b.asNumber();
    if (x != y) return x < y;
    return a.kind() < b.kind();
  }
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Value::Kind::Boolean:
      return a.asBool() < b.asBool();
    case Value::Kind::Text:
      return a.asText() < b.asText();
    case Value::Kind::Temporal:
      return std::pair(a.asTemporal().kind, a.asTemporal().scalar) <
             std::pair(b.asTemporal().kind, b.asTemporal().scalar);
    case Value::Kind::Null:
      return false;
    default:
      return render(a) < render(b);
  }
}

}  // namespace bproc::feel
