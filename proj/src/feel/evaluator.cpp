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

#include "bproc/feel/evaluator.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "bproc/feel/errors.hpp"

namespace bproc::feel {

const Value* MapEnvironment::lookup(std::string_view name) const {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : &it->second;
}

const Environment& emptyEnvironment() {
  static const MapEnvironment empty;
  return empty;
}

namespace {

// Binds `item` (and the fields of a context element) over a parent scope.
class ItemEnvironment : public Environment {
 public:
  ItemEnvironment(const Environment& parent, const Value& item) : parent_(parent), item_(item) {}
  const Value* lookup(std::string_view name) const override {
    if (name == "item") return &item_;
    if (item_.kind() == Value::Kind::Context) {
      if (const Value* f = item_.field(name)) return f;
    }
    return parent_.lookup(name);
  }

 private:
  const Environment& parent_;
  const Value& item_;
};

[[noreturn]] void mismatch(const char* op, const Value& a, const Value& b) {
  throw TypeError(std::string("cannot apply '") + op + "' to " + kindName(a.kind()) + " and " +
                  kindName(b.kind()));
}

void requireDefined(const char* op, const Value& a, const Value& b) {
  if (a.isNull() || b.isNull()) {
    throw UndefinedError(std::string("'") + op + "' applied to an undefined value");
  }
}

std::optional<std::int64_t> exactInteger(double d) {
  if (!std::isfinite(d) || d != std::floor(d)) return std::nullopt;
  if (d < -9.2e18 || d > 9.2e18) return std::nullopt;
  return static_cast<std::int64_t>(d);
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  const char* sym = opSymbol(op);
  requireDefined(sym, a, b);
  if (op == BinaryOp::Add) {
    if (a.kind() == Value::Kind::Text && b.kind() == Value::Kind::Text) {
      return Value(a.asText() + b.asText());
    }
    if (a.kind() == Value::Kind::Temporal && b.kind() == Value::Kind::Temporal) {
      const auto& x = a.asTemporal();
      const auto& y = b.asTemporal();
      if (x.kind == TemporalKind::Time && y.kind == TemporalKind::Time) {
        return Value(Temporal{TemporalKind::Time, (x.scalar + y.scalar) % 86400});
      }
      mismatch(sym, a, b);
    }
  }
  if (!a.isNumber() || !b.isNumber()) mismatch(sym, a, b);

  bool ints = a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer;
  if (op == BinaryOp::Div && b.asNumber() == 0.0) throw DivisionByZero("division by zero");
  if (ints) {
    std::int64_t x = a.asInteger(), y = b.asInteger(), r = 0;
    switch (op) {
      case BinaryOp::Add:
        if (!__builtin_add_overflow(x, y, &r)) return Value(r);
        break;
      case BinaryOp::Sub:
        if (!__builtin_sub_overflow(x, y, &r)) return Value(r);
        break;
      case BinaryOp::Mul:
        if (!__builtin_mul_overflow(x, y, &r)) return Value(r);
        break;
      case BinaryOp::Div:
        if (y != -1 && x % y == 0) return Value(x / y);
        if (y == -1 && x != std::numeric_limits<std::int64_t>::min()) return Value(-x);
        break;
      case BinaryOp::Pow:
        if (y >= 0) {
          if (x == -1) return Value(std::int64_t{y % 2 ? -1 : 1});
          if (x == 0 || x == 1) return Value(y == 0 ? std::int64_t{1} : x);
          std::int64_t acc = 1;
          bool overflow = false;
          for (std::int64_t i = 0; i < y && !overflow; ++i) {
            overflow = __builtin_mul_overflow(acc, x, &acc);
          }
          if (!overflow) return Value(acc);
        }
        break;
      default:
        break;
    }
  }
  double x = a.asNumber(), y = b.asNumber();
  double r = 0;
  switch (op) {
    case BinaryOp::Add: r = x + y; break;
    case BinaryOp::Sub: r = x - y; break;
    case BinaryOp::Mul: r = x * y; break;
    case BinaryOp::Div: r = x / y; break;
    case BinaryOp::Pow: r = std::pow(x, y); break;
    default: mismatch(sym, a, b);
  }
  if (std::isnan(r)) throw TypeError(std::string("'") + sym + "' has no real result");
  return Value(r);
}

Value negate(const Value& v) {
  if (v.isNull()) throw UndefinedError("'-' applied to an undefined value");
  if (v.kind() == Value::Kind::Integer) {
    if (v.asInteger() == std::numeric_limits<std::int64_t>::min()) {
      return Value(-static_cast<double>(v.asInteger()));
    }
    return Value(-v.asInteger());
  }
  if (v.kind() == Value::Kind::Decimal) return Value(-v.asDecimal());
  throw TypeError(std::string("cannot negate ") + kindName(v.kind()));
}

bool asCondition(const Value& v, const char* op) {
  if (v.isNull()) throw UndefinedError(std::string("'") + op + "' applied to an undefined value");
  if (v.kind() != Value::Kind::Boolean) {
    throw TypeError(std::string("'") + op + "' expects boolean, got " + kindName(v.kind()));
  }
  return v.asBool();
}

Value roundTo(double d) {
  if (auto i = exactInteger(d)) return Value(*i);
  return Value(d);
}

std::size_t utf8Length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

bool overlapsBefore(const Range& a, const Range& b) {
  int ss = feelCompare(a.lo, b.lo);
  int es = feelCompare(a.hi, b.lo);
  int ee = feelCompare(a.hi, b.hi);
  bool startOk = ss < 0 || (ss == 0 && a.loClosed && !b.loClosed);
  bool overlapOk = es > 0 || (es == 0 && a.hiClosed && b.loClosed);
  bool endOk = ee < 0 || (ee == 0 && (!a.hiClosed || b.hiClosed));
  return startOk && overlapOk && endOk;
}

Value call(const node::Call& c, const Environment& env) {
  std::vector<Value> args;
  for (const auto& a : c.args) args.push_back(evaluate(*a, env));
  const Value& v = args.at(0);
  const char* name = builtinName(c.fn);
  auto needNumber = [&]() {
    if (v.isNull()) throw UndefinedError(std::string(name) + " of an undefined value");
    if (!v.isNumber()) {
      throw TypeError(std::string(name) + " expects a number, got " + kindName(v.kind()));
    }
  };
  switch (c.fn) {
    case Builtin::Abs:
      needNumber();
      if (v.kind() == Value::Kind::Integer) return v.asInteger() < 0 ? negate(v) : v;
      return Value(std::fabs(v.asDecimal()));
    case Builtin::Floor:
      needNumber();
      return v.kind() == Value::Kind::Integer ? v : roundTo(std::floor(v.asDecimal()));
    case Builtin::Ceiling:
      needNumber();
      return v.kind() == Value::Kind::Integer ? v : roundTo(std::ceil(v.asDecimal()));
    case Builtin::Sqrt:
      needNumber();
      if (v.asNumber() < 0) throw TypeError("sqrt of a negative number");
      return Value(std::sqrt(v.asNumber()));
    case Builtin::Length:
      if (v.kind() == Value::Kind::Text) return Value(static_cast<std::int64_t>(utf8Length(v.asText())));
      if (v.kind() == Value::Kind::List) return Value(static_cast<std::int64_t>(v.asList().size()));
      if (v.isNull()) throw UndefinedError("length of an undefined value");
      throw TypeError(std::string("length expects string or list, got ") + kindName(v.kind()));
    case Builtin::OverlapsBefore: {
      const Value& w = args.at(1);
      requireDefined(name, v, w);
      if (v.kind() != Value::Kind::Range || w.kind() != Value::Kind::Range) mismatch(name, v, w);
      return Value(overlapsBefore(v.asRange(), w.asRange()));
    }
  }
  throw TypeError("unknown builtin");
}

bool contains(const Value& container, const Value& v) {
  switch (container.kind()) {
    case Value::Kind::List:
      for (const auto& item : container.asList()) {
        if (item.kind() == Value::Kind::Range ? rangeContains(item.asRange(), v)
                                              : feelEquals(v, item)) {
          return true;
        }
      }
      return false;
    case Value::Kind::Range:
      return rangeContains(container.asRange(), v);
    default:
      return feelEquals(v, container);
  }
}

Value index(const Value& base, const Value& idx) {
  if (base.isNull() || idx.isNull()) throw UndefinedError("indexing an undefined value");
  if (base.kind() != Value::Kind::List) {
    throw TypeError(std::string("cannot index ") + kindName(base.kind()));
  }
  std::optional<std::int64_t> i;
  if (idx.kind() == Value::Kind::Integer) i = idx.asInteger();
  else if (idx.kind() == Value::Kind::Decimal) i = exactInteger(idx.asDecimal());
  if (!i) throw TypeError(std::string("list index must be an integer, got ") + render(idx));
  const auto& items = base.asList();
  auto n = static_cast<std::int64_t>(items.size());
  std::int64_t pos = *i > 0 ? *i - 1 : n + *i;
  if (*i == 0 || pos < 0 || pos >= n) {
    throw IndexOutOfRange("index " + std::to_string(*i) + " out of range for list of " +
                          std::to_string(n));
  }
  return items[static_cast<std::size_t>(pos)];
}

}  // namespace

bool feelEquals(const Value& a, const Value& b) {
  if (a.isNull() || b.isNull()) return a.isNull() && b.isNull();
  if (a.isNumber() && b.isNumber()) {
    if (a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer) {
      return a.asInteger() == b.asInteger();
    }
    return a.asNumber() == b.asNumber();
  }
  if (a.kind() != b.kind()) mismatch("=", a, b);
  switch (a.kind()) {
    case Value::Kind::Temporal:
      if (a.asTemporal().kind != b.asTemporal().kind) mismatch("=", a, b);
      return a.asTemporal().scalar == b.asTemporal().scalar;
    case Value::Kind::List: {
      const auto& x = a.asList();
      const auto& y = b.asList();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].kind() != y[i].kind() && !(x[i].isNumber() && y[i].isNumber())) return false;
        if (!feelEquals(x[i], y[i])) return false;
      }
      return true;
    }
    default:
      return a == b;
  }
}

int feelCompare(const Value& a, const Value& b) {
  requireDefined("<", a, b);
  if (a.isNumber() && b.isNumber()) {
    if (a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer) {
      return a.asInteger() < b.asInteger() ? -1 : (a.asInteger() > b.asInteger() ? 1 : 0);
    }
    double x = a.asNumber(), y = b.asNumber();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.kind() == Value::Kind::Text && b.kind() == Value::Kind::Text) {
    int c = a.asText().compare(b.asText());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.kind() == Value::Kind::Temporal && b.kind() == Value::Kind::Temporal &&
      a.asTemporal().kind == b.asTemporal().kind) {
    auto x = a.asTemporal().scalar, y = b.asTemporal().scalar;
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  mismatch("<", a, b);
}

bool rangeContains(const Range& r, const Value& v) {
  int lo = feelCompare(v, r.lo);
  int hi = feelCompare(v, r.hi);
  return (lo > 0 || (lo == 0 && r.loClosed)) && (hi < 0 || (hi == 0 && r.hiClosed));
}

Value evaluate(const Expr& e, const Environment& env) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, node::TemporalLiteral>) {
          auto t = n.kind == TemporalKind::Date ? parseDate(n.text) : parseTime(n.text);
          if (!t) throw TypeError("malformed temporal literal \"" + n.text + "\"");
          return Value(*t);
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          const Value* v = env.lookup(n.name);
          if (!v) throw UndefinedError("unbound variable '" + n.name + "'");
          return *v;
        } else if constexpr (std::is_same_v<T, node::Unary>) {
          Value v = evaluate(*n.operand, env);
          if (n.op == UnaryOp::Neg) return negate(v);
          return Value(!asCondition(v, "not"));
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            const char* sym = opSymbol(n.op);
            bool lhs = asCondition(evaluate(*n.lhs, env), sym);
            if (n.op == BinaryOp::And && !lhs) return Value(false);
            if (n.op == BinaryOp::Or && lhs) return Value(true);
            return Value(asCondition(evaluate(*n.rhs, env), sym));
          }
          Value a = evaluate(*n.lhs, env);
          Value b = evaluate(*n.rhs, env);
          switch (n.op) {
            case BinaryOp::Eq: return Value(feelEquals(a, b));
            case BinaryOp::Ne: return Value(!feelEquals(a, b));
            case BinaryOp::Lt: return Value(feelCompare(a, b) < 0);
            case BinaryOp::Le: return Value(feelCompare(a, b) <= 0);
            case BinaryOp::Gt: return Value(feelCompare(a, b) > 0);
            case BinaryOp::Ge: return Value(feelCompare(a, b) >= 0);
            default: return arithmetic(n.op, a, b);
          }
        } else if constexpr (std::is_same_v<T, node::Call>) {
          return call(n, env);
        } else if constexpr (std::is_same_v<T, node::InstanceOf>) {
          Value v = evaluate(*n.operand, env);
          switch (n.type) {
            case InstanceType::String: return Value(v.kind() == Value::Kind::Text);
            case InstanceType::Number: return Value(v.isNumber());
            case InstanceType::Boolean: return Value(v.kind() == Value::Kind::Boolean);
          }
          return Value(false);
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          List items;
          items.reserve(n.items.size());
          for (const auto& item : n.items) items.push_back(evaluate(*item, env));
          return Value(std::move(items));
        } else if constexpr (std::is_same_v<T, node::Index>) {
          return index(evaluate(*n.base, env), evaluate(*n.index, env));
        } else if constexpr (std::is_same_v<T, node::Filter>) {
          Value base = evaluate(*n.base, env);
          if (base.isNull()) throw UndefinedError("filtering an undefined value");
          if (base.kind() != Value::Kind::List) {
            throw TypeError(std::string("cannot filter ") + kindName(base.kind()));
          }
          List kept;
          for (const auto& item : base.asList()) {
            ItemEnvironment scope(env, item);
            Value keep = evaluate(*n.predicate, scope);
            if (keep.kind() == Value::Kind::Boolean) {
              if (keep.asBool()) kept.push_back(item);
            } else if (!keep.isNull()) {
              throw TypeError(std::string("filter predicate returned ") + kindName(keep.kind()));
            }
          }
          return Value(std::move(kept));
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          ContextEntries entries;
          for (const auto& [k, v] : n.entries) entries.emplace_back(k, evaluate(*v, env));
          return Value::context(std::move(entries));
        } else if constexpr (std::is_same_v<T, node::Path>) {
          Value base = evaluate(*n.base, env);
          if (base.isNull()) throw UndefinedError("path access on an undefined value");
          if (base.kind() != Value::Kind::Context) {
            throw TypeError(std::string("path access on ") + kindName(base.kind()));
          }
          const Value* f = base.field(n.member);
          return f ? *f : Value();
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          Value lo = evaluate(*n.lo, env);
          Value hi = evaluate(*n.hi, env);
          feelCompare(lo, hi);  // endpoints must be mutually comparable
          return Value(Range{std::move(lo), std::move(hi), n.loClosed, n.hiClosed});
        } else if constexpr (std::is_same_v<T, node::In>) {
          Value v = evaluate(*n.operand, env);
          return Value(contains(evaluate(*n.container, env), v));
        }
      },
      e.node);
}

}  // namespace bproc::feel
