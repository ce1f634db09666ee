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

#include "bproc/feel/types.hpp"

#include "bproc/feel/errors.hpp"

namespace bproc::feel {

const char* typeName(StaticType t) {
  switch (t) {
    case StaticType::IntegerT: return "Integer";
    case StaticType::DoubleT: return "Double";
    case StaticType::StringT: return "String";
    case StaticType::BooleanT: return "Boolean";
    case StaticType::DateT: return "Date";
    case StaticType::TimeT: return "Time";
    case StaticType::UnknownT: return "Unknown";
  }
  return "Unknown";
}

std::optional<StaticType> typeFromName(std::string_view name) {
  for (auto t : {StaticType::IntegerT, StaticType::DoubleT, StaticType::StringT,
                 StaticType::BooleanT, StaticType::DateT, StaticType::TimeT,
                 StaticType::UnknownT}) {
    if (name == typeName(t)) return t;
  }
  return std::nullopt;
}

StaticType join(StaticType a, StaticType b, const std::string& variable) {
  if (a == b || b == StaticType::UnknownT) return a;
  if (a == StaticType::UnknownT) return b;
  auto numeric = [](StaticType t) {
    return t == StaticType::IntegerT || t == StaticType::DoubleT;
  };
  if (numeric(a) && numeric(b)) return StaticType::DoubleT;
  throw TypeConflict(variable, "variable '" + variable + "' is used both as " + typeName(a) +
                                   " and as " + typeName(b));
}

StaticType typeOf(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Boolean: return StaticType::BooleanT;
    case Value::Kind::Integer: return StaticType::IntegerT;
    case Value::Kind::Decimal: return StaticType::DoubleT;
    case Value::Kind::Text: return StaticType::StringT;
    case Value::Kind::Temporal:
      return v.asTemporal().kind == TemporalKind::Date ? StaticType::DateT : StaticType::TimeT;
    default: return StaticType::UnknownT;
  }
}

void TypeInference::declare(const std::string& variable) { types_.try_emplace(variable, StaticType::UnknownT); }

void TypeInference::note(const std::string& variable, StaticType t) {
  auto it = types_.find(variable);
  if (it == types_.end()) {
    types_.emplace(variable, t);
    return;
  }
  it->second = join(it->second, t, variable);
}

namespace {

bool isComparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
    case BinaryOp::Eq: case BinaryOp::Ne:
      return true;
    default:
      return false;
  }
}

bool isArithmetic(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul: case BinaryOp::Div:
    case BinaryOp::Pow:
      return true;
    default:
      return false;
  }
}

const std::string* variableName(const Expr& e) {
  const auto* v = e.as<node::Variable>();
  return v ? &v->name : nullptr;
}

bool isNullLiteral(const Expr& e) {
  const auto* l = e.as<node::Literal>();
  return l && l->value.isNull();
}

}  // namespace

StaticType TypeInference::typeOfExpr(const Expr& e) const {
  return std::visit(
      [&](const auto& n) -> StaticType {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          return typeOf(n.value);
        } else if constexpr (std::is_same_v<T, node::TemporalLiteral>) {
          return n.kind == TemporalKind::Date ? StaticType::DateT : StaticType::TimeT;
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          auto it = types_.find(n.name);
          return it == types_.end() ? StaticType::UnknownT : it->second;
        } else if constexpr (std::is_same_v<T, node::Unary>) {
          return n.op == UnaryOp::Not ? StaticType::BooleanT : typeOfExpr(*n.operand);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          if (!isArithmetic(n.op)) return StaticType::BooleanT;
          StaticType a = typeOfExpr(*n.lhs), b = typeOfExpr(*n.rhs);
          if (n.op == BinaryOp::Add && (a == StaticType::StringT || b == StaticType::StringT)) {
            return StaticType::StringT;
          }
          if (n.op == BinaryOp::Add && (a == StaticType::TimeT || b == StaticType::TimeT)) {
            return StaticType::TimeT;
          }
          if (a == StaticType::DoubleT || b == StaticType::DoubleT) return StaticType::DoubleT;
          if (a == StaticType::IntegerT && b == StaticType::IntegerT) {
            return n.op == BinaryOp::Div ? StaticType::DoubleT : StaticType::IntegerT;
          }
          return StaticType::UnknownT;
        } else if constexpr (std::is_same_v<T, node::Call>) {
          switch (n.fn) {
            case Builtin::Abs: return typeOfExpr(*n.args.at(0));
            case Builtin::Floor:
            case Builtin::Ceiling:
            case Builtin::Length: return StaticType::IntegerT;
            case Builtin::Sqrt: return StaticType::DoubleT;
            case Builtin::OverlapsBefore: return StaticType::BooleanT;
          }
          return StaticType::UnknownT;
        } else if constexpr (std::is_same_v<T, node::InstanceOf> || std::is_same_v<T, node::In>) {
          return StaticType::BooleanT;
        } else {
          return StaticType::UnknownT;
        }
      },
      e.node);
}

void TypeInference::visit(const Expr& e) {
  if (const auto* name = variableName(e)) {
    declare(*name);
    return;
  }
  if (const auto* b = e.as<node::Binary>()) {
    visit(*b->lhs);
    visit(*b->rhs);
    if (b->op == BinaryOp::And || b->op == BinaryOp::Or) {
      if (const auto* v = variableName(*b->lhs)) note(*v, StaticType::BooleanT);
      if (const auto* v = variableName(*b->rhs)) note(*v, StaticType::BooleanT);
      return;
    }
    if (isComparison(b->op) || isArithmetic(b->op)) {
      // Only constants count as evidence so the result is order-independent.
      auto evidence = [&](const Expr& var, const Expr& other) {
        const auto* v = variableName(var);
        if (!v || !isConstant(other) || isNullLiteral(other)) return;
        StaticType t = typeOfExpr(other);
        if (isArithmetic(b->op) && b->op != BinaryOp::Add && t == StaticType::StringT) return;
        note(*v, t);
      };
      evidence(*b->lhs, *b->rhs);
      evidence(*b->rhs, *b->lhs);
    }
    return;
  }
  if (const auto* u = e.as<node::Unary>()) {
    visit(*u->operand);
    if (const auto* v = variableName(*u->operand); v && u->op == UnaryOp::Not) {
      note(*v, StaticType::BooleanT);
    }
    return;
  }
  if (const auto* in = e.as<node::In>()) {
    visit(*in->operand);
    visit(*in->container);
    const auto* v = variableName(*in->operand);
    if (!v) return;
    if (const auto* list = in->container->as<node::ListLiteral>()) {
      for (const auto& item : list->items) {
        if (isConstant(*item) && !isNullLiteral(*item)) note(*v, typeOfExpr(*item));
      }
    } else if (const auto* r = in->container->as<node::RangeLiteral>()) {
      if (isConstant(*r->lo)) note(*v, typeOfExpr(*r->lo));
      if (isConstant(*r->hi)) note(*v, typeOfExpr(*r->hi));
    }
    return;
  }
  if (const auto* c = e.as<node::Call>()) {
    for (const auto& a : c->args) visit(*a);
    if (c->fn == Builtin::Length) {
      if (const auto* v = variableName(*c->args.at(0))) note(*v, StaticType::StringT);
    }
    return;
  }
  if (const auto* f = e.as<node::Filter>()) {
    visit(*f->base);
    // Names inside the predicate may be element fields; only outer ones count.
    for (const auto& name : freeVariables(*f->predicate)) {
      if (name != "item") declare(name);
    }
    return;
  }
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::InstanceOf>) {
          visit(*n.operand);
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          for (const auto& i : n.items) visit(*i);
        } else if constexpr (std::is_same_v<T, node::Index>) {
          visit(*n.base);
          visit(*n.index);
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          for (const auto& [k, v] : n.entries) visit(*v);
        } else if constexpr (std::is_same_v<T, node::Path>) {
          visit(*n.base);
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          visit(*n.lo);
          visit(*n.hi);
        }
      },
      e.node);
}

void TypeInference::addExpr(const Expr& e) { visit(e); }

namespace {

void cellTypes(const UnaryTest& t, const TypeInference& ti, std::vector<StaticType>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, test::EqualsConst>) {
          out.push_back(typeOf(n.value));
        } else if constexpr (std::is_same_v<T, test::Comparison>) {
          if (isConstant(*n.operand)) out.push_back(ti.typeOfExpr(*n.operand));
        } else if constexpr (std::is_same_v<T, test::RangeTest>) {
          out.push_back(typeOf(n.range.lo));
          out.push_back(typeOf(n.range.hi));
        } else if constexpr (std::is_same_v<T, test::Negation>) {
          cellTypes(*n.inner, ti, out);
        } else if constexpr (std::is_same_v<T, test::Disjunction>) {
          for (const auto& a : n.alternatives) cellTypes(*a, ti, out);
        }
      },
      t.node);
}

void cellOperands(const UnaryTest& t, std::vector<ExprPtr>& out) {
  if (const auto* c = t.as<test::Comparison>()) out.push_back(c->operand);
  if (const auto* n = t.as<test::Negation>()) cellOperands(*n->inner, out);
  if (const auto* d = t.as<test::Disjunction>()) {
    for (const auto& a : d->alternatives) cellOperands(*a, out);
  }
}

}  // namespace

void TypeInference::addUnaryTest(const Expr& subject, const UnaryTest& cell) {
  visit(subject);
  std::vector<ExprPtr> operands;
  cellOperands(cell, operands);
  for (const auto& o : operands) visit(*o);
  const auto* v = variableName(subject);
  if (!v) return;
  std::vector<StaticType> ts;
  cellTypes(cell, *this, ts);
  for (StaticType t : ts) note(*v, t);
}

void TypeInference::addAssignment(const std::string& variable, const Expr& e) {
  visit(e);
  note(variable, typeOfExpr(e));
}

void TypeInference::addValue(const std::string& variable, const Value& v) {
  note(variable, typeOf(v));
}

TypeMap inferTypes(std::span<const ExprPtr> exprs) {
  TypeInference ti;
  for (const auto& e : exprs) ti.addExpr(*e);
  return ti.result();
}

}  // namespace bproc::feel
