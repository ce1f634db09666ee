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

#include "bproc/feel/ast.hpp"

#include <algorithm>

namespace bproc::feel {

namespace {

bool eq(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurallyEqual(*a, *b);
}

bool eqAll(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!eq(a[i], b[i])) return false;
  }
  return true;
}

template <class F>
void forEachChild(const Expr& e, F&& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Unary>) {
          f(n.operand);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          f(n.lhs);
          f(n.rhs);
        } else if constexpr (std::is_same_v<T, node::Call>) {
          for (const auto& a : n.args) f(a);
        } else if constexpr (std::is_same_v<T, node::InstanceOf>) {
          f(n.operand);
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          for (const auto& a : n.items) f(a);
        } else if constexpr (std::is_same_v<T, node::Index>) {
          f(n.base);
          f(n.index);
        } else if constexpr (std::is_same_v<T, node::Filter>) {
          f(n.base);
          f(n.predicate);
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          for (const auto& [k, v] : n.entries) f(v);
        } else if constexpr (std::is_same_v<T, node::Path>) {
          f(n.base);
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          f(n.lo);
          f(n.hi);
        } else if constexpr (std::is_same_v<T, node::In>) {
          f(n.operand);
          f(n.container);
        }
      },
      e.node);
}

void collect(const Expr& e, bool inFilter, std::vector<std::string>& out) {
  if (const auto* v = e.as<node::Variable>()) {
    if (inFilter && v->name == "item") return;
    if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    return;
  }
  if (const auto* f = e.as<node::Filter>()) {
    collect(*f->base, inFilter, out);
    collect(*f->predicate, true, out);
    return;
  }
  forEachChild(e, [&](const ExprPtr& c) { collect(*c, inFilter, out); });
}

}  // namespace

bool structurallyEqual(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, node::Literal>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, node::TemporalLiteral>) {
          return x.kind == y.kind && x.text == y.text;
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, node::Unary>) {
          return x.op == y.op && eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          return x.op == y.op && eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, node::Call>) {
          return x.fn == y.fn && eqAll(x.args, y.args);
        } else if constexpr (std::is_same_v<T, node::InstanceOf>) {
          return x.type == y.type && eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          return eqAll(x.items, y.items);
        } else if constexpr (std::is_same_v<T, node::Index>) {
          return eq(x.base, y.base) && eq(x.index, y.index);
        } else if constexpr (std::is_same_v<T, node::Filter>) {
          return eq(x.base, y.base) && eq(x.predicate, y.predicate);
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          if (x.entries.size() != y.entries.size()) return false;
          for (std::size_t i = 0; i < x.entries.size(); ++i) {
            if (x.entries[i].first != y.entries[i].first) return false;
            if (!eq(x.entries[i].second, y.entries[i].second)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, node::Path>) {
          return x.member == y.member && eq(x.base, y.base);
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          return x.loClosed == y.loClosed && x.hiClosed == y.hiClosed && eq(x.lo, y.lo) &&
                 eq(x.hi, y.hi);
        } else if constexpr (std::is_same_v<T, node::In>) {
          return eq(x.operand, y.operand) && eq(x.container, y.container);
        }
      },
      a.node);
}

std::vector<std::string> freeVariables(const Expr& e) {
  std::vector<std::string> out;
  collect(e, false, out);
  return out;
}

bool isConstant(const Expr& e) { return freeVariables(e).empty(); }

ExprPtr substitute(const ExprPtr& e,
                   const std::vector<std::pair<std::string, ExprPtr>>& bindings) {
  if (bindings.empty()) return e;
  auto sub = [&](const ExprPtr& c) { return substitute(c, bindings); };
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Variable>) {
          for (const auto& [name, repl] : bindings) {
            if (name == n.name) return repl;
          }
          return e;
        } else if constexpr (std::is_same_v<T, node::Unary>) {
          return make(node::Unary{n.op, sub(n.operand)});
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          return make(node::Binary{n.op, sub(n.lhs), sub(n.rhs)});
        } else if constexpr (std::is_same_v<T, node::Call>) {
          std::vector<ExprPtr> args;
          for (const auto& a : n.args) args.push_back(sub(a));
          return make(node::Call{n.fn, std::move(args)});
        } else if constexpr (std::is_same_v<T, node::InstanceOf>) {
          return make(node::InstanceOf{sub(n.operand), n.type});
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          std::vector<ExprPtr> items;
          for (const auto& a : n.items) items.push_back(sub(a));
          return make(node::ListLiteral{std::move(items)});
        } else if constexpr (std::is_same_v<T, node::Index>) {
          return make(node::Index{sub(n.base), sub(n.index)});
        } else if constexpr (std::is_same_v<T, node::Filter>) {
          // `item` inside the predicate stays bound to the element.
          std::vector<std::pair<std::string, ExprPtr>> inner;
          for (const auto& b : bindings) {
            if (b.first != "item") inner.push_back(b);
          }
          return make(node::Filter{sub(n.base), substitute(n.predicate, inner)});
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          std::vector<std::pair<std::string, ExprPtr>> entries;
          for (const auto& [k, v] : n.entries) entries.emplace_back(k, sub(v));
          return make(node::ContextLiteral{std::move(entries)});
        } else if constexpr (std::is_same_v<T, node::Path>) {
          return make(node::Path{sub(n.base), n.member});
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          return make(node::RangeLiteral{sub(n.lo), sub(n.hi), n.loClosed, n.hiClosed});
        } else if constexpr (std::is_same_v<T, node::In>) {
          return make(node::In{sub(n.operand), sub(n.container)});
        } else {
          return e;
        }
      },
      e->node);
}

const char* opSymbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "**";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

const char* builtinName(Builtin fn) {
  switch (fn) {
    case Builtin::Abs: return "abs";
    case Builtin::Floor: return "floor";
    case Builtin::Ceiling: return "ceiling";
    case Builtin::Sqrt: return "sqrt";
    case Builtin::Length: return "length";
    case Builtin::OverlapsBefore: return "overlaps before";
  }
  return "?";
}

}  // namespace bproc::feel
