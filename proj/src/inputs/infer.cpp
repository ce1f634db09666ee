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

#include <algorithm>
#include <cmath>
#include <optional>

#include "bproc/bpmn/model.hpp"
#include "bproc/dmn/table.hpp"
#include "bproc/feel/evaluator.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/inputs/domain.hpp"

namespace bproc::inputs {

using feel::CompareOp;
using feel::Expr;
using feel::Value;

Sites collectSites(const bpmn::ProcessModel& m, const std::vector<dmn::DecisionTable>& tables) {
  Sites s;
  for (const auto& f : m.flows) {
    if (!f.condition) continue;
    auto outs = m.outgoing(f.source);
    bool withDefault = std::any_of(outs.begin(), outs.end(),
                                   [](const bpmn::SequenceFlow* o) { return o->isDefault; });
    s.conditions.push_back({f.condition, withDefault});
  }
  for (const auto& n : m.nodes) {
    for (const auto& a : n.assignments) s.values.push_back(a.expr);
    for (const auto& p : n.parts) s.values.push_back(p.expr);
    if (n.kind != bpmn::NodeKind::BusinessRuleTask) continue;
    auto it = std::find_if(tables.begin(), tables.end(),
                           [&](const dmn::DecisionTable& t) { return t.id == n.tableRef; });
    if (it == tables.end()) continue;
    auto args = bpmn::tableArguments(n, *it);
    for (const auto& a : args) s.values.push_back(a);
    for (const auto& rule : it->rules) {
      for (std::size_t j = 0; j < args.size(); ++j) s.cells.push_back({args[j], rule.inputEntries[j]});
    }
  }
  return s;
}

namespace {

struct Bound {
  CompareOp op;
  Value value;
};

struct Facts {
  std::vector<Value> eq;
  std::vector<Bound> bounds;
  std::vector<Value> balls;
  std::vector<feel::Range> ranges;
  std::set<std::string> unhandled;
  std::set<std::string> appearances;
};

CompareOp flip(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

std::optional<CompareOp> compareOf(feel::BinaryOp op) {
  switch (op) {
    case feel::BinaryOp::Lt: return CompareOp::Lt;
    case feel::BinaryOp::Le: return CompareOp::Le;
    case feel::BinaryOp::Gt: return CompareOp::Gt;
    case feel::BinaryOp::Ge: return CompareOp::Ge;
    case feel::BinaryOp::Eq: return CompareOp::Eq;
    case feel::BinaryOp::Ne: return CompareOp::Ne;
    default: return std::nullopt;
  }
}

class Collector {
 public:
  Collector(const std::set<std::string>& vars) : vars_(vars) {}

  void condition(const Expr& e, bool withDefault) {
    if (const auto* b = e.as<feel::node::Binary>();
        b && (b->op == feel::BinaryOp::And || b->op == feel::BinaryOp::Or)) {
      condition(*b->lhs, withDefault);
      condition(*b->rhs, withDefault);
      return;
    }
    if (const auto* u = e.as<feel::node::Unary>(); u && u->op == feel::UnaryOp::Not) {
      condition(*u->operand, withDefault);
      return;
    }
    if (const auto* v = inputVar(e)) {
      facts_[*v].eq.push_back(Value(true));
      facts_[*v].eq.push_back(Value(false));
      return;
    }
    if (e.as<feel::node::Literal>()) return;
    atom(e, withDefault);
  }

  void cell(const Expr& subject, const feel::UnaryTest& t) {
    const std::string* v = inputVar(subject);
    if (!v) {
      if (!t.isDash()) unhandledAll(subject, feel::render(subject));
      return;
    }
    cellFacts(*v, t);
  }

  void value(const Expr& e) {
    for (const auto& name : feel::freeVariables(e)) {
      if (vars_.count(name)) facts_[name].appearances.insert(feel::render(e));
    }
  }

  std::map<std::string, Facts>& facts() { return facts_; }

 private:
  const std::string* inputVar(const Expr& e) const {
    const auto* v = e.as<feel::node::Variable>();
    return v && vars_.count(v->name) ? &v->name : nullptr;
  }

  void fact(const std::string& v, CompareOp op, const Value& c, bool withDefault, const std::string& text) {
    if (c.isNull()) return;
    Facts& f = facts_[v];
    if (op == CompareOp::Eq || op == CompareOp::Ne) {
      f.eq.push_back(c);
    } else if (!c.isNumber()) {
      f.unhandled.insert(text);
    } else if (withDefault) {
      f.balls.push_back(c);
    } else {
      f.bounds.push_back({op, c});
    }
  }

  void atom(const Expr& e, bool withDefault) {
    std::string text = feel::render(e);
    if (const auto* b = e.as<feel::node::Binary>()) {
      if (auto op = compareOf(b->op)) {
        const auto* l = inputVar(*b->lhs);
        const auto* r = inputVar(*b->rhs);
        if (l && feel::isConstant(*b->rhs)) {
          fact(*l, *op, feel::evaluate(*b->rhs, feel::emptyEnvironment()), withDefault, text);
          return;
        }
        if (r && feel::isConstant(*b->lhs)) {
          fact(*r, flip(*op), feel::evaluate(*b->lhs, feel::emptyEnvironment()), withDefault, text);
          return;
        }
        if (l || r) {
          if (l) facts_[*l].unhandled.insert(text);
          if (r) facts_[*r].unhandled.insert(text);
          return;
        }
      }
    }
    if (const auto* in = e.as<feel::node::In>()) {
      if (const auto* v = inputVar(*in->operand)) {
        if (feel::isConstant(*in->container)) {
          Value c = feel::evaluate(*in->container, feel::emptyEnvironment());
          if (c.kind() == Value::Kind::List) {
            bool plain = std::all_of(c.asList().begin(), c.asList().end(), [](const Value& x) {
              return x.kind() != Value::Kind::Range && x.kind() != Value::Kind::List;
            });
            if (plain) {
              for (const auto& x : c.asList()) fact(*v, CompareOp::Eq, x, withDefault, text);
              return;
            }
          } else if (c.kind() == Value::Kind::Range && c.asRange().lo.isNumber() &&
                     c.asRange().hi.isNumber()) {
            facts_[*v].ranges.push_back(c.asRange());
            return;
          }
        }
        facts_[*v].unhandled.insert(text);
        return;
      }
    }
    unhandledAll(e, text);
  }

  void unhandledAll(const Expr& e, const std::string& text) {
    for (const auto& name : feel::freeVariables(e)) {
      if (vars_.count(name)) facts_[name].unhandled.insert(text);
    }
  }

  void cellFacts(const std::string& v, const feel::UnaryTest& t) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, feel::test::EqualsConst>) {
            fact(v, CompareOp::Eq, n.value, false, v + " = " + feel::render(n.value));
          } else if constexpr (std::is_same_v<T, feel::test::Comparison>) {
            std::string text = v + " " + feel::compareSymbol(n.op) + " " + feel::render(n.operand);
            if (feel::isConstant(*n.operand)) {
              Value c = feel::evaluate(*n.operand, feel::emptyEnvironment());
              if (c.kind() == Value::Kind::Range && n.op == CompareOp::Eq) {
                facts_[v].ranges.push_back(c.asRange());
              } else {
                fact(v, n.op, c, false, text);
              }
            } else {
              facts_[v].unhandled.insert(text);
            }
          } else if constexpr (std::is_same_v<T, feel::test::RangeTest>) {
            if (n.range.lo.isNumber() && n.range.hi.isNumber()) {
              facts_[v].ranges.push_back(n.range);
            } else {
              facts_[v].unhandled.insert(v + " in " + feel::render(Value(n.range)));
            }
          } else if constexpr (std::is_same_v<T, feel::test::Negation>) {
            cellFacts(v, *n.inner);
          } else if constexpr (std::is_same_v<T, feel::test::Disjunction>) {
            for (const auto& a : n.alternatives) cellFacts(v, *a);
          }
        },
        t.node);
  }

  const std::set<std::string>& vars_;
  std::map<std::string, Facts> facts_;
};

struct Endpoint {
  Value value;
  bool closed;
};

Value numberLike(double d, bool integral) {
  if (integral) return Value(static_cast<std::int64_t>(std::llround(d)));
  return Value(d);
}

void lower(std::optional<Endpoint>& cur, Endpoint e) {
  if (!cur) {
    cur = e;
    return;
  }
  double a = cur->value.asNumber(), b = e.value.asNumber();
  if (b < a || (b == a && e.closed && !cur->closed)) cur = e;
}

void upper(std::optional<Endpoint>& cur, Endpoint e) {
  if (!cur) {
    cur = e;
    return;
  }
  double a = cur->value.asNumber(), b = e.value.asNumber();
  if (b > a || (b == a && e.closed && !cur->closed)) cur = e;
}

bool empty(const Endpoint& lo, const Endpoint& hi) {
  double a = lo.value.asNumber(), b = hi.value.asNumber();
  if (lo.value.kind() == Value::Kind::Integer && hi.value.kind() == Value::Kind::Integer) {
    return (lo.closed ? a : a + 1) > (hi.closed ? b : b - 1);
  }
  return a > b || (a == b && !(lo.closed && hi.closed));
}

feel::Range hull(const Facts& f, const SamplingOptions& opts) {
  std::optional<Endpoint> lo, hi;
  for (const auto& r : f.ranges) {
    lower(lo, {r.lo, r.loClosed});
    upper(hi, {r.hi, r.hiClosed});
  }
  for (const auto& b : f.bounds) {
    bool closed = b.op == CompareOp::Ge || b.op == CompareOp::Le;
    if (b.op == CompareOp::Gt || b.op == CompareOp::Ge) lower(lo, {b.value, closed});
    else upper(hi, {b.value, closed});
  }
  for (const auto& w : f.balls) {
    double r = ballRadius(w, opts);
    bool integral = w.kind() == Value::Kind::Integer && r == std::floor(r);
    lower(lo, {numberLike(w.asNumber() - r, integral), true});
    upper(hi, {numberLike(w.asNumber() + r, integral), true});
  }
  for (const auto& x : f.eq) {
    lower(lo, {x, true});
    upper(hi, {x, true});
  }
  // One-sided evidence: extend by the ball radius of the known end.
  if (!lo) {
    double r = ballRadius(hi->value, opts);
    lo = Endpoint{numberLike(hi->value.asNumber() - r, hi->value.kind() == Value::Kind::Integer &&
                                                           r == std::floor(r)),
                  true};
  }
  if (!hi) {
    double r = ballRadius(lo->value, opts);
    hi = Endpoint{numberLike(lo->value.asNumber() + r, lo->value.kind() == Value::Kind::Integer &&
                                                           r == std::floor(r)),
                  true};
  }
  if (!empty(*lo, *hi)) return feel::Range{lo->value, hi->value, lo->closed, hi->closed};
  // Contradictory half-lines such as `v > 10` and `v < 5` on different
  // branches: span both constants, padded by their radii.
  Value a = hi->value, b = lo->value;
  if (a.asNumber() > b.asNumber()) std::swap(a, b);
  double ra = ballRadius(a, opts), rb = ballRadius(b, opts);
  bool integral = a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer;
  return feel::Range{numberLike(a.asNumber() - ra, integral), numberLike(b.asNumber() + rb, integral), true, true};
}

template <class T, class Less>
void sortUnique(std::vector<T>& v, Less less) {
  std::sort(v.begin(), v.end(), less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Inference inferDomains(const std::set<std::string>& inputVars, const Sites& sites,
                       const SamplingOptions& opts) {
  Collector c(inputVars);
  for (const auto& s : sites.conditions) c.condition(*s.expr, s.gatewayHasDefault);
  for (const auto& s : sites.cells) c.cell(*s.subject, *s.cell);
  for (const auto& e : sites.values) c.value(*e);

  Inference out;
  for (const auto& v : inputVars) {
    Facts& f = c.facts()[v];
    sortUnique(f.eq, feel::canonicalLess);
    auto rangeLess = [](const feel::Range& a, const feel::Range& b) {
      return feel::canonicalLess(Value(a), Value(b));
    };
    sortUnique(f.ranges, rangeLess);

    if (!f.unhandled.empty()) {
      out.domains[v] = Domain::unhandled({f.unhandled.begin(), f.unhandled.end()});
      continue;
    }
    bool numericEvidence = !f.bounds.empty() || !f.balls.empty() || !f.ranges.empty();
    if (!numericEvidence && f.eq.empty()) {
      out.domains[v] = Domain::unhandled({f.appearances.begin(), f.appearances.end()});
      out.diagnostics.push_back("variable '" + v + "' is never compared with a constant");
      continue;
    }
    if (!numericEvidence) {
      bool boolean = std::all_of(f.eq.begin(), f.eq.end(),
                                 [](const Value& x) { return x.kind() == Value::Kind::Boolean; });
      out.domains[v] = boolean ? Domain::enumeration({Value(false), Value(true)})
                               : Domain::enumeration(f.eq);
      continue;
    }
    if (!std::all_of(f.eq.begin(), f.eq.end(), [](const Value& x) { return x.isNumber(); })) {
      std::vector<std::string> texts;
      for (const auto& x : f.eq) texts.push_back(v + " = " + feel::render(x));
      out.domains[v] = Domain::unhandled(texts);
      out.diagnostics.push_back("variable '" + v + "' mixes numeric bounds with non-numeric constants");
      continue;
    }
    std::vector<Value> centers = f.balls;
    sortUnique(centers, feel::canonicalLess);
    if (centers.size() == 1 && f.bounds.empty() && f.ranges.empty() && f.eq.empty()) {
      out.domains[v] = Domain::ball(centers.front());
      continue;
    }
    Domain d = Domain::interval(hull(f, opts));
    if (f.ranges.size() > 1) {
      out.diagnostics.push_back("variable '" + v + "': " + std::to_string(f.ranges.size()) +
                                " ranges merged into " + render(d));
    }
    out.domains[v] = d;
  }
  return out;
}

}  // namespace bproc::inputs
