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
#include <cctype>
#include <functional>
#include <random>

#include "bproc/compiler/ir.hpp"
#include "bproc/feel/evaluator.hpp"

namespace bproc::ir {

using bpmn::NodeKind;
using feel::StaticType;

const Routine& ExecutableModel::routine(const std::string& id) const {
  auto it = routines.find(id);
  if (it == routines.end()) throw Error("UnknownId", "no routine '" + id + "'");
  return it->second;
}

namespace {

std::string displayName(std::size_t n, const std::string& label) {
  std::string out = "t_" + std::to_string(n);
  std::string tail;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) tail += c;
    else if (!tail.empty() && tail.back() != '_') tail += '_';
  }
  while (!tail.empty() && tail.back() == '_') tail.pop_back();
  return tail.empty() ? out : out + "_" + tail;
}

const dmn::DecisionTable* findTable(const std::vector<dmn::DecisionTable>& tables, const std::string& id) {
  auto it = std::find_if(tables.begin(), tables.end(), [&](const dmn::DecisionTable& t) { return t.id == id; });
  return it == tables.end() ? nullptr : &*it;
}

bool isSplit(const bpmn::Node& n) {
  return n.kind == NodeKind::ParallelGateway || n.kind == NodeKind::InclusiveGateway;
}

bool isSyncJoin(const bpmn::Node& n) {
  return n.kind == NodeKind::JoinGateway && n.joinKind != bpmn::JoinKind::Exclusive;
}

// The synchronising join that closes `fork`: the first such join reached at
// nesting depth zero along every path. Empty when the branches never meet.
std::string findJoin(const bpmn::ProcessModel& m, const std::string& fork) {
  std::set<std::string> found;
  std::set<std::pair<std::string, int>> seen;
  std::function<void(const std::string&, int)> walk = [&](const std::string& id, int depth) {
    if (!seen.insert({id, depth}).second) return;
    const bpmn::Node* n = m.node(id);
    if (isSyncJoin(*n)) {
      if (depth == 0) {
        found.insert(id);
        return;
      }
      --depth;
    } else if (isSplit(*n)) {
      ++depth;
    }
    for (const auto* f : m.outgoing(id)) walk(f->target, depth);
  };
  for (const auto* f : m.outgoing(fork)) walk(f->target, 0);
  if (found.size() > 1) {
    throw SchemaError("branches of gateway '" + fork + "' meet at several joins (" + *found.begin() + ", " +
                      *std::next(found.begin()) + ")");
  }
  return found.empty() ? std::string() : *found.begin();
}

StaticType typeFromDomain(const inputs::Domain& d) {
  std::vector<feel::Value> evidence;
  switch (d.kind) {
    case inputs::Domain::Kind::Enum: evidence = d.values; break;
    case inputs::Domain::Kind::Ball: evidence = {d.center}; break;
    case inputs::Domain::Kind::Range: evidence = {d.range.lo, d.range.hi}; break;
    case inputs::Domain::Kind::Unhandled: break;
  }
  StaticType t = StaticType::UnknownT;
  for (const auto& v : evidence) {
    try {
      t = feel::join(t, feel::typeOf(v), "");
    } catch (const Error&) {
      return StaticType::UnknownT;
    }
  }
  return t;
}

feel::TypeMap inferModelTypes(const bpmn::ProcessModel& m, const std::vector<dmn::DecisionTable>& tables,
                              const bpmn::VariableMap& roles) {
  feel::TypeInference ti;
  for (const auto& [name, role] : roles) ti.declare(name);
  for (const auto& f : m.flows) {
    if (f.condition) ti.addExpr(*f.condition);
  }
  for (const auto& n : m.nodes) {
    for (const auto& a : n.assignments) ti.addAssignment(a.name, *a.expr);
    for (const auto& p : n.parts) ti.addExpr(*p.expr);
    if (n.kind != NodeKind::BusinessRuleTask) continue;
    const auto* t = findTable(tables, n.tableRef);
    if (!t) continue;
    auto args = bpmn::tableArguments(n, *t);
    for (const auto& rule : t->rules) {
      for (std::size_t j = 0; j < args.size(); ++j) ti.addUnaryTest(*args[j], *rule.inputEntries[j]);
    }
    for (const auto& out : bpmn::tableOutputs(n, *t)) {
      const auto* v = out.expr->as<feel::node::Variable>();
      if (!v) continue;
      auto col = std::find(t->outputs.begin(), t->outputs.end(), v->name);
      if (col == t->outputs.end()) continue;
      auto j = static_cast<std::size_t>(col - t->outputs.begin());
      for (const auto& rule : t->rules) {
        feel::Value c = feel::evaluate(*rule.outputEntries[j], feel::emptyEnvironment());
        if (!c.isNull()) ti.addValue(out.name, c);
      }
    }
  }
  // Message targets copy the type of the matching sent part.
  for (const auto& n : m.nodes) {
    for (const auto& target : n.targets) {
      const auto* part = target.expr->as<feel::node::Variable>();
      if (!part) continue;
      for (const auto& s : m.nodes) {
        if (s.kind != NodeKind::SendTask || s.msgType != n.msgType) continue;
        for (const auto& p : s.parts) {
          if (p.name != part->name) continue;
          StaticType pt = ti.typeOfExpr(*p.expr);
          if (pt != StaticType::UnknownT) ti.addValue(target.name, inputs::typeDefault(pt));
        }
      }
    }
  }
  return ti.result();
}

}  // namespace

ExecutableModel compile(const bpmn::ProcessModel& m, const std::vector<dmn::DecisionTable>& tables,
                        const CompileOptions& opts) {
  ExecutableModel x;
  x.processId = m.processId;
  x.graph = bpmn::extractGraph(m);
  x.warnings = m.warnings;

  for (const auto& n : m.nodes) {
    if (n.kind != NodeKind::BusinessRuleTask) continue;
    const auto* t = findTable(tables, n.tableRef);
    if (!t) {
      throw UnresolvedTable("business rule task '" + n.id + "' calls decision '" + n.tableRef +
                            "', which no loaded DMN file defines");
    }
    x.tables.emplace(t->id, *t);
  }

  auto roles = bpmn::classifyVariables(m, tables);
  auto types = inferModelTypes(m, tables, roles);

  std::set<std::string> inputNames;
  for (const auto& [name, role] : roles) {
    if (role.role == bpmn::Role::Input) inputNames.insert(name);
  }
  auto inference = inputs::inferDomains(inputNames, inputs::collectSites(m, tables), opts.sampling);
  for (const auto& d : inference.diagnostics) x.warnings.push_back(d);

  auto housed = [&](const std::string& name, StaticType t) {
    if (t != StaticType::UnknownT) return t;
    std::string msg = "variable '" + name + "' has no type evidence; treated as String";
    if (opts.strict) throw UnhousedVariable(msg);
    x.warnings.push_back("UnhousedVariable: " + msg);
    return StaticType::StringT;
  };

  std::mt19937_64 rng(opts.seed);
  for (const auto& name : inputNames) {
    inputs::InputSpec spec;
    spec.name = name;
    spec.domain = inference.domains.at(name);
    StaticType t = types.count(name) ? types.at(name) : StaticType::UnknownT;
    if (t == StaticType::UnknownT) t = typeFromDomain(spec.domain);
    spec.type = housed(name, t);
    spec.sample = spec.domain.kind == inputs::Domain::Kind::Unhandled
                      ? inputs::typeDefault(spec.type)
                      : inputs::sampleDomain(spec.domain, spec.type, rng, opts.sampling);
    x.inputVars.push_back(std::move(spec));
    if (roles.at(name).writers.empty()) x.initialInputs.push_back(name);
  }
  for (const auto& [name, role] : roles) {
    if (role.role == bpmn::Role::Process) x.processVars.emplace_back(name, housed(name, types.at(name)));
  }

  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const auto& n = m.nodes[i];
    Routine r;
    r.id = n.id;
    r.displayName = displayName(i + 1, n.label);
    r.kind = n.kind;
    auto outs = m.outgoing(n.id);
    auto next = [&]() { return outs.empty() ? std::string() : outs.front()->target; };

    switch (n.kind) {
      case NodeKind::StartEvent:
      case NodeKind::UserTask:
      case NodeKind::ManualTask:
        for (const auto& v : n.declaredWrites) {
          if (inputNames.count(v)) r.body.push_back(step::ConsumeInput{v});
        }
        r.body.push_back(step::Continue{next()});
        break;
      case NodeKind::ScriptTask:
      case NodeKind::ServiceTask:
        for (const auto& a : n.assignments) r.body.push_back(step::Assign{a.name, a.expr});
        r.body.push_back(step::Continue{next()});
        break;
      case NodeKind::BusinessRuleTask: {
        const auto& t = x.tables.at(n.tableRef);
        r.body.push_back(step::InvokeTable{t.id, bpmn::tableArguments(n, t), bpmn::tableOutputs(n, t)});
        r.body.push_back(step::Continue{next()});
        break;
      }
      case NodeKind::SendTask:
        r.body.push_back(step::Send{n.channel, n.msgType, n.parts});
        r.body.push_back(step::Continue{next()});
        break;
      case NodeKind::ReceiveTask:
        r.body.push_back(step::Receive{n.channel, n.msgType, n.targets});
        r.body.push_back(step::Continue{next()});
        break;
      case NodeKind::EndSuccess:
        r.body.push_back(step::Terminate{true, "", ""});
        break;
      case NodeKind::EndError:
        r.body.push_back(step::Terminate{false, n.errorCode, n.errorMessage});
        break;
      case NodeKind::ExclusiveGateway: {
        step::Branch b;
        for (const auto* f : outs) {
          if (f->isDefault) b.defaultTarget = f->target;
          else b.cases.push_back({f->condition, f->target});
        }
        r.body.push_back(std::move(b));
        break;
      }
      case NodeKind::ParallelGateway:
      case NodeKind::InclusiveGateway: {
        step::Fork fk;
        fk.mode = n.kind == NodeKind::ParallelGateway ? step::Fork::Mode::All
                                                      : step::Fork::Mode::ConditionFiltered;
        for (const auto* f : outs) {
          if (f->isDefault) fk.defaultTarget = f->target;
          else fk.branches.push_back({fk.mode == step::Fork::Mode::All ? nullptr : f->condition, f->target});
        }
        fk.joinId = findJoin(m, n.id);
        if (fk.joinId.empty()) x.warnings.push_back("branches of gateway '" + n.id + "' are never joined");
        r.body.push_back(std::move(fk));
        break;
      }
      case NodeKind::JoinGateway:
        if (n.joinKind == bpmn::JoinKind::Exclusive) {
          r.body.push_back(step::Continue{next()});
        } else {
          r.body.push_back(step::JoinBarrier{m.incoming(n.id).size(), next()});
        }
        break;
    }
    x.order.push_back(n.id);
    x.routines.emplace(n.id, std::move(r));
  }
  x.entry = m.start().id;
  return x;
}

}  // namespace bproc::ir
