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
#include <functional>

#include "bproc/bpmn/model.hpp"
#include "bproc/dmn/table.hpp"

namespace bproc::bpmn {

const char* kindName(NodeKind k) {
  switch (k) {
    case NodeKind::StartEvent: return "StartEvent";
    case NodeKind::EndSuccess: return "EndSuccess";
    case NodeKind::EndError: return "EndError";
    case NodeKind::UserTask: return "UserTask";
    case NodeKind::ManualTask: return "ManualTask";
    case NodeKind::ScriptTask: return "ScriptTask";
    case NodeKind::ServiceTask: return "ServiceTask";
    case NodeKind::BusinessRuleTask: return "BusinessRuleTask";
    case NodeKind::SendTask: return "SendTask";
    case NodeKind::ReceiveTask: return "ReceiveTask";
    case NodeKind::ExclusiveGateway: return "ExclusiveGateway";
    case NodeKind::ParallelGateway: return "ParallelGateway";
    case NodeKind::InclusiveGateway: return "InclusiveGateway";
    case NodeKind::JoinGateway: return "JoinGateway";
  }
  return "?";
}

bool isGateway(NodeKind k) {
  return k == NodeKind::ExclusiveGateway || k == NodeKind::ParallelGateway ||
         k == NodeKind::InclusiveGateway || k == NodeKind::JoinGateway;
}

const Node* ProcessModel::node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::size_t ProcessModel::indexOf(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw SchemaError("unknown node '" + std::string(id) + "'");
}

std::vector<const SequenceFlow*> ProcessModel::outgoing(std::string_view id) const {
  std::vector<const SequenceFlow*> out;
  for (const auto& f : flows) {
    if (f.source == id) out.push_back(&f);
  }
  return out;
}

std::vector<const SequenceFlow*> ProcessModel::incoming(std::string_view id) const {
  std::vector<const SequenceFlow*> in;
  for (const auto& f : flows) {
    if (f.target == id) in.push_back(&f);
  }
  return in;
}

const Node& ProcessModel::start() const {
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::StartEvent) return n;
  }
  throw SchemaError("process has no start event");
}

std::size_t ProcessGraph::indexOf(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw Error("UnknownId", "node id '" + std::string(id) + "' is not in the graph");
}

void fixMultipleOutputs(ProcessModel& m) {
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Node task = m.nodes[i];
    if (isGateway(task.kind)) continue;
    std::size_t outs = m.outgoing(task.id).size();
    if (outs < 2) continue;
    Node gw;
    gw.id = "autogw_" + task.id;
    gw.kind = NodeKind::ExclusiveGateway;
    if (m.node(gw.id)) throw SchemaError("id '" + gw.id + "' is reserved for an inserted gateway");
    for (auto& f : m.flows) {
      if (f.source == task.id) f.source = gw.id;
    }
    SequenceFlow link;
    link.id = "autoflow_" + task.id;
    link.source = task.id;
    link.target = gw.id;
    m.flows.push_back(link);
    m.nodes.insert(m.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1, gw);
    m.warnings.push_back("node '" + task.id + "' has " + std::to_string(outs) +
                         " outgoing flows; inserted exclusive gateway '" + gw.id + "'");
  }
}

void validate(const ProcessModel& m) {
  std::set<std::string> ids;
  for (const auto& n : m.nodes) {
    if (!ids.insert(n.id).second) throw SchemaError("duplicate id '" + n.id + "'");
  }
  for (const auto& f : m.flows) {
    if (!ids.insert(f.id).second) throw SchemaError("duplicate id '" + f.id + "'");
  }
  std::size_t starts = 0, ends = 0;
  for (const auto& n : m.nodes) {
    auto in = m.incoming(n.id);
    auto out = m.outgoing(n.id);
    std::string where = kindName(n.kind) + std::string(" '") + n.id + "'";
    auto counts = [&] {
      return " (has " + std::to_string(in.size()) + " in, " + std::to_string(out.size()) + " out)";
    };
    switch (n.kind) {
      case NodeKind::StartEvent:
        ++starts;
        if (!in.empty() || out.size() != 1) {
          throw SchemaError(where + " needs no incoming and one outgoing flow" + counts());
        }
        break;
      case NodeKind::EndSuccess:
      case NodeKind::EndError:
        ++ends;
        if (in.size() != 1 || !out.empty()) {
          throw SchemaError(where + " needs one incoming and no outgoing flow" + counts());
        }
        break;
      case NodeKind::JoinGateway:
        if (in.size() < 2 || out.size() != 1) {
          throw SchemaError(where + " needs several incoming and one outgoing flow" + counts());
        }
        break;
      case NodeKind::ExclusiveGateway:
      case NodeKind::ParallelGateway:
      case NodeKind::InclusiveGateway: {
        if (in.size() != 1 || out.empty()) {
          throw SchemaError(where + " needs one incoming and at least one outgoing flow" + counts());
        }
        auto defaults = std::count_if(out.begin(), out.end(),
                                      [](const SequenceFlow* f) { return f->isDefault; });
        if (defaults > 1) throw SchemaError(where + " has more than one default flow");
        break;
      }
      default:
        if (in.empty() || out.size() != 1) {
          throw SchemaError(where + " needs incoming flows and exactly one outgoing flow" + counts());
        }
    }
  }
  if (starts != 1) {
    throw SchemaError("process must have exactly one start event, found " + std::to_string(starts));
  }
  if (ends == 0) throw SchemaError("process has no end event");
  for (const auto& f : m.flows) {
    const Node* src = m.node(f.source);
    bool conditional = src->kind == NodeKind::ExclusiveGateway || src->kind == NodeKind::InclusiveGateway;
    if (f.condition && !conditional) {
      throw SchemaError("flow '" + f.id + "' has a condition but leaves " + kindName(src->kind) +
                        " '" + src->id + "'");
    }
    if (f.isDefault && !conditional) {
      throw SchemaError("flow '" + f.id + "' is marked default but leaves " + kindName(src->kind));
    }
  }

  // Weak connectivity.
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& f : m.flows) {
    adj[f.source].push_back(f.target);
    adj[f.target].push_back(f.source);
  }
  std::set<std::string> seen;
  std::vector<std::string> stack{m.nodes.front().id};
  while (!stack.empty()) {
    std::string id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    for (const auto& nb : adj[id]) stack.push_back(nb);
  }
  for (const auto& n : m.nodes) {
    if (!seen.count(n.id)) throw SchemaError("node '" + n.id + "' is not connected to the process");
  }
}

std::vector<feel::ExprPtr> tableArguments(const Node& task, const dmn::DecisionTable& table) {
  std::vector<std::pair<std::string, feel::ExprPtr>> bindings;
  for (const auto& mp : task.inputMap) bindings.emplace_back(mp.name, mp.expr);
  std::vector<feel::ExprPtr> args;
  for (const auto& in : table.inputs) args.push_back(feel::substitute(in.expression, bindings));
  return args;
}

std::vector<Mapping> tableOutputs(const Node& task, const dmn::DecisionTable& table) {
  if (!task.outputMap.empty()) return task.outputMap;
  std::vector<Mapping> out;
  if (!task.resultVariable.empty() && table.outputs.size() == 1) {
    out.push_back({task.resultVariable, feel::make(feel::node::Variable{table.outputs.front()})});
    return out;
  }
  for (const auto& name : table.outputs) out.push_back({name, feel::make(feel::node::Variable{name})});
  return out;
}

namespace {

bool writesInputs(NodeKind k) {
  return k == NodeKind::StartEvent || k == NodeKind::UserTask || k == NodeKind::ManualTask;
}

}  // namespace

VariableMap classifyVariables(const ProcessModel& m, const std::vector<dmn::DecisionTable>& tables) {
  std::map<std::string, std::set<std::string>> inputWriters, processWriters, readers;
  auto readsOf = [&](const std::string& node, const feel::Expr& e) {
    for (const auto& v : feel::freeVariables(e)) readers[v].insert(node);
  };

  for (const auto& n : m.nodes) {
    auto& writers = writesInputs(n.kind) ? inputWriters : processWriters;
    for (const auto& v : n.declaredWrites) writers[v].insert(n.id);
    for (const auto& v : n.declaredReads) readers[v].insert(n.id);
    for (const auto& a : n.assignments) {
      processWriters[a.name].insert(n.id);
      readsOf(n.id, *a.expr);
    }
    if (n.kind == NodeKind::BusinessRuleTask) {
      auto it = std::find_if(tables.begin(), tables.end(),
                             [&](const dmn::DecisionTable& t) { return t.id == n.tableRef; });
      if (it != tables.end()) {
        for (const auto& e : tableArguments(n, *it)) readsOf(n.id, *e);
        for (const auto& o : tableOutputs(n, *it)) processWriters[o.name].insert(n.id);
      } else {
        for (const auto& mp : n.inputMap) readsOf(n.id, *mp.expr);
        for (const auto& mp : n.outputMap) processWriters[mp.name].insert(n.id);
        if (n.outputMap.empty() && !n.resultVariable.empty()) processWriters[n.resultVariable].insert(n.id);
      }
    }
    for (const auto& p : n.parts) readsOf(n.id, *p.expr);
    for (const auto& t : n.targets) processWriters[t.name].insert(n.id);
  }
  for (const auto& f : m.flows) {
    if (f.condition) readsOf(f.source, *f.condition);
  }

  VariableMap roles;
  auto touch = [&](const std::string& v) -> VariableRole& { return roles[v]; };
  for (const auto& [v, ws] : inputWriters) touch(v).writers.insert(ws.begin(), ws.end());
  for (const auto& [v, ws] : processWriters) touch(v).writers.insert(ws.begin(), ws.end());
  for (const auto& [v, rs] : readers) touch(v).readers = rs;
  for (auto& [v, role] : roles) {
    bool in = inputWriters.count(v) > 0;
    bool proc = processWriters.count(v) > 0;
    if (in && proc) throw RoleConflict(v, *inputWriters[v].begin(), *processWriters[v].begin());
    role.role = proc ? Role::Process : Role::Input;
  }
  return roles;
}

ProcessGraph extractGraph(const ProcessModel& m) {
  ProcessGraph g;
  for (const auto& n : m.nodes) g.nodes.push_back({n.id, n.label});
  for (const auto& f : m.flows) g.edges.push_back({m.indexOf(f.source), m.indexOf(f.target)});
  return g;
}

}  // namespace bproc::bpmn
