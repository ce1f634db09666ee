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
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bproc/error.hpp"
#include "bproc/feel/ast.hpp"

namespace bproc::dmn {
struct DecisionTable;
}

namespace bproc::bpmn {

enum class NodeKind {
  StartEvent,
  EndSuccess,
  EndError,
  UserTask,
  ManualTask,
  ScriptTask,
  ServiceTask,
  BusinessRuleTask,
  SendTask,
  ReceiveTask,
  ExclusiveGateway,
  ParallelGateway,
  InclusiveGateway,
  JoinGateway,
};

enum class JoinKind { Exclusive, Parallel, Inclusive };

const char* kindName(NodeKind k);
bool isGateway(NodeKind k);

// `name := expr`. For business-rule outputs and receive targets the
// expression is evaluated over the table outputs / message parts.
struct Mapping {
  std::string name;
  feel::ExprPtr expr;
};

struct Node {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::ManualTask;

  // EndError
  std::string errorCode;
  std::string errorMessage;

  // ScriptTask / ServiceTask: assignments executed in order.
  std::vector<Mapping> assignments;

  // BusinessRuleTask
  std::string tableRef;
  std::vector<Mapping> inputMap;   // table-local name := process expression
  std::vector<Mapping> outputMap;  // process variable := expression over outputs
  std::string resultVariable;      // single-output shorthand

  // SendTask / ReceiveTask
  std::string channel;
  std::string msgType;
  std::vector<Mapping> parts;    // send: part := expression
  std::vector<Mapping> targets;  // receive: variable := expression over parts

  // JoinGateway
  JoinKind joinKind = JoinKind::Exclusive;

  // Variables named by data associations and form/extension mappings.
  std::vector<std::string> declaredWrites;
  std::vector<std::string> declaredReads;
};

struct SequenceFlow {
  std::string id;
  std::string source;
  std::string target;
  feel::ExprPtr condition;  // null when unconditional
  bool isDefault = false;
};

struct MessageDef {
  std::string id;
  std::string name;
};

enum class Role { Input, Process };

struct VariableRole {
  Role role = Role::Input;
  std::set<std::string> writers;
  std::set<std::string> readers;
};

using VariableMap = std::map<std::string, VariableRole, std::less<>>;

struct ProcessModel {
  std::string processId;
  std::string name;
  std::vector<Node> nodes;          // document order, inserted gateways follow their task
  std::vector<SequenceFlow> flows;  // document order, inserted flows last
  std::vector<MessageDef> messages;
  VariableMap variables;
  std::vector<std::string> warnings;

  const Node* node(std::string_view id) const;
  std::size_t indexOf(std::string_view id) const;  // throws SchemaError if absent
  std::vector<const SequenceFlow*> outgoing(std::string_view id) const;
  std::vector<const SequenceFlow*> incoming(std::string_view id) const;
  const Node& start() const;
};

struct ProcessGraph {
  struct Vertex {
    std::string id;
    std::string label;
  };
  struct Edge {
    std::size_t src;
    std::size_t dst;
  };
  std::vector<Vertex> nodes;
  std::vector<Edge> edges;

  std::size_t indexOf(std::string_view id) const;  // throws UnknownId-style Error
};

class UnsupportedElement : public Error {
 public:
  explicit UnsupportedElement(const std::string& m) : Error("UnsupportedElement", m) {}
};

class RoleConflict : public Error {
 public:
  RoleConflict(std::string variable, std::string inputWriter, std::string processWriter)
      : Error("RoleConflict", "variable '" + variable + "' is written by input node '" +
                                  inputWriter + "' and by process node '" + processWriter +
                                  "'; rename one of them"),
        variable_(std::move(variable)),
        inputWriter_(std::move(inputWriter)),
        processWriter_(std::move(processWriter)) {}

  const std::string& variable() const noexcept { return variable_; }
  const std::string& inputWriter() const noexcept { return inputWriter_; }
  const std::string& processWriter() const noexcept { return processWriter_; }

 private:
  std::string variable_, inputWriter_, processWriter_;
};

// Parses one process, validates it and applies the multiple-output fix.
// Variable roles are left empty; see classifyVariables.
ProcessModel parseBpmn(std::string_view xml);

// Inserts an exclusive gateway after every non-gateway node with more than
// one outgoing flow. Idempotent.
void fixMultipleOutputs(ProcessModel& m);

// Checks the structural invariants; throws SchemaError.
void validate(const ProcessModel& m);

// Tables are looked up by decision id; missing tables contribute only the
// task's own mappings.
VariableMap classifyVariables(const ProcessModel& m,
                              const std::vector<dmn::DecisionTable>& tables);

ProcessGraph extractGraph(const ProcessModel& m);

// Expressions a business-rule task passes to table inputs: the header
// expressions with the task's input mapping substituted in.
std::vector<feel::ExprPtr> tableArguments(const Node& task, const dmn::DecisionTable& table);

// Output mapping in effect: the explicit one, else the result variable for a
// single-output table, else every output copied to the same-named variable.
std::vector<Mapping> tableOutputs(const Node& task, const dmn::DecisionTable& table);

}  // namespace bproc::bpmn
