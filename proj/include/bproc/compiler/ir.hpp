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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bproc/bpmn/model.hpp"
#include "bproc/dmn/table.hpp"
#include "bproc/error.hpp"
#include "bproc/feel/types.hpp"
#include "bproc/inputs/domain.hpp"

namespace bproc::ir {

namespace step {
// Start events, user and manual tasks: take the next value of an input list.
struct ConsumeInput {
  std::string var;
};
struct Assign {
  std::string var;
  feel::ExprPtr expr;
};
struct InvokeTable {
  std::string tableId;
  std::vector<feel::ExprPtr> args;       // one per table input, over process variables
  std::vector<bpmn::Mapping> outputs;    // variable := expression over table outputs
};
struct Send {
  std::string channel;
  std::string msgType;
  std::vector<bpmn::Mapping> parts;
};
struct Receive {
  std::string channel;
  std::string msgType;
  std::vector<bpmn::Mapping> targets;  // variable := expression over message parts
};
struct Case {
  feel::ExprPtr condition;  // null means always true
  std::string target;
};
// First true case wins; no default means the run fails with "unhandled condition".
struct Branch {
  std::vector<Case> cases;
  std::optional<std::string> defaultTarget;
};
struct Fork {
  enum class Mode { All, ConditionFiltered };
  Mode mode = Mode::All;
  std::vector<Case> branches;                 // conditions only used when ConditionFiltered
  std::optional<std::string> defaultTarget;   // inclusive gateways only
  std::string joinId;                         // empty when the branches never meet
};
struct JoinBarrier {
  std::size_t expectedArrivals = 0;  // static in-degree; a fork may lower it
  std::string next;
};
struct Continue {
  std::string target;
};
struct Terminate {
  bool success = true;
  std::string code;
  std::string description;
};
}  // namespace step

using Step = std::variant<step::ConsumeInput, step::Assign, step::InvokeTable, step::Send, step::Receive,
                          step::Branch, step::Fork, step::JoinBarrier, step::Continue, step::Terminate>;

struct Routine {
  std::string id;
  std::string displayName;  // t_<N>[_<label>]
  bpmn::NodeKind kind = bpmn::NodeKind::ManualTask;
  std::vector<Step> body;   // the last step is the only terminal one

  const Step& terminal() const { return body.back(); }
};

struct ExecutableModel {
  std::string processId;
  std::map<std::string, Routine> routines;
  std::vector<std::string> order;  // routine ids in document order
  std::map<std::string, dmn::DecisionTable> tables;
  std::string entry;
  bpmn::ProcessGraph graph;
  std::vector<inputs::InputSpec> inputVars;
  std::vector<std::pair<std::string, feel::StaticType>> processVars;
  std::vector<std::string> initialInputs;  // inputs nobody writes; bound before the start event
  std::vector<std::string> warnings;

  const Routine& routine(const std::string& id) const;
};

class UnresolvedTable : public Error {
 public:
  explicit UnresolvedTable(const std::string& m) : Error("UnresolvedTable", m) {}
};

class UnhousedVariable : public Error {
 public:
  explicit UnhousedVariable(const std::string& m) : Error("UnhousedVariable", m) {}
};

struct CompileOptions {
  std::uint64_t seed = 0;               // drives the sample values of the inputs file
  bool strict = false;                  // unhoused variables become errors instead of warnings
  inputs::SamplingOptions sampling;
};

ExecutableModel compile(const bpmn::ProcessModel& m, const std::vector<dmn::DecisionTable>& tables,
                        const CompileOptions& opts = {});

// Readable pseudocode of the model, see docs/ir-source.md.
std::string renderSource(const ExecutableModel& x);

}  // namespace bproc::ir
