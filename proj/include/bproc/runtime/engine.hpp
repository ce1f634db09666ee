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

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bproc/compiler/ir.hpp"
#include "bproc/error.hpp"
#include "bproc/feel/value.hpp"

namespace bproc::runtime {

enum class Mode { TrueParallel, Sequential };

struct RunOptions {
  Mode mode = Mode::Sequential;
  std::chrono::milliseconds timeout{5000};
  std::uint64_t stepBudget = 1'000'000;
};

struct TraceRecord {
  enum class Kind { Node, Edge, Table, Write };
  Kind kind;
  std::string a;  // node id, edge source, table id or variable
  std::string b;  // edge target
  std::vector<feel::Value> values;  // table outputs, or the single written value

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Trace {
  std::vector<TraceRecord> records;

  std::vector<std::string> nodes() const;
  std::vector<std::pair<std::string, std::string>> edges() const;
  // (variable, value) in write order.
  std::vector<std::pair<std::string, feel::Value>> writes() const;
};

enum class Outcome { Success, Error, Timeout, Fault };

const char* outcomeName(Outcome o);  // success, error, timeout, fault

struct RunSummary {
  std::map<std::string, std::vector<feel::Value>> inputsUsed;
  Outcome outcome = Outcome::Fault;
  std::string code;
  std::string message;
  std::string node;  // where the run ended or failed
  std::chrono::nanoseconds elapsed{0};
  std::vector<std::string> diagnostics;
};

struct RunResult {
  Trace trace;
  RunSummary summary;
};

using InputLists = std::map<std::string, std::vector<feel::Value>>;

class MissingInput : public Error {
 public:
  explicit MissingInput(const std::string& m) : Error("MissingInput", m) {}
};

// Executes one run. Evaluation errors, timeouts and deadlocks are reported in
// the summary; only a precondition violation (missing input list) throws.
RunResult runOnce(const ir::ExecutableModel& x, const InputLists& inputs, const RunOptions& opts = {});

// File formats.
std::string formatGraph(const bpmn::ProcessGraph& g);
std::string formatTrace(const Trace& t, const bpmn::ProcessGraph& g);
std::string formatSummary(const RunSummary& s);
// Reads back the `input` lines of a summary file, for replaying a run.
InputLists parseSummaryInputs(const std::string& text);
// Narrated rendering of a trace including table results and writes.
std::string describeTrace(const Trace& t);

// Writes <base>.graph, <base>.trace and <base>.out under `outDir`.
void writeArtifacts(const RunResult& r, const bpmn::ProcessGraph& g, const std::string& outDir,
                    const std::string& base);

void writeTextFile(const std::string& path, const std::string& text);

}  // namespace bproc::runtime
