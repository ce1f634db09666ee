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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bproc/compiler/ir.hpp"
#include "bproc/runtime/engine.hpp"

namespace bproc::verifier {

struct CoverageReport {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  std::size_t totalNodes = 0;
  std::size_t totalEdges = 0;

  double nodePercent() const;  // C_n in [0, 100]
  double edgePercent() const;  // C_e in [0, 100]
};

CoverageReport emptyCoverage(const bpmn::ProcessGraph& g);

// Unions the trace's nodes and edges into `report`. Throws UnknownId when the
// trace mentions something the graph does not contain.
void accumulateCoverage(CoverageReport& report, const runtime::Trace& t, const bpmn::ProcessGraph& g);

// Smallest N with (1 - epsilon)^N <= delta.
std::uint64_t smcSampleSize(double epsilon, double delta);

enum class Combiner { And, Or, NodesOnly, EdgesOnly };

const char* combinerName(Combiner c);
std::optional<Combiner> combinerFromName(const std::string& s);

struct Thresholds {
  double nodes = 0;
  double edges = 0;
  Combiner combiner = Combiner::And;

  bool met(const CoverageReport& r) const;
  bool trivial() const;  // every threshold the combiner looks at is zero
};

struct FixedBudget {
  std::uint64_t n = 100;
  Thresholds target;
};

struct ErrorSeek {
  std::uint64_t n = 100;
};

struct Smc {
  enum class Property { NoErrorBlock, CoverageUnreachable };
  double epsilon = 0.01;
  double delta = 0.01;
  Property property = Property::NoErrorBlock;
  Thresholds target;  // CoverageUnreachable only
};

struct CampaignConfig {
  std::variant<FixedBudget, ErrorSeek, Smc> mode = FixedBudget{};
  runtime::RunOptions run;
  std::uint64_t seed = 0;
  unsigned parallelRunners = 1;
  inputs::SamplingOptions sampling;
  // When set, every run writes runs/run_<k>.trace and runs/run_<k>.out below it.
  std::string outDir;
};

struct Verdict {
  bool pass = true;
  std::string reason;
  CoverageReport coverage;
  std::uint64_t runs = 0;
  double meanRunMs = 0;
  double stddevRunMs = 0;
  std::optional<std::uint64_t> failingRun;  // 1-based run index of the witness
  std::string failingTrace;                 // trace file relative to outDir, empty when not written
  std::optional<runtime::RunResult> witness;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

// Input lists for run `k` (1-based) of a campaign seeded with `seed`.
runtime::InputLists drawInputs(const ir::ExecutableModel& x, const std::vector<inputs::InputSpec>& specs,
                               std::uint64_t seed, std::uint64_t k, const inputs::SamplingOptions& opts = {});

// Throws MissingOverride for an Unhandled input without overrides and
// ConfigError for out-of-range parameters.
Verdict runCampaign(const ir::ExecutableModel& x, const std::vector<inputs::InputSpec>& specs,
                    const CampaignConfig& cfg);

// {result, reason, c_n, c_e, runs, mean_run_ms, stddev_run_ms, failing_trace}
std::string verdictJson(const Verdict& v);

}  // namespace bproc::verifier
