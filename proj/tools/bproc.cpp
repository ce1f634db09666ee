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

// Command-line front end: translate, graph, inputs, run and test.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "bproc/bpmn/model.hpp"
#include "bproc/compiler/ir.hpp"
#include "bproc/dmn/table.hpp"
#include "bproc/runtime/engine.hpp"
#include "bproc/verifier/campaign.hpp"
#include "bproc/xml/element.hpp"

namespace fs = std::filesystem;
using namespace bproc;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kModel = 3, kEngine = 4 };

struct Options {
  std::string command;
  std::vector<std::string> files;
  std::string outDir;
  std::string inputsFile;
  std::string mode = "fixed";
  std::string property = "no-error";
  std::uint64_t n = 100;
  double thetaNodes = 0;
  double thetaEdges = 0;
  std::string combiner = "and";
  double epsilon = 0.01;
  double delta = 0.01;
  std::int64_t timeoutMs = 5000;
  std::optional<std::uint64_t> seed;
  unsigned runners = 1;
  bool sequential = false;
  bool strict = false;
  bool verbose = false;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error("UsageError", m) {}
};

std::uint64_t resolveSeed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("BPROC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("BPROC_SEED is not a number: '") + env + "'");
    }
  }
  return 0;
}

std::string extension(const std::string& p) {
  std::string e = fs::path(p).extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

void warn(const std::string& where, const std::vector<std::string>& ws) {
  for (const auto& w : ws) std::cerr << "warning: " << where << ": " << w << "\n";
}

std::vector<inputs::InputSpec> inputSpecs(const ir::ExecutableModel& x, const Options& o) {
  if (o.inputsFile.empty()) return x.inputVars;
  auto specs = inputs::parseInputsFile(xml::readFile(o.inputsFile));
  std::map<std::string, inputs::InputSpec> byName;
  for (auto& s : specs) byName.emplace(s.name, std::move(s));
  std::vector<inputs::InputSpec> out;
  for (const auto& want : x.inputVars) {
    auto it = byName.find(want.name);
    if (it == byName.end()) {
      throw Error("InputsMismatch", o.inputsFile + ": no line for input variable '" + want.name + "'");
    }
    out.push_back(it->second);
    byName.erase(it);
  }
  for (const auto& [name, s] : byName) {
    std::cerr << "warning: " << o.inputsFile << ": '" << name << "' is not an input of " << x.processId << "\n";
  }
  return out;
}

int process(const std::string& bpmnPath, const std::vector<dmn::DecisionTable>& tables, const Options& o,
            std::uint64_t seed) {
  auto model = bpmn::parseBpmn(xml::readFile(bpmnPath));
  ir::CompileOptions co;
  co.seed = seed;
  co.strict = o.strict;
  auto x = ir::compile(model, tables, co);
  warn(bpmnPath, x.warnings);

  std::string outDir = o.outDir.empty() ? (fs::path("out") / x.processId).string() : o.outDir;
  fs::create_directories(outDir);
  auto path = [&](const std::string& ext) { return (fs::path(outDir) / (x.processId + ext)).string(); };

  if (o.command == "graph") {
    runtime::writeTextFile(path(".graph"), runtime::formatGraph(x.graph));
    return kPass;
  }
  if (o.command == "inputs") {
    runtime::writeTextFile(path(".inputs"), inputs::writeInputsFile(x.inputVars));
    return kPass;
  }
  if (o.command == "translate") {
    runtime::writeTextFile(path(".src.txt"), ir::renderSource(x));
    runtime::writeTextFile(path(".graph"), runtime::formatGraph(x.graph));
    runtime::writeTextFile(path(".inputs"), inputs::writeInputsFile(x.inputVars));
    return kPass;
  }

  runtime::RunOptions ro;
  ro.mode = o.sequential ? runtime::Mode::Sequential : runtime::Mode::TrueParallel;
  ro.timeout = std::chrono::milliseconds(o.timeoutMs);
  auto specs = inputSpecs(x, o);

  if (o.command == "run") {
    runtime::InputLists in;
    for (const auto& s : specs) in[s.name] = {s.sample};
    auto r = runtime::runOnce(x, in, ro);
    runtime::writeArtifacts(r, x.graph, outDir, x.processId);
    for (const auto& d : r.summary.diagnostics) std::cerr << "warning: " << d << "\n";
    if (o.verbose) std::cout << runtime::describeTrace(r.trace);
    std::cout << runtime::formatSummary(r.summary);
    switch (r.summary.outcome) {
      case runtime::Outcome::Success: return kPass;
      case runtime::Outcome::Error: return kFail;
      default:
        std::cerr << "error: " << r.summary.code << " at '" << r.summary.node << "': " << r.summary.message << "\n";
        return kEngine;
    }
  }

  verifier::CampaignConfig cfg;
  cfg.run = ro;
  cfg.seed = seed;
  cfg.parallelRunners = o.runners;
  cfg.outDir = outDir;
  auto comb = verifier::combinerFromName(o.combiner);
  if (!comb) throw UsageError("unknown combiner '" + o.combiner + "'");
  verifier::Thresholds th{o.thetaNodes, o.thetaEdges, *comb};
  if (o.mode == "fixed") {
    cfg.mode = verifier::FixedBudget{o.n, th};
  } else if (o.mode == "error") {
    cfg.mode = verifier::ErrorSeek{o.n};
  } else {
    auto prop = o.property == "coverage" ? verifier::Smc::Property::CoverageUnreachable
                                         : verifier::Smc::Property::NoErrorBlock;
    cfg.mode = verifier::Smc{o.epsilon, o.delta, prop, th};
  }
  auto v = verifier::runCampaign(x, specs, cfg);
  runtime::writeTextFile((fs::path(outDir) / "verdict.json").string(), verifier::verdictJson(v));
  char cov[64];
  std::snprintf(cov, sizeof cov, "C_n=%.1f%% C_e=%.1f%%", v.coverage.nodePercent(), v.coverage.edgePercent());
  std::cout << x.processId << ": " << (v.pass ? "PASS" : "FAIL") << " after " << v.runs << " runs, " << cov
            << "\n  " << v.reason << "\n";
  if (!v.failingTrace.empty()) std::cout << "  failing trace: " << (fs::path(outDir) / v.failingTrace).string() << "\n";
  return v.pass ? kPass : kFail;
}

int exitFor(const Error& e) {
  const std::string& k = e.kind();
  if (k == "UsageError" || k == "ConfigError") return kUsage;
  if (k == "IOError") return kUsage;
  return kModel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate, run and test BPMN processes with DMN decisions"};
  app.require_subcommand(1);
  Options o;

  auto addFiles = [&](CLI::App* c) {
    c->add_option("files", o.files, "one or more .bpmn files followed by any .dmn files")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("-o,--out", o.outDir, "output directory (default ./out/<processId>)");
    c->add_option("--seed", o.seed, "random seed (default $BPROC_SEED, else 0)");
    c->add_flag("--strict", o.strict, "variables without type evidence are errors");
  };
  auto addRun = [&](CLI::App* c) {
    c->add_option("--inputs", o.inputsFile, "inputs file to use instead of the inferred one")
        ->check(CLI::ExistingFile);
    c->add_option("--timeout-ms", o.timeoutMs, "per-run timeout in milliseconds")->check(CLI::PositiveNumber);
    c->add_flag("--sequential", o.sequential, "run parallel branches one after another");
    c->add_flag("-v,--verbose", o.verbose, "print the narrated trace");
  };

  auto* translate = app.add_subcommand("translate", "write the readable source, graph and inputs files");
  auto* graph = app.add_subcommand("graph", "write the graph file");
  auto* inputsCmd = app.add_subcommand("inputs", "write the inputs file");
  auto* run = app.add_subcommand("run", "execute once with the inputs file samples");
  auto* test = app.add_subcommand("test", "run a test campaign and write verdict.json");
  for (auto* c : {translate, graph, inputsCmd, run, test}) addFiles(c);
  addRun(run);
  addRun(test);
  test->add_option("--mode", o.mode, "fixed, error or smc")->check(CLI::IsMember({"fixed", "error", "smc"}));
  test->add_option("-n", o.n, "run budget")->check(CLI::PositiveNumber);
  test->add_option("--theta-nodes", o.thetaNodes, "node coverage target in percent")->check(CLI::Range(0.0, 100.0));
  test->add_option("--theta-edges", o.thetaEdges, "edge coverage target in percent")->check(CLI::Range(0.0, 100.0));
  test->add_option("--combiner", o.combiner, "and, or, nodes or edges")
      ->check(CLI::IsMember({"and", "or", "nodes", "edges"}));
  test->add_option("--epsilon", o.epsilon, "smc: tolerated violation probability");
  test->add_option("--delta", o.delta, "smc: confidence parameter");
  test->add_option("--property", o.property, "smc: no-error or coverage")
      ->check(CLI::IsMember({"no-error", "coverage"}));
  test->add_option("--runners", o.runners, "runs executed concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  for (auto* c : {translate, graph, inputsCmd, run, test}) {
    if (c->parsed()) o.command = c->get_name();
  }

  try {
    std::uint64_t seed = resolveSeed(o);
    std::vector<std::string> bpmnPaths;
    std::vector<dmn::DecisionTable> tables;
    for (const auto& f : o.files) {
      auto ext = extension(f);
      if (ext == ".bpmn") {
        bpmnPaths.push_back(f);
      } else if (ext == ".dmn") {
        auto ts = dmn::parseDmn(xml::readFile(f));
        tables.insert(tables.end(), ts.begin(), ts.end());
      } else {
        throw UsageError("'" + f + "' is neither a .bpmn nor a .dmn file");
      }
    }
    if (bpmnPaths.empty()) throw UsageError("no .bpmn file given");
    if (bpmnPaths.size() > 1 && !o.outDir.empty()) {
      throw UsageError("--out cannot be shared by several processes");
    }
    int rc = kPass;
    for (const auto& p : bpmnPaths) {
      try {
        rc = std::max(rc, process(p, tables, o, seed));
      } catch (const Error& e) {
        std::cerr << "error: " << p << ": " << e.kind() << ": " << e.what() << "\n";
        rc = std::max(rc, exitFor(e));
      }
    }
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return exitFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEngine;
  }
}
