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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "bproc/verifier/campaign.hpp"
#include "support/fixtures.hpp"

using namespace bproc;
using namespace bproc::verifier;
using namespace bproc::testsupport;
using feel::Value;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bproc_verifier_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

// Coverage recomputed straight from trace files, without the library.
std::pair<std::set<std::string>, std::set<std::pair<std::string, std::string>>> readTrace(
    const std::filesystem::path& p) {
  std::ifstream in(p);
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind, a, b;
    ls >> kind >> a;
    if (kind == "node") nodes.insert(a);
    if (kind == "edge") {
      ls >> b;
      edges.insert({a, b});
    }
  }
  return {nodes, edges};
}

runtime::Trace traceOf(std::vector<std::string> nodes) {
  runtime::Trace t;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) t.records.push_back({runtime::TraceRecord::Kind::Edge, nodes[i - 1], nodes[i], {}});
    t.records.push_back({runtime::TraceRecord::Kind::Node, nodes[i], "", {}});
  }
  return t;
}

std::uint64_t bruteSampleSize(double eps, double delta) {
  std::uint64_t n = 1;
  while (std::pow(1.0 - eps, static_cast<double>(n)) > delta) ++n;
  return n;
}

std::string readText(const std::filesystem::path& p) { return xml::readFile(p.string()); }

}  // namespace

TEST(Coverage, EmptyAndFull) {
  auto x = compileFixture("diamond.bpmn");
  auto r = emptyCoverage(x.graph);
  accumulateCoverage(r, runtime::Trace{}, x.graph);
  EXPECT_EQ(r.nodePercent(), 0.0);
  EXPECT_EQ(r.edgePercent(), 0.0);
  accumulateCoverage(r, traceOf({"start", "split", "up", "merge", "end"}), x.graph);
  accumulateCoverage(r, traceOf({"split", "down", "merge"}), x.graph);
  EXPECT_EQ(r.nodePercent(), 100.0);
  EXPECT_EQ(r.edgePercent(), 100.0);
}

TEST(Coverage, UnionOfDisjointBranches) {
  auto x = compileFixture("diamond.bpmn");
  auto r = emptyCoverage(x.graph);
  auto up = runtime::runOnce(x, {{"x", {Value(1)}}});
  accumulateCoverage(r, up.trace, x.graph);
  EXPECT_DOUBLE_EQ(r.edgePercent(), 100.0 * 4 / 6);
  EXPECT_DOUBLE_EQ(r.nodePercent(), 100.0 * 5 / 6);
  // Same run again adds nothing.
  accumulateCoverage(r, up.trace, x.graph);
  EXPECT_DOUBLE_EQ(r.edgePercent(), 100.0 * 4 / 6);
  auto down = runtime::runOnce(x, {{"x", {Value(-1)}}});
  accumulateCoverage(r, down.trace, x.graph);
  EXPECT_EQ(r.edgePercent(), 100.0);
  EXPECT_EQ(r.nodePercent(), 100.0);
}

TEST(Coverage, UnknownId) {
  auto x = compileFixture("diamond.bpmn");
  auto r = emptyCoverage(x.graph);
  try {
    accumulateCoverage(r, traceOf({"start", "ghost"}), x.graph);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "UnknownId");
  }
  EXPECT_THROW(accumulateCoverage(r, traceOf({"start", "end"}), x.graph), Error);
}

TEST(SmcSize, KnownValues) {
  EXPECT_EQ(smcSampleSize(0.01, 0.01), 459u);
  EXPECT_EQ(smcSampleSize(0.5, 0.5), 1u);
  EXPECT_EQ(smcSampleSize(0.999999, 0.5), 1u);
  EXPECT_EQ(smcSampleSize(0.999999, 0.01), 1u);
  EXPECT_EQ(std::ceil(std::log(1 / 0.01) / std::log(1 / 0.99)), 459.0);
}

TEST(SmcSize, RandomPairs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 500; ++i) {
    double eps = u(rng), delta = u(rng);
    auto n = smcSampleSize(eps, delta);
    EXPECT_EQ(n, bruteSampleSize(eps, delta)) << eps << " " << delta;
    EXPECT_LE(std::pow(1 - eps, static_cast<double>(n)), delta);
    if (n > 1) EXPECT_GT(std::pow(1 - eps, static_cast<double>(n - 1)), delta);
  }
}

TEST(SmcSize, Rejects) {
  for (auto [e, d] : std::vector<std::pair<double, double>>{{0, 0.5}, {1, 0.5}, {0.5, 0}, {0.5, 1}, {-1, 2}}) {
    EXPECT_THROW(smcSampleSize(e, d), ConfigError);
  }
}

TEST(Campaign, ShipmentFixedBudget) {
  ir::CompileOptions co;
  co.seed = 42;
  auto x = compileFixture("shipment.bpmn", {"shipment.dmn"}, co);
  CampaignConfig cfg;
  cfg.seed = 42;
  cfg.mode = FixedBudget{1000, {}};
  auto v = runCampaign(x, x.inputVars, cfg);
  EXPECT_TRUE(v.pass) << v.reason;
  EXPECT_EQ(v.runs, 1000u);
  EXPECT_GE(v.coverage.nodePercent(), 70.0);
  EXPECT_GE(v.coverage.edgePercent(), 65.0);
  // Every package type has a length, so the undefined-length branch is dead.
  EXPECT_EQ(v.coverage.nodes.size(), 13u);
  EXPECT_FALSE(v.coverage.nodes.count("EndEvent_undefinedLength"));
  EXPECT_EQ(v.coverage.edges.size(), 16u);
  EXPECT_LE(v.meanRunMs, 100.0);
  EXPECT_GE(v.stddevRunMs, 0.0);
}

TEST(Campaign, EarlyStopIsReproducible) {
  auto x = compileFixture("loan.bpmn", {"loan.dmn"});
  auto dir = scratch("early");
  CampaignConfig cfg;
  cfg.seed = 3;
  cfg.outDir = dir.string();
  cfg.mode = FixedBudget{500, {60, 50, Combiner::And}};
  auto v = runCampaign(x, x.inputVars, cfg);
  ASSERT_TRUE(v.pass) << v.reason;
  ASSERT_LT(v.runs, 500u);

  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  double lastN = 0, lastE = 0;
  for (std::uint64_t k = 1; k <= v.runs; ++k) {
    auto [n, e] = readTrace(dir / "runs" / ("run_" + std::to_string(k) + ".trace"));
    nodes.insert(n.begin(), n.end());
    edges.insert(e.begin(), e.end());
    double cn = 100.0 * nodes.size() / x.graph.nodes.size();
    double ce = 100.0 * edges.size() / x.graph.edges.size();
    EXPECT_GE(cn, lastN);
    EXPECT_GE(ce, lastE);
    lastN = cn;
    lastE = ce;
    // The campaign stopped at the first run meeting the target.
    if (k < v.runs) EXPECT_FALSE(cn >= 60 && ce >= 50) << k;
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "runs" / ("run_" + std::to_string(v.runs + 1) + ".trace")));
  EXPECT_DOUBLE_EQ(lastN, v.coverage.nodePercent());
  EXPECT_DOUBLE_EQ(lastE, v.coverage.edgePercent());
  std::filesystem::remove_all(dir);
}

TEST(Campaign, FixedBudgetFailsBelowTarget) {
  auto x = compileFixture("shipment.bpmn", {"shipment.dmn"});
  CampaignConfig cfg;
  cfg.mode = FixedBudget{50, {100, 0, Combiner::NodesOnly}};
  auto v = runCampaign(x, x.inputVars, cfg);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.runs, 50u);
  EXPECT_FALSE(v.failingRun.has_value());
  // Full node coverage is impossible but 90% of the edges is not.
  cfg.mode = FixedBudget{1000, {100, 90, Combiner::Or}};
  v = runCampaign(x, x.inputVars, cfg);
  EXPECT_TRUE(v.pass);
  EXPECT_LT(v.runs, 1000u);
  EXPECT_GE(v.coverage.edgePercent(), 90.0);
}

TEST(Campaign, ErrorSeekFindsBadInput) {
  auto x = compileFixture("bad_input.bpmn");
  ASSERT_EQ(x.inputVars.size(), 1u);
  EXPECT_EQ(x.inputVars[0].domain.kind, inputs::Domain::Kind::Enum);
  auto dir = scratch("errorseek");
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CampaignConfig cfg;
    cfg.seed = seed;
    cfg.outDir = dir.string();
    cfg.mode = ErrorSeek{50};
    auto v = runCampaign(x, x.inputVars, cfg);
    ASSERT_FALSE(v.pass) << seed;
    ASSERT_TRUE(v.failingRun.has_value());
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_EQ(v.runs, *v.failingRun);
    EXPECT_EQ(v.witness->summary.code, "E_BAD");
    EXPECT_EQ(v.failingTrace, "runs/run_" + std::to_string(*v.failingRun) + ".trace");
    // Replay from the stored summary reproduces it byte for byte.
    auto out = readText(dir / ("runs/run_" + std::to_string(*v.failingRun) + ".out"));
    auto replay = runtime::runOnce(x, runtime::parseSummaryInputs(out));
    EXPECT_EQ(runtime::formatSummary(replay.summary), out);
    EXPECT_EQ(runtime::formatTrace(replay.trace, x.graph), readText(dir / v.failingTrace));
    std::filesystem::remove_all(dir);
  }
}

TEST(Campaign, ErrorSeekAsymmetry) {
  auto clean = compileFixture("diamond.bpmn");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CampaignConfig cfg;
    cfg.seed = seed;
    cfg.mode = ErrorSeek{30};
    auto v = runCampaign(clean, clean.inputVars, cfg);
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.runs, 30u);
    EXPECT_FALSE(v.failingRun.has_value());
  }
  auto broken = bpmn::parseBpmn(
      "<bpmn:definitions xmlns:bpmn=\"http://www.omg.org/spec/BPMN/20100524/MODEL\"><bpmn:process id=\"P\">"
      "<bpmn:startEvent id=\"s\"/><bpmn:endEvent id=\"e\"><bpmn:errorEventDefinition/></bpmn:endEvent>"
      "<bpmn:sequenceFlow id=\"f\" sourceRef=\"s\" targetRef=\"e\"/></bpmn:process></bpmn:definitions>");
  auto x = ir::compile(broken, {});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CampaignConfig cfg;
    cfg.seed = seed;
    cfg.mode = ErrorSeek{10};
    auto v = runCampaign(x, x.inputVars, cfg);
    EXPECT_FALSE(v.pass);
    EXPECT_EQ(v.failingRun, 1u);
    EXPECT_EQ(v.runs, 1u);
  }
}

TEST(Campaign, SmcNoErrorBlock) {
  auto x = compileFixture("diamond.bpmn");
  CampaignConfig cfg;
  cfg.mode = Smc{0.01, 0.01, Smc::Property::NoErrorBlock, {}};
  auto v = runCampaign(x, x.inputVars, cfg);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.runs, 459u);
  EXPECT_NE(v.reason.find("statistical"), std::string::npos);

  auto bad = compileFixture("bad_input.bpmn");
  v = runCampaign(bad, bad.inputVars, cfg);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->summary.outcome, runtime::Outcome::Error);
}

TEST(Campaign, SmcCoverageUnreachable) {
  auto x = compileFixture("shipment.bpmn", {"shipment.dmn"});
  CampaignConfig cfg;
  cfg.mode = Smc{0.05, 0.05, Smc::Property::CoverageUnreachable, {100, 100, Combiner::And}};
  auto v = runCampaign(x, x.inputVars, cfg);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.runs, smcSampleSize(0.05, 0.05));
  EXPECT_NE(v.reason.find("statistical"), std::string::npos);

  cfg.mode = Smc{0.05, 0.05, Smc::Property::CoverageUnreachable, {90, 90, Combiner::And}};
  v = runCampaign(x, x.inputVars, cfg);
  EXPECT_FALSE(v.pass);
  EXPECT_TRUE(v.failingRun.has_value());
  EXPECT_LT(v.runs, smcSampleSize(0.05, 0.05));
}

TEST(Campaign, MissingOverride) {
  auto x = compileFixture("diamond.bpmn");
  std::vector<inputs::InputSpec> specs{
      {"x", feel::StaticType::IntegerT, inputs::Domain::unhandled({"x < abs(y)"}), Value(0), {}}};
  try {
    CampaignConfig cfg;
    runCampaign(x, specs, cfg);
    FAIL();
  } catch (const inputs::MissingOverride& e) {
    EXPECT_EQ(e.variable(), "x");
  }
  specs[0].overrides = {Value(-3), Value(3)};
  CampaignConfig cfg;
  cfg.mode = FixedBudget{40, {100, 100, Combiner::And}};
  auto v = runCampaign(x, specs, cfg);
  EXPECT_TRUE(v.pass);
}

TEST(Campaign, RejectsBadConfig) {
  auto x = compileFixture("diamond.bpmn");
  CampaignConfig cfg;
  cfg.mode = FixedBudget{0, {}};
  EXPECT_THROW(runCampaign(x, x.inputVars, cfg), ConfigError);
  cfg.mode = FixedBudget{5, {101, 0, Combiner::And}};
  EXPECT_THROW(runCampaign(x, x.inputVars, cfg), ConfigError);
  cfg.mode = Smc{1.5, 0.1, Smc::Property::NoErrorBlock, {}};
  EXPECT_THROW(runCampaign(x, x.inputVars, cfg), ConfigError);
}

TEST(Campaign, ParallelRunnersMatchSequential) {
  auto x = compileFixture("loan.bpmn", {"loan.dmn"});
  auto strip = [](const Verdict& v) {
    auto j = nlohmann::json::parse(verdictJson(v));
    j.erase("mean_run_ms");
    j.erase("stddev_run_ms");
    return j.dump();
  };
  for (auto mode : std::vector<std::variant<FixedBudget, ErrorSeek, Smc>>{
           FixedBudget{200, {100, 100, Combiner::And}}, ErrorSeek{200},
           Smc{0.1, 0.1, Smc::Property::NoErrorBlock, {}}}) {
    CampaignConfig one, four;
    one.seed = four.seed = 11;
    one.mode = four.mode = mode;
    four.parallelRunners = 4;
    EXPECT_EQ(strip(runCampaign(x, x.inputVars, one)), strip(runCampaign(x, x.inputVars, four)));
  }
}

TEST(Campaign, DrawInputs) {
  auto x = compileFixture("shipment.bpmn", {"shipment.dmn"});
  auto a = drawInputs(x, x.inputVars, 5, 1);
  EXPECT_EQ(a, drawInputs(x, x.inputVars, 5, 1));
  ASSERT_EQ(a.at("pType").size(), 1u);
  ASSERT_EQ(a.at("pWeight").size(), 1u);
  bool differs = false;
  for (std::uint64_t k = 2; k < 20; ++k) differs |= drawInputs(x, x.inputVars, 5, k) != a;
  EXPECT_TRUE(differs);
}

TEST(Campaign, VerdictJson) {
  auto x = compileFixture("bad_input.bpmn");
  CampaignConfig cfg;
  cfg.mode = FixedBudget{3, {}};
  auto j = nlohmann::ordered_json::parse(verdictJson(runCampaign(x, x.inputVars, cfg)));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"result", "reason", "c_n", "c_e", "runs", "mean_run_ms",
                                            "stddev_run_ms", "failing_trace"}));
  EXPECT_EQ(j["result"], "PASS");
  EXPECT_EQ(j["runs"], 3);
  EXPECT_TRUE(j["failing_trace"].is_null());

  cfg.mode = ErrorSeek{50};
  j = nlohmann::ordered_json::parse(verdictJson(runCampaign(x, x.inputVars, cfg)));
  EXPECT_EQ(j["result"], "FAIL");
  EXPECT_TRUE(j["failing_trace"].is_string());
}
