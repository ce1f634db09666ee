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

#include <algorithm>
#include <filesystem>
#include <set>

#include "bproc/feel/parser.hpp"
#include "bproc/runtime/engine.hpp"
#include "support/fixtures.hpp"

using namespace bproc;
using namespace bproc::runtime;
using namespace bproc::testsupport;
using feel::Value;

namespace {

std::string doc(const std::string& body, const std::string& preamble = "") {
  return "<bpmn:definitions xmlns:bpmn=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
         "xmlns:zeebe=\"http://camunda.org/schema/zeebe/1.0\">" +
         preamble + "<bpmn:process id=\"P\">" + body + "</bpmn:process></bpmn:definitions>";
}

std::string flow(const std::string& id, const std::string& s, const std::string& t,
                 const std::string& cond = "") {
  std::string x = "<bpmn:sequenceFlow id=\"" + id + "\" sourceRef=\"" + s + "\" targetRef=\"" + t + "\"";
  if (cond.empty()) return x + "/>";
  return x + "><bpmn:conditionExpression>" + cond + "</bpmn:conditionExpression></bpmn:sequenceFlow>";
}

std::string script(const std::string& id, const std::string& var, const std::string& expr) {
  return "<bpmn:scriptTask id=\"" + id + "\"><bpmn:extensionElements><zeebe:script expression=\"=" + expr +
         "\" resultVariable=\"" + var + "\"/></bpmn:extensionElements></bpmn:scriptTask>";
}

std::string userTask(const std::string& id, const std::string& var) {
  return "<bpmn:userTask id=\"" + id + "\"><bpmn:extensionElements><zeebe:ioMapping><zeebe:output source=\"=" +
         var + "\" target=\"" + var + "\"/></zeebe:ioMapping></bpmn:extensionElements></bpmn:userTask>";
}

ir::ExecutableModel compileXml(const std::string& xml) { return ir::compile(bpmn::parseBpmn(xml), {}); }

ir::ExecutableModel shipment() { return compileFixture("shipment.bpmn", {"shipment.dmn"}); }

RunOptions sequential() { return RunOptions{}; }

RunOptions parallel() {
  RunOptions o;
  o.mode = Mode::TrueParallel;
  return o;
}

std::size_t countNode(const Trace& t, const std::string& id) {
  auto ns = t.nodes();
  return static_cast<std::size_t>(std::count(ns.begin(), ns.end(), id));
}

std::vector<Value> writesOf(const Trace& t, const std::string& var) {
  std::vector<Value> out;
  for (const auto& [name, v] : t.writes()) {
    if (name == var) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(Run, ShipmentExtraLarge) {
  auto x = shipment();
  auto r = runOnce(x, {{"pType", {Value("xl")}}, {"pWeight", {Value(9.5)}}}, sequential());
  EXPECT_EQ(r.summary.outcome, Outcome::Success) << r.summary.message;

  auto nodes = r.trace.nodes();
  auto at = std::find(nodes.begin(), nodes.end(), "Task_getLength");
  ASSERT_NE(at, nodes.end());
  // The table record and the pLength write follow the get-length activation.
  auto& recs = r.trace.records;
  auto it = std::find_if(recs.begin(), recs.end(), [](const TraceRecord& x) {
    return x.kind == TraceRecord::Kind::Node && x.a == "Task_getLength";
  });
  ASSERT_NE(it, recs.end());
  ++it;
  ASSERT_EQ(it->kind, TraceRecord::Kind::Table);
  EXPECT_EQ(it->a, "GetLengthDT");
  EXPECT_EQ(it->values, std::vector<Value>{Value(2)});
  ++it;
  EXPECT_EQ(*it, (TraceRecord{TraceRecord::Kind::Write, "pLength", "", {Value(2)}}));

  EXPECT_EQ(writesOf(r.trace, "consent"), std::vector<Value>{Value(true)});
  EXPECT_EQ(nodes.back(), "EndEvent_ready");
  EXPECT_EQ(formatSummary(r.summary),
            "input pType = \"xl\"\ninput pWeight = 9.5\nstatus: success\ncode:\nmessage:\n");
}

TEST(Run, ShipmentErrorEnds) {
  auto x = shipment();
  auto r = runOnce(x, {{"pType", {Value("unknown")}}, {"pWeight", {Value(1.0)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
  EXPECT_EQ(r.summary.code, "E_LENGTH");
  EXPECT_EQ(r.summary.message, "undefined length");
  EXPECT_EQ(r.summary.node, "EndEvent_undefinedLength");

  r = runOnce(x, {{"pType", {Value("s")}}, {"pWeight", {Value(45.0)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
  EXPECT_EQ(r.summary.code, "E_WEIGHT");
}

TEST(Run, LastValueReused) {
  auto x = compileXml(doc("<bpmn:startEvent id=\"s\"/>" + userTask("u1", "a") + userTask("u2", "a") +
                          userTask("u3", "a") + "<bpmn:endEvent id=\"e\"/>" + flow("f1", "s", "u1") +
                          flow("f2", "u1", "u2") + flow("f3", "u2", "u3") + flow("f4", "u3", "e")));
  auto r = runOnce(x, {{"a", {Value(5)}}});
  EXPECT_EQ(writesOf(r.trace, "a"), (std::vector<Value>{Value(5), Value(5), Value(5)}));
  r = runOnce(x, {{"a", {Value(5), Value(6)}}});
  EXPECT_EQ(writesOf(r.trace, "a"), (std::vector<Value>{Value(5), Value(6), Value(6)}));
  r = runOnce(x, {{"a", {Value(1), Value(2), Value(3), Value(4)}}});
  EXPECT_EQ(writesOf(r.trace, "a"), (std::vector<Value>{Value(1), Value(2), Value(3)}));
  EXPECT_EQ(formatSummary(r.summary).substr(0, 22), "input a = [1, 2, 3, 4]");

  EXPECT_THROW(runOnce(x, {}), MissingInput);
  EXPECT_THROW(runOnce(x, {{"a", {}}}), MissingInput);
}

TEST(Run, LoopTimesOut) {
  auto x = compileFixture("loop.bpmn");
  RunOptions o;
  o.timeout = std::chrono::milliseconds(100);
  o.stepBudget = std::numeric_limits<std::uint64_t>::max();
  auto r = runOnce(x, {}, o);
  EXPECT_EQ(r.summary.outcome, Outcome::Timeout);
  EXPECT_FALSE(r.trace.records.empty());
  EXPECT_GE(r.summary.elapsed, std::chrono::milliseconds(100));
  EXPECT_NE(formatSummary(r.summary).find("status: timeout\n"), std::string::npos);

  o.stepBudget = 1000;
  o.timeout = std::chrono::milliseconds(60000);
  r = runOnce(x, {}, o);
  EXPECT_EQ(r.summary.outcome, Outcome::Timeout);
  EXPECT_EQ(r.summary.code, "StepBudget");
  EXPECT_EQ(r.trace.nodes().size(), 1000u);
}

TEST(Run, UnhandledCondition) {
  auto x = compileFixture("generic_gateway.bpmn");
  auto r = runOnce(x, {{"v", {Value(7)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
  EXPECT_NE(r.summary.message.find("unhandled condition"), std::string::npos);
  EXPECT_EQ(r.summary.node, "gw");
  r = runOnce(x, {{"v", {Value(11)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Success);
  EXPECT_EQ(r.trace.nodes().back(), "high");
  // Ordering an undefined value is an evaluation fault, not a false case.
  r = runOnce(x, {{"v", {Value()}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Fault);
  EXPECT_EQ(r.summary.code, "UndefinedError");
}

TEST(Run, NonBooleanConditionFaults) {
  auto x = compileXml(doc("<bpmn:startEvent id=\"s\"/>" + userTask("u", "a") +
                          "<bpmn:exclusiveGateway id=\"g\" default=\"f4\"/><bpmn:endEvent id=\"e1\"/>"
                          "<bpmn:endEvent id=\"e2\"/>" +
                          flow("f1", "s", "u") + flow("f2", "u", "g") + flow("f3", "g", "e1", "=a + 1") +
                          flow("f4", "g", "e2")));
  auto r = runOnce(x, {{"a", {Value(1)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Fault);
  EXPECT_EQ(r.summary.code, "TypeError");
}

TEST(Run, DecisionWithoutMatch) {
  auto x = compileFixture("nomatch.bpmn", {"nomatch.dmn"});
  auto r = runOnce(x, {{"score", {Value(30)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Fault);
  EXPECT_EQ(r.summary.code, "NoMatch");
  EXPECT_EQ(r.summary.node, "grade");
  r = runOnce(x, {{"score", {Value(60)}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Success);
  EXPECT_EQ(r.trace.nodes().back(), "passed");
}

TEST(Run, ErrorEndPassesCode) {
  auto x = compileFixture("bad_input.bpmn");
  auto r = runOnce(x, {{"kind", {Value("bad")}}});
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
  EXPECT_EQ(r.summary.code, "E_BAD");
  EXPECT_EQ(r.summary.message, "bad request");
  EXPECT_EQ(formatSummary(r.summary),
            "input kind = \"bad\"\nstatus: error\ncode: E_BAD\nmessage: bad request\n");
}

TEST(Run, GenericParallelExactlyOnce) {
  auto x = compileFixture("par_send_first.bpmn");
  for (int i = 0; i < 1000; ++i) {
    auto r = runOnce(x, {{"x", {Value(i)}}}, parallel());
    ASSERT_EQ(r.summary.outcome, Outcome::Success) << i << ": " << r.summary.message;
    ASSERT_EQ(countNode(r.trace, "after"), 1u) << i;
    ASSERT_EQ(countNode(r.trace, "join"), 1u) << i;
    ASSERT_EQ(writesOf(r.trace, "total"), std::vector<Value>{Value(2 * i + 1)}) << i;
    // Both branches arrive at the join.
    auto es = r.trace.edges();
    ASSERT_EQ(std::count(es.begin(), es.end(), std::make_pair(std::string("send"), std::string("join"))), 1);
    ASSERT_EQ(std::count(es.begin(), es.end(), std::make_pair(std::string("receive"), std::string("join"))), 1);
  }
}

TEST(Run, ReceiveFirstBlocksUntilSent) {
  auto x = compileFixture("par_receive_first.bpmn");
  for (int i = 0; i < 200; ++i) {
    auto r = runOnce(x, {{"x", {Value(3)}}}, parallel());
    ASSERT_EQ(r.summary.outcome, Outcome::Success) << r.summary.message;
    ASSERT_EQ(countNode(r.trace, "after"), 1u);
  }
}

TEST(Run, SequentialForkOrder) {
  auto x = compileFixture("par_send_first.bpmn");
  auto r = runOnce(x, {{"x", {Value(4)}}}, sequential());
  EXPECT_EQ(r.summary.outcome, Outcome::Success);
  EXPECT_EQ(r.trace.nodes(),
            (std::vector<std::string>{"start", "fork", "send", "receive", "join", "after", "end"}));
  EXPECT_EQ(writesOf(r.trace, "m1"), std::vector<Value>{Value(8)});

  auto y = compileFixture("par_receive_first.bpmn");
  r = runOnce(y, {{"x", {Value(4)}}}, sequential());
  EXPECT_EQ(r.summary.outcome, Outcome::Fault);
  EXPECT_EQ(r.summary.code, "SequentialDeadlock");
  EXPECT_NE(r.summary.message.find("'receive'"), std::string::npos);
  EXPECT_EQ(r.summary.node, "receive");
}

TEST(Run, ChannelsAreFifo) {
  std::string pre = "<bpmn:message id=\"M\" name=\"m\"/>";
  auto send = [](const std::string& id, const std::string& expr) {
    return "<bpmn:sendTask id=\"" + id + "\" messageRef=\"M\"><bpmn:extensionElements><zeebe:ioMapping>"
           "<zeebe:input source=\"=" + expr + "\" target=\"v\"/></zeebe:ioMapping></bpmn:extensionElements>"
           "</bpmn:sendTask>";
  };
  auto receive = [](const std::string& id, const std::string& var) {
    return "<bpmn:receiveTask id=\"" + id + "\" messageRef=\"M\"><bpmn:extensionElements><zeebe:ioMapping>"
           "<zeebe:output source=\"=v\" target=\"" + var + "\"/></zeebe:ioMapping></bpmn:extensionElements>"
           "</bpmn:receiveTask>";
  };
  auto x = compileXml(doc("<bpmn:startEvent id=\"s\"/>" + send("a", "1") + send("b", "2") + send("c", "3") +
                              receive("r1", "m1") + receive("r2", "m2") + receive("r3", "m3") +
                              "<bpmn:endEvent id=\"e\"/>" + flow("f1", "s", "a") + flow("f2", "a", "b") +
                              flow("f3", "b", "c") + flow("f4", "c", "r1") + flow("f5", "r1", "r2") +
                              flow("f6", "r2", "r3") + flow("f7", "r3", "e"),
                          pre));
  for (auto mode : {sequential(), parallel()}) {
    auto r = runOnce(x, {}, mode);
    ASSERT_EQ(r.summary.outcome, Outcome::Success) << r.summary.message;
    EXPECT_EQ(writesOf(r.trace, "m1"), std::vector<Value>{Value(1)});
    EXPECT_EQ(writesOf(r.trace, "m2"), std::vector<Value>{Value(2)});
    EXPECT_EQ(writesOf(r.trace, "m3"), std::vector<Value>{Value(3)});
  }
}

TEST(Run, WrongMessageType) {
  auto x = compileFixture("two_types.bpmn");
  for (auto mode : {sequential(), parallel()}) {
    auto r = runOnce(x, {}, mode);
    EXPECT_EQ(r.summary.outcome, Outcome::Fault);
    EXPECT_EQ(r.summary.code, "TypeMismatch");
    EXPECT_NE(r.summary.message.find("invoice"), std::string::npos);
  }
}

TEST(Run, ParallelReceiveTimesOut) {
  std::string pre = "<bpmn:message id=\"M\" name=\"m\"/>";
  auto x = compileXml(doc("<bpmn:startEvent id=\"s\"/><bpmn:receiveTask id=\"r\" messageRef=\"M\"/>"
                          "<bpmn:endEvent id=\"e\"/>" +
                              flow("f1", "s", "r") + flow("f2", "r", "e"),
                          pre));
  RunOptions o = parallel();
  o.timeout = std::chrono::milliseconds(50);
  auto r = runOnce(x, {}, o);
  EXPECT_EQ(r.summary.outcome, Outcome::Timeout);
  EXPECT_EQ(r.summary.node, "r");
}

TEST(Run, InclusiveForkSelectsTrueBranches) {
  auto body = "<bpmn:startEvent id=\"s\"/>" + userTask("u", "x") +
              "<bpmn:inclusiveGateway id=\"split\" default=\"fd\"/>" + script("a", "ra", "1") +
              script("b", "rb", "2") + script("c", "rc", "3") + "<bpmn:inclusiveGateway id=\"join\"/>" +
              script("after", "done", "true") + "<bpmn:endEvent id=\"e\"/>" + flow("f1", "s", "u") +
              flow("f2", "u", "split") + flow("fa", "split", "a", "=x &gt; 0") +
              flow("fb", "split", "b", "=x &gt; 5") + flow("fd", "split", "c") + flow("ja", "a", "join") +
              flow("jb", "b", "join") + flow("jc", "c", "join") + flow("f3", "join", "after") +
              flow("f4", "after", "e");
  auto x = compileXml(doc(body));
  for (auto mode : {sequential(), parallel()}) {
    auto r = runOnce(x, {{"x", {Value(3)}}}, mode);
    ASSERT_EQ(r.summary.outcome, Outcome::Success) << r.summary.message;
    EXPECT_EQ(countNode(r.trace, "a"), 1u);
    EXPECT_EQ(countNode(r.trace, "b"), 0u);
    EXPECT_EQ(countNode(r.trace, "after"), 1u);

    r = runOnce(x, {{"x", {Value(9)}}}, mode);
    ASSERT_EQ(r.summary.outcome, Outcome::Success);
    EXPECT_EQ(countNode(r.trace, "a") + countNode(r.trace, "b"), 2u);
    EXPECT_EQ(countNode(r.trace, "c"), 0u);
    EXPECT_EQ(countNode(r.trace, "after"), 1u);

    r = runOnce(x, {{"x", {Value(-1)}}}, mode);
    ASSERT_EQ(r.summary.outcome, Outcome::Success);
    EXPECT_EQ(countNode(r.trace, "c"), 1u);
    EXPECT_EQ(countNode(r.trace, "after"), 1u);
  }
}

TEST(Run, RaceIsReported) {
  auto body = "<bpmn:startEvent id=\"s\"/><bpmn:parallelGateway id=\"fork\"/>" + script("a", "z", "1") +
              script("b", "z", "2") + "<bpmn:parallelGateway id=\"join\"/><bpmn:endEvent id=\"e\"/>" +
              flow("f1", "s", "fork") + flow("f2", "fork", "a") + flow("f3", "fork", "b") +
              flow("f4", "a", "join") + flow("f5", "b", "join") + flow("f6", "join", "e");
  auto x = compileXml(doc(body));
  for (auto mode : {sequential(), parallel()}) {
    auto r = runOnce(x, {}, mode);
    EXPECT_EQ(r.summary.outcome, Outcome::Success);
    ASSERT_EQ(r.summary.diagnostics.size(), 1u);
    EXPECT_NE(r.summary.diagnostics[0].find("'z'"), std::string::npos);
  }
}

TEST(Run, ErrorEndStopsOtherBranches) {
  auto body = "<bpmn:startEvent id=\"s\"/><bpmn:parallelGateway id=\"fork\"/>"
              "<bpmn:endEvent id=\"bad\"><bpmn:errorEventDefinition/></bpmn:endEvent>" +
              script("a", "z", "1") + "<bpmn:endEvent id=\"e\"/>" + flow("f1", "s", "fork") +
              flow("f2", "fork", "bad") + flow("f3", "fork", "a") + flow("f4", "a", "e");
  auto x = compileXml(doc(body));
  auto r = runOnce(x, {}, sequential());
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
  EXPECT_EQ(r.summary.code, "ERR_bad");
  EXPECT_EQ(countNode(r.trace, "a"), 0u);
  r = runOnce(x, {}, parallel());
  EXPECT_EQ(r.summary.outcome, Outcome::Error);
}

TEST(Run, SequentialTraceIsGraphPath) {
  struct Case {
    const char* bpmn;
    std::vector<std::string> dmn;
    InputLists in;
  };
  std::vector<Case> cases = {
      {"shipment.bpmn", {"shipment.dmn"}, {{"pType", {Value("m")}}, {"pWeight", {Value(12.0)}}}},
      {"diamond.bpmn", {}, {{"x", {Value(-2)}}}},
      {"loan.bpmn", {"loan.dmn"}, {{"amount", {Value(20000)}}, {"score", {Value(500)}}, {"approved", {Value(true)}}}},
  };
  for (const auto& c : cases) {
    auto x = compileFixture(c.bpmn, c.dmn);
    auto r = runOnce(x, c.in);
    ASSERT_EQ(r.summary.outcome, Outcome::Success) << c.bpmn << ": " << r.summary.message;
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& e : x.graph.edges) edges.insert({x.graph.nodes[e.src].id, x.graph.nodes[e.dst].id});
    auto ns = r.trace.nodes();
    EXPECT_EQ(ns.front(), x.entry);
    for (std::size_t i = 1; i < ns.size(); ++i) EXPECT_TRUE(edges.count({ns[i - 1], ns[i]})) << c.bpmn;
    EXPECT_EQ(r.trace.edges().size() + 1, ns.size());
  }
}

TEST(Formats, GraphAndTrace) {
  auto x = shipment();
  auto g = formatGraph(x.graph);
  EXPECT_EQ(std::count(g.begin(), g.end(), '\n'), 31);
  EXPECT_EQ(g.substr(0, g.find('\n')), "node StartEvent_1 package_received");
  EXPECT_NE(g.find("\nedge StartEvent_1 Task_getLength\n"), std::string::npos);
  // Node lines come first.
  EXPECT_LT(g.rfind("node "), g.find("edge "));

  std::set<std::string> graphNodes;
  for (const auto& v : x.graph.nodes) graphNodes.insert(v.id);
  auto r = runOnce(x, {{"pType", {Value("l")}}, {"pWeight", {Value(25.0)}}});
  auto t = formatTrace(r.trace, x.graph);
  std::istringstream in(t);
  std::string kind, a, b;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> kind >> a;
    ASSERT_TRUE(kind == "node" || kind == "edge") << line;
    EXPECT_TRUE(graphNodes.count(a)) << line;
    if (kind == "edge") {
      ls >> b;
      EXPECT_TRUE(graphNodes.count(b)) << line;
    }
  }
  EXPECT_EQ(t.substr(0, t.find('\n')), "node StartEvent_1 package_received");
  EXPECT_EQ(t.substr(t.find('\n') + 1, t.find('\n', t.find('\n') + 1) - t.find('\n') - 1),
            "edge StartEvent_1 Task_getLength");

  auto d = describeTrace(r.trace);
  EXPECT_NE(d.find("decision GetLengthDT returned 2"), std::string::npos);
  EXPECT_NE(d.find("pWeight := 25.0"), std::string::npos);
}

TEST(Formats, Artifacts) {
  auto x = compileFixture("diamond.bpmn");
  auto r = runOnce(x, {{"x", {Value(1)}}});
  auto dir = std::filesystem::temp_directory_path() / "bproc_runtime_test";
  std::filesystem::remove_all(dir);
  writeArtifacts(r, x.graph, dir.string(), "Diamond");
  EXPECT_EQ(xml::readFile((dir / "Diamond.graph").string()), formatGraph(x.graph));
  EXPECT_EQ(xml::readFile((dir / "Diamond.trace").string()), formatTrace(r.trace, x.graph));
  EXPECT_EQ(xml::readFile((dir / "Diamond.out").string()),
            "input x = 1\nstatus: success\ncode:\nmessage:\n");
  std::filesystem::remove_all(dir);
}

TEST(Formats, SequentialRunsAreDeterministic) {
  auto x = shipment();
  InputLists in{{"pType", {Value("xxl")}}, {"pWeight", {Value(22.5)}}};
  auto first = runOnce(x, in);
  auto text = formatTrace(first.trace, x.graph) + formatSummary(first.summary);
  for (int i = 0; i < 20; ++i) {
    auto again = runOnce(x, in);
    EXPECT_EQ(formatTrace(again.trace, x.graph) + formatSummary(again.summary), text);
    EXPECT_EQ(again.trace.records, first.trace.records);
  }
}
