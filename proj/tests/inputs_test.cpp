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
#include <random>

#include "bproc/bpmn/model.hpp"
#include "bproc/dmn/table.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/inputs/domain.hpp"
#include "bproc/xml/element.hpp"

using namespace bproc;
using namespace bproc::inputs;
using feel::StaticType;
using feel::Value;

namespace {

Sites conditions(std::initializer_list<const char*> exprs, bool withDefault = false) {
  Sites s;
  for (const char* e : exprs) s.conditions.push_back({feel::parseExpr(e), withDefault});
  return s;
}

std::string fixture(const std::string& name) {
  return xml::readFile(std::string(BPROC_FIXTURES) + "/" + name);
}

feel::Range range(Value lo, Value hi, bool loClosed, bool hiClosed) {
  return feel::Range{std::move(lo), std::move(hi), loClosed, hiClosed};
}

}  // namespace

TEST(InferDomains, GenericExamples) {
  auto inf = inferDomains({"v", "p", "w"}, conditions({"v > 11", "v <= 50", "p = \"yes\"", "p = \"no\"",
                                                       "w > 0", "w < abs(v)"}));
  EXPECT_EQ(render(inf.domains.at("v")), "RANGE((11,50])");
  EXPECT_EQ(render(inf.domains.at("p")), "ENUM(\"no\",\"yes\")");
  EXPECT_EQ(inf.domains.at("w").kind, Domain::Kind::Unhandled);
  EXPECT_EQ(inf.domains.at("w").exprs, std::vector<std::string>{"w < abs(v)"});
}

TEST(InferDomains, DisjointHalfLines) {
  // Bounds that exclude each other span both constants plus their radii.
  auto inf = inferDomains({"v"}, conditions({"v > 10", "v < 5"}));
  EXPECT_EQ(render(inf.domains.at("v")), "RANGE([0,20])");
  inf = inferDomains({"v"}, conditions({"v < 600", "v >= 600"}));
  EXPECT_EQ(render(inf.domains.at("v")), "RANGE([0,1200])");
  inf = inferDomains({"v"}, conditions({"v > 3", "v < 4"}));
  EXPECT_EQ(render(inf.domains.at("v")), "RANGE([0,8])");
}

TEST(InferDomains, BallFromDefaultGateway) {
  auto inf = inferDomains({"v"}, conditions({"v <= 9"}, true));
  EXPECT_EQ(inf.domains.at("v"), Domain::ball(Value(9)));
  // Without a default branch the single bound is extended by its radius.
  inf = inferDomains({"v"}, conditions({"v <= 9"}, false));
  EXPECT_EQ(render(inf.domains.at("v")), "RANGE([0,9])");
}

TEST(InferDomains, MembershipAndCells) {
  auto inf = inferDomains({"a", "b", "c"}, conditions({"a in [1, 3, 5]", "b in (2..8]", "c and true"}));
  EXPECT_EQ(render(inf.domains.at("a")), "ENUM(1,3,5)");
  EXPECT_EQ(render(inf.domains.at("b")), "RANGE((2,8])");
  EXPECT_EQ(render(inf.domains.at("c")), "ENUM(false,true)");

  Sites s;
  auto x = feel::parseExpr("x");
  for (const char* cell : {"[1..4)", "[6..9]", "-"}) s.cells.push_back({x, feel::parseUnaryTests(cell)});
  inf = inferDomains({"x"}, s);
  EXPECT_EQ(render(inf.domains.at("x")), "RANGE([1,9])");
  ASSERT_EQ(inf.diagnostics.size(), 1u);
  EXPECT_NE(inf.diagnostics[0].find("2 ranges"), std::string::npos);
}

TEST(InferDomains, UnconstrainedAndCrossVariable) {
  Sites s = conditions({"a < b"});
  s.values.push_back(feel::parseExpr("c * 2"));
  auto inf = inferDomains({"a", "b", "c"}, s);
  EXPECT_EQ(inf.domains.at("a").exprs, std::vector<std::string>{"a < b"});
  EXPECT_EQ(inf.domains.at("b").exprs, std::vector<std::string>{"a < b"});
  EXPECT_EQ(inf.domains.at("c").exprs, std::vector<std::string>{"c * 2"});
  EXPECT_EQ(inf.diagnostics.size(), 1u);
}

TEST(InferDomains, Shipment) {
  auto m = bpmn::parseBpmn(fixture("shipment.bpmn"));
  auto tables = dmn::parseDmn(fixture("shipment.dmn"));
  auto inf = inferDomains({"pType", "pWeight"}, collectSites(m, tables));
  EXPECT_EQ(render(inf.domains.at("pType")), "ENUM(\"env\",\"l\",\"m\",\"s\",\"xl\",\"xxl\")");
  // Balls around 30, 1 and 10 from the defaulted gateways dominate the DMN ranges.
  EXPECT_EQ(render(inf.domains.at("pWeight")), "RANGE([0.0,60.0])");
}

TEST(InferDomains, OrderIndependent) {
  auto m = bpmn::parseBpmn(fixture("shipment.bpmn"));
  auto tables = dmn::parseDmn(fixture("shipment.dmn"));
  Sites base = collectSites(m, tables);
  base.conditions.push_back({feel::parseExpr("q > 3 or q in [10..12)"), false});
  base.conditions.push_back({feel::parseExpr("r = \"x\" and pType != \"zz\""), true});
  std::set<std::string> vars{"pType", "pWeight", "q", "r"};
  auto want = inferDomains(vars, base);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Sites s = base;
    std::shuffle(s.conditions.begin(), s.conditions.end(), rng);
    std::shuffle(s.cells.begin(), s.cells.end(), rng);
    auto got = inferDomains(vars, s);
    EXPECT_EQ(got.domains, want.domains);
  }
}

TEST(InputsFile, ShipmentHasTwoLines) {
  std::vector<InputSpec> specs{
      {"pType", StaticType::StringT, Domain::enumeration({Value("s"), Value("xl")}), Value("xl"), {}},
      {"pWeight", StaticType::DoubleT, Domain::interval(range(Value(0.0), Value(60.0), true, true)),
       Value(9.5), {}}};
  std::string text = writeInputsFile(specs);
  EXPECT_EQ(text,
            "# <name> : <type> : <domain> : <sample>\n"
            "pType : String : ENUM(\"s\",\"xl\") : \"xl\"\n"
            "pWeight : Double : RANGE([0.0,60.0]) : 9.5\n");
}

TEST(InputsFile, RoundTrip) {
  std::vector<InputSpec> specs{
      {"v", StaticType::IntegerT, Domain::interval(range(Value(11), Value(50), false, true)), Value(12), {}},
      {"d", StaticType::DoubleT, Domain::interval(range(Value(-1.5), Value(2.0), true, false)), Value(0.25), {}},
      {"b", StaticType::IntegerT, Domain::ball(Value(9)), Value(3), {}},
      {"p", StaticType::StringT, Domain::enumeration({Value("a:b"), Value("no")}), Value("no"), {}},
      {"w", StaticType::DoubleT, Domain::unhandled({"w < abs(v)", "w > {a: 1}.a"}), Value(0.0),
       {Value(1.5), Value(-2.0)}},
      {"t", StaticType::DateT, Domain::unhandled({}), Value(), {}}};
  std::string text = writeInputsFile(specs);
  EXPECT_EQ(parseInputsFile(text), specs);
  EXPECT_EQ(writeInputsFile(parseInputsFile(text)), text);
}

TEST(InputsFile, Errors) {
  EXPECT_THROW(parseInputsFile("v : Integer : RANGE((11,50]) : 60\n"), DomainMismatch);
  try {
    parseInputsFile("# c\n\nv : Integer : RANGE((11,50]) : 20\nw : Nope : BALL(1) : 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(parseInputsFile("v : Integer : RANGE(11,50) : 20\n"), ParseError);
  EXPECT_THROW(parseInputsFile("v : Integer : ENUM() : 20\n"), ParseError);
  EXPECT_THROW(parseInputsFile("v : Integer : BALL(1)\n"), ParseError);
  EXPECT_THROW(parseInputsFile("v : Integer : BALL(x) : 1\n"), ParseError);
  EXPECT_THROW(parseInputsFile("override q = 1\n"), ParseError);
  EXPECT_THROW(parseInputsFile("v : Integer : BALL(1) : 1\nv : Integer : BALL(1) : 1\n"), ParseError);
  auto specs = parseInputsFile("w : Double : UNHANDLED(w < abs(v)) : 0.0\noverride w = 1, 2.5\n");
  EXPECT_EQ(specs.at(0).overrides, (std::vector<Value>{Value(1), Value(2.5)}));
}

TEST(Sampling, SupportAndBounds) {
  std::mt19937_64 rng(42);
  auto e = Domain::enumeration({Value("yes"), Value("no")});
  std::set<std::string> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(sampleDomain(e, StaticType::StringT, rng).asText());
  EXPECT_EQ(seen.size(), 2u);

  auto r = Domain::interval(range(Value(11), Value(50), false, true));
  std::set<std::int64_t> ints;
  for (int i = 0; i < 10000; ++i) {
    auto v = sampleDomain(r, StaticType::IntegerT, rng).asInteger();
    ASSERT_GE(v, 12);
    ASSERT_LE(v, 50);
    ints.insert(v);
  }
  EXPECT_EQ(ints.size(), 39u);

  auto b = Domain::ball(Value(9));
  EXPECT_EQ(ballRadius(Value(9)), 9.0);
  int centre = 0;
  for (int i = 0; i < 10000; ++i) {
    auto v = sampleDomain(b, StaticType::IntegerT, rng).asInteger();
    ASSERT_GE(v, 0);
    ASSERT_LE(v, 18);
    centre += v == 9;
  }
  // Roughly 0.1 + 0.9/19 of the draws land on the centre.
  EXPECT_GT(centre, 1000);
  EXPECT_LT(centre, 2000);
}

TEST(Sampling, EverySampleValidates) {
  std::mt19937_64 rng(5);
  std::vector<std::pair<Domain, StaticType>> cases{
      {Domain::enumeration({Value(1), Value(2.5), Value("x")}), StaticType::UnknownT},
      {Domain::interval(range(Value(0.0), Value(1.0), false, false)), StaticType::DoubleT},
      {Domain::interval(range(Value(-3), Value(3), true, false)), StaticType::IntegerT},
      {Domain::interval(range(Value(2.0), Value(2.0), true, true)), StaticType::DoubleT},
      {Domain::ball(Value(-0.5)), StaticType::DoubleT},
      {Domain::ball(Value(2.5)), StaticType::IntegerT},
      {Domain::ball(Value(100)), StaticType::IntegerT}};
  for (const auto& [d, t] : cases) {
    for (int i = 0; i < 10000; ++i) {
      Value v = sampleDomain(d, t, rng);
      ASSERT_TRUE(contains(d, t, v)) << render(d) << " " << feel::render(v);
    }
  }
}

TEST(Sampling, Overrides) {
  std::mt19937_64 rng(1);
  InputSpec s{"w", StaticType::DoubleT, Domain::unhandled({"w < abs(v)"}), Value(0.0), {}};
  EXPECT_THROW(sample(s, rng), MissingOverride);
  EXPECT_THROW(sampleDomain(s.domain, s.type, rng), MissingOverride);
  s.overrides = {Value(1.0), Value(2.0)};
  for (int i = 0; i < 100; ++i) {
    double v = sample(s, rng).asDecimal();
    EXPECT_TRUE(v == 1.0 || v == 2.0);
  }
  EXPECT_THROW(Domain::interval(range(Value(3), Value(1), true, true)), Error);
  EXPECT_THROW(sampleDomain(Domain::interval(range(Value(1), Value(2), false, false)), StaticType::IntegerT, rng),
               Error);
}
