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

#include "bproc/dmn/table.hpp"

#include <algorithm>

#include "bproc/feel/errors.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/xml/element.hpp"

namespace bproc::dmn {

const char* hitPolicyName(HitPolicy p) {
  switch (p) {
    case HitPolicy::First: return "FIRST";
    case HitPolicy::Unique: return "UNIQUE";
    case HitPolicy::Any: return "ANY";
  }
  return "?";
}

bool Rule::isDefault() const {
  return std::all_of(inputEntries.begin(), inputEntries.end(),
                     [](const feel::UnaryTestPtr& t) { return t->isDash(); });
}

namespace {

HitPolicy hitPolicyFrom(const std::string& text, const std::string& where) {
  // Absent attribute: first-hit, see README.
  if (text.empty() || text == "FIRST" || text == "F") return HitPolicy::First;
  if (text == "UNIQUE" || text == "U") return HitPolicy::Unique;
  if (text == "ANY" || text == "A") return HitPolicy::Any;
  throw UnsupportedHitPolicy("table '" + where + "': hit policy " + text +
                             " is not supported (use UNIQUE, ANY or FIRST)");
}

std::string cellText(const xml::Element* e) {
  if (!e) return {};
  if (const auto* t = e->child("text")) return t->text;
  return e->text;
}

DecisionTable convert(const xml::Element& decision, const xml::Element& dt) {
  DecisionTable t;
  t.id = decision.attr("id");
  t.name = decision.attr("name", t.id);
  if (t.id.empty()) throw SchemaError("decision without id");
  t.hitPolicy = hitPolicyFrom(dt.attr("hitPolicy"), t.id);

  for (const auto* in : dt.all("input")) {
    const auto* ie = in->child("inputExpression");
    std::string text = cellText(ie);
    if (text.empty()) {
      throw SchemaError("table '" + t.id + "': input '" + in->attr("id") + "' has no inputExpression");
    }
    try {
      t.inputs.push_back({in->attr("label", text), feel::parseExpr(text)});
    } catch (const feel::SyntaxError& e) {
      throw SchemaError("table '" + t.id + "', input header: " + e.what());
    }
  }
  for (const auto* out : dt.all("output")) {
    std::string name = out->attr("name", out->attr("label", out->attr("id")));
    if (name.empty()) throw SchemaError("table '" + t.id + "': output without name");
    t.outputs.push_back(name);
  }
  if (t.inputs.empty()) throw SchemaError("table '" + t.id + "' has no input column");
  if (t.outputs.empty()) throw SchemaError("table '" + t.id + "' has no output column");

  std::size_t row = 0;
  for (const auto* r : dt.all("rule")) {
    ++row;
    Rule rule;
    std::string where = "table '" + t.id + "', rule " + std::to_string(row);
    auto ins = r->all("inputEntry");
    auto outs = r->all("outputEntry");
    if (ins.size() != t.inputs.size() || outs.size() != t.outputs.size()) {
      throw SchemaError(where + ": expected " + std::to_string(t.inputs.size()) + " input and " +
                        std::to_string(t.outputs.size()) + " output entries");
    }
    for (std::size_t j = 0; j < ins.size(); ++j) {
      try {
        rule.inputEntries.push_back(feel::parseUnaryTests(cellText(ins[j])));
      } catch (const feel::SyntaxError& e) {
        throw SchemaError(where + ", input " + std::to_string(j + 1) + ": " + e.what());
      }
    }
    for (std::size_t j = 0; j < outs.size(); ++j) {
      std::string text = cellText(outs[j]);
      feel::ExprPtr e;
      try {
        e = text.empty() ? feel::make(feel::node::Literal{}) : feel::parseExpr(text);
      } catch (const feel::SyntaxError& err) {
        throw SchemaError(where + ", output " + std::to_string(j + 1) + ": " + err.what());
      }
      if (!feel::isConstant(*e)) {
        throw SchemaError(where + ", output " + std::to_string(j + 1) +
                          ": output entries must not reference variables");
      }
      rule.outputEntries.push_back(std::move(e));
    }
    if (const auto* d = r->child("description")) rule.annotation = d->text;
    t.rules.push_back(std::move(rule));
  }
  return t;
}

bool matches(const Rule& r, const std::vector<feel::Value>& args) {
  for (std::size_t j = 0; j < args.size(); ++j) {
    if (!feel::matchUnary(*r.inputEntries[j], args[j])) return false;
  }
  return true;
}

TableResult result(const DecisionTable& t, std::size_t i) {
  TableResult res{{}, i};
  for (const auto& e : t.rules[i].outputEntries) {
    res.outputs.push_back(feel::evaluate(*e, feel::emptyEnvironment()));
  }
  return res;
}

}  // namespace

std::vector<DecisionTable> parseDmn(std::string_view xmlText) {
  xml::Element root = xml::parse(xmlText);
  if (root.name != "definitions") throw SchemaError("DMN root element must be <definitions>");
  std::vector<DecisionTable> tables;
  for (const auto* d : root.all("decision")) {
    if (const auto* dt = d->child("decisionTable")) tables.push_back(convert(*d, *dt));
  }
  return tables;
}

TableResult evaluateTable(const DecisionTable& t, const std::vector<feel::Value>& args) {
  if (args.size() != t.inputs.size()) {
    throw Error("ArityError", "table '" + t.id + "' expects " + std::to_string(t.inputs.size()) +
                                  " arguments, got " + std::to_string(args.size()));
  }
  if (t.hitPolicy == HitPolicy::First) {
    for (std::size_t i = 0; i < t.rules.size(); ++i) {
      if (matches(t.rules[i], args)) return result(t, i);
    }
    throw NoMatch(t.id);
  }

  // All-dash rows only apply when no other rule matches; several of them are
  // then checked against each other like ordinary hits.
  std::vector<std::size_t> hits, defaults;
  for (std::size_t i = 0; i < t.rules.size(); ++i) {
    if (t.rules[i].isDefault()) defaults.push_back(i);
    else if (matches(t.rules[i], args)) hits.push_back(i);
  }
  if (hits.empty()) hits = defaults;
  if (hits.empty()) throw NoMatch(t.id);
  if (t.hitPolicy == HitPolicy::Unique) {
    if (hits.size() > 1) {
      throw UniquenessViolation("table '" + t.id + "': rules " + std::to_string(hits[0] + 1) +
                                " and " + std::to_string(hits[1] + 1) + " both match");
    }
    return result(t, hits[0]);
  }
  TableResult first = result(t, hits[0]);
  for (std::size_t k = 1; k < hits.size(); ++k) {
    if (result(t, hits[k]).outputs != first.outputs) {
      throw AnyConflict("table '" + t.id + "': rules " + std::to_string(hits[0] + 1) + " and " +
                        std::to_string(hits[k] + 1) + " match with different outputs");
    }
  }
  return first;
}

}  // namespace bproc::dmn
