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
#include <map>

#include "bproc/bpmn/model.hpp"
#include "bproc/feel/errors.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/xml/element.hpp"

namespace bproc::bpmn {

namespace {

using xml::Element;

const std::map<std::string, NodeKind, std::less<>> kNodeElements = {
    {"startEvent", NodeKind::StartEvent},
    {"endEvent", NodeKind::EndSuccess},
    {"userTask", NodeKind::UserTask},
    {"manualTask", NodeKind::ManualTask},
    {"task", NodeKind::ManualTask},
    {"scriptTask", NodeKind::ScriptTask},
    {"serviceTask", NodeKind::ServiceTask},
    {"businessRuleTask", NodeKind::BusinessRuleTask},
    {"sendTask", NodeKind::SendTask},
    {"receiveTask", NodeKind::ReceiveTask},
    {"exclusiveGateway", NodeKind::ExclusiveGateway},
    {"parallelGateway", NodeKind::ParallelGateway},
    {"inclusiveGateway", NodeKind::InclusiveGateway},
};

const std::set<std::string, std::less<>> kUnsupported = {
    "eventBasedGateway", "complexGateway",         "subProcess",
    "adHocSubProcess",   "transaction",            "callActivity",
    "boundaryEvent",     "intermediateCatchEvent", "intermediateThrowEvent"};

const std::set<std::string, std::less<>> kIgnored = {
    "dataObject", "dataObjectReference", "dataStoreReference", "extensionElements",
    "documentation", "property", "ioSpecification"};

const std::set<std::string, std::less<>> kDropped = {"laneSet", "textAnnotation", "association",
                                                      "group", "category"};

std::string stripEquals(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  s = s.substr(b);
  if (!s.empty() && s[0] == '=') s = s.substr(1);
  return s;
}

feel::ExprPtr expression(const std::string& raw, const std::string& where) {
  std::string text = stripEquals(raw);
  try {
    return feel::parseExpr(text);
  } catch (const feel::SyntaxError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

class Builder {
 public:
  explicit Builder(const Element& root) : root_(root) {}

  ProcessModel build() {
    std::vector<const Element*> processes;
    for (const auto* p : root_.all("process")) {
      if (!p->children.empty()) processes.push_back(p);
    }
    if (processes.empty()) throw SchemaError("document contains no process");
    if (processes.size() > 1) {
      throw SchemaError("document contains " + std::to_string(processes.size()) +
                        " processes; exactly one is supported per file");
    }
    if (root_.child("collaboration")) {
      m_.warnings.push_back("pools and message flows of the collaboration are ignored");
    }
    for (const auto* msg : root_.all("message")) {
      m_.messages.push_back({msg->attr("id"), msg->attr("name", msg->attr("id"))});
    }
    for (const auto* err : root_.all("error")) {
      errors_[err->attr("id")] = err;
    }
    const Element& proc = *processes.front();
    m_.processId = proc.attr("id");
    m_.name = proc.attr("name", m_.processId);
    if (m_.processId.empty()) throw SchemaError("process without id");
    collectDataNames(proc);

    std::map<std::string, std::string> defaults;  // node id -> default flow id
    for (const auto& el : proc.children) {
      auto it = kNodeElements.find(el.name);
      if (it != kNodeElements.end()) {
        m_.nodes.push_back(makeNode(el, it->second));
        if (el.has("default")) defaults[el.attr("id")] = el.attr("default");
      } else if (el.name == "sequenceFlow") {
        SequenceFlow f;
        f.id = el.attr("id");
        f.source = el.attr("sourceRef");
        f.target = el.attr("targetRef");
        if (f.id.empty() || f.source.empty() || f.target.empty()) {
          throw SchemaError("sequenceFlow '" + f.id + "' lacks id, sourceRef or targetRef");
        }
        if (const auto* c = el.child("conditionExpression")) {
          if (!stripEquals(c->text).empty()) {
            f.condition = expression(c->text, "condition of flow '" + f.id + "'");
          }
        }
        m_.flows.push_back(std::move(f));
      } else if (kUnsupported.count(el.name)) {
        throw UnsupportedElement("element <" + el.name + "> '" + el.attr("id") +
                                 "' is not supported");
      } else if (kDropped.count(el.name)) {
        m_.warnings.push_back("<" + el.name + "> '" + el.attr("id") + "' ignored");
      } else if (!kIgnored.count(el.name)) {
        throw SchemaError("unknown process element <" + el.name + "> '" + el.attr("id") + "'");
      }
    }

    for (const auto& f : m_.flows) {
      if (!m_.node(f.source)) {
        throw SchemaError("flow '" + f.id + "' starts at unknown node '" + f.source + "'");
      }
      if (!m_.node(f.target)) {
        throw SchemaError("flow '" + f.id + "' ends at unknown node '" + f.target + "'");
      }
    }
    for (const auto& [nodeId, flowId] : defaults) {
      auto it = std::find_if(m_.flows.begin(), m_.flows.end(),
                             [&](const SequenceFlow& f) { return f.id == flowId; });
      if (it == m_.flows.end() || it->source != nodeId) {
        throw SchemaError("default flow '" + flowId + "' of '" + nodeId +
                          "' is not one of its outgoing flows");
      }
      it->isDefault = true;
    }
    return std::move(m_);
  }

 private:
  void collectDataNames(const Element& proc) {
    std::map<std::string, std::string> objects;
    for (const auto* d : proc.all("dataObject")) objects[d->attr("id")] = d->attr("name");
    for (const auto& el : proc.children) {
      if (el.name == "dataObjectReference" || el.name == "dataStoreReference") {
        std::string name = el.attr("name");
        if (name.empty()) name = objects[el.attr("dataObjectRef")];
        if (name.empty()) name = el.attr("id");
        dataNames_[el.attr("id")] = name;
      } else if (el.name == "dataObject") {
        dataNames_[el.attr("id")] = el.attr("name", el.attr("id"));
      }
    }
  }

  std::string dataName(const std::string& ref) const {
    auto it = dataNames_.find(ref);
    return it == dataNames_.end() ? ref : it->second;
  }

  static void addUnique(std::vector<std::string>& v, const std::string& s) {
    if (!s.empty() && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  }

  // ioMapping (zeebe) or inputOutput (camunda) entries.
  static void readMappings(const Element& ext, std::vector<std::pair<std::string, std::string>>& ins,
                           std::vector<std::pair<std::string, std::string>>& outs) {
    for (const auto* io : ext.all("ioMapping")) {
      for (const auto* i : io->all("input")) ins.emplace_back(i->attr("target"), i->attr("source"));
      for (const auto* o : io->all("output")) outs.emplace_back(o->attr("target"), o->attr("source"));
    }
    for (const auto* io : ext.all("inputOutput")) {
      for (const auto* i : io->all("inputParameter")) ins.emplace_back(i->attr("name"), i->text);
      for (const auto* o : io->all("outputParameter")) outs.emplace_back(o->attr("name"), o->text);
    }
  }

  std::vector<Mapping> toMappings(const std::vector<std::pair<std::string, std::string>>& raw,
                                  const std::string& where) const {
    std::vector<Mapping> out;
    for (const auto& [target, source] : raw) {
      if (target.empty()) throw SchemaError(where + ": mapping without target");
      std::string src = stripEquals(source).empty() ? target : source;
      out.push_back({target, expression(src, where + ", mapping '" + target + "'")});
    }
    return out;
  }

  Node makeNode(const Element& el, NodeKind kind) {
    Node n;
    n.id = el.attr("id");
    n.label = el.attr("name");
    n.kind = kind;
    if (n.id.empty()) throw SchemaError("<" + el.name + "> without id");
    std::string where = "node '" + n.id + "'";

    for (const auto* a : el.all("dataOutputAssociation")) {
      if (const auto* t = a->child("targetRef")) addUnique(n.declaredWrites, dataName(t->text));
    }
    for (const auto* a : el.all("dataInputAssociation")) {
      for (const auto* s : a->all("sourceRef")) addUnique(n.declaredReads, dataName(s->text));
    }

    std::vector<std::pair<std::string, std::string>> ins, outs;
    std::map<std::string, std::string> headers;
    const Element* ext = el.child("extensionElements");
    if (ext) {
      readMappings(*ext, ins, outs);
      for (const auto* h : ext->descendants("header")) headers[h->attr("key")] = h->attr("value");
      for (const auto* f : ext->descendants("formField")) addUnique(n.declaredWrites, f->attr("id"));
    }

    switch (kind) {
      case NodeKind::StartEvent:
      case NodeKind::UserTask:
      case NodeKind::ManualTask:
        for (const auto& [target, source] : outs) addUnique(n.declaredWrites, target);
        if (kind == NodeKind::StartEvent && !el.children.empty()) {
          for (const auto& c : el.children) {
            if (c.name.find("EventDefinition") != std::string::npos) {
              m_.warnings.push_back(where + ": start event trigger <" + c.name + "> ignored");
            }
          }
        }
        break;
      case NodeKind::EndSuccess:
        if (const auto* def = el.child("errorEventDefinition")) {
          n.kind = NodeKind::EndError;
          std::string ref = def->attr("errorRef");
          auto it = errors_.find(ref);
          if (it != errors_.end()) {
            n.errorCode = it->second->attr("errorCode");
            n.errorMessage = it->second->attr("name");
          }
          if (n.errorCode.empty()) n.errorCode = "ERR_" + n.id;
          if (n.errorMessage.empty()) n.errorMessage = n.label.empty() ? n.errorCode : n.label;
        }
        break;
      case NodeKind::ScriptTask:
      case NodeKind::ServiceTask: {
        std::string body, target = el.attr("resultVariable");
        if (const auto* s = el.child("script")) body = s->text;
        if (ext) {
          if (const auto* zs = ext->child("script")) {
            body = zs->attr("expression");
            target = zs->attr("resultVariable", target);
          }
        }
        if (!stripEquals(body).empty()) {
          if (target.empty() && n.declaredWrites.size() == 1) target = n.declaredWrites.front();
          if (target.empty()) throw SchemaError(where + ": script has no result variable");
          n.assignments.push_back({target, expression(body, where + " script")});
        } else {
          auto extra = toMappings(outs, where);
          n.assignments.insert(n.assignments.end(), extra.begin(), extra.end());
        }
        if (n.assignments.empty()) {
          m_.warnings.push_back(where + ": task computes nothing; it only passes control on");
        }
        break;
      }
      case NodeKind::BusinessRuleTask: {
        n.tableRef = el.attr("decisionRef");
        if (ext) {
          if (const auto* cd = ext->child("calledDecision")) {
            n.tableRef = cd->attr("decisionId", n.tableRef);
            n.resultVariable = cd->attr("resultVariable");
          }
        }
        n.tableRef = stripEquals(n.tableRef);
        if (n.tableRef.empty()) throw SchemaError(where + ": business rule task names no decision");
        if (n.resultVariable.empty()) n.resultVariable = el.attr("resultVariable");
        n.inputMap = toMappings(ins, where);
        n.outputMap = toMappings(outs, where);
        break;
      }
      case NodeKind::SendTask:
      case NodeKind::ReceiveTask: {
        std::string ref = el.attr("messageRef");
        auto it = std::find_if(m_.messages.begin(), m_.messages.end(),
                               [&](const MessageDef& d) { return d.id == ref; });
        if (ref.empty() || it == m_.messages.end()) {
          throw SchemaError(where + ": messageRef '" + ref + "' does not name a message");
        }
        n.msgType = it->name;
        n.channel = headers.count("channel") ? headers["channel"] : n.msgType;
        if (kind == NodeKind::SendTask) {
          n.parts = toMappings(ins, where);
          if (n.parts.empty()) {
            for (const auto& v : n.declaredReads) n.parts.push_back({v, feel::make(feel::node::Variable{v})});
          }
        } else {
          n.targets = toMappings(outs, where);
          if (n.targets.empty()) {
            for (const auto& v : n.declaredWrites) n.targets.push_back({v, feel::make(feel::node::Variable{v})});
          }
        }
        break;
      }
      default:
        break;
    }
    return n;
  }

  const Element& root_;
  ProcessModel m_;
  std::map<std::string, std::string> dataNames_;
  std::map<std::string, const Element*> errors_;
};

void classifyGateways(ProcessModel& m) {
  for (auto& n : m.nodes) {
    if (!isGateway(n.kind) || n.kind == NodeKind::JoinGateway) continue;
    auto in = m.incoming(n.id).size();
    auto out = m.outgoing(n.id).size();
    if (in >= 2 && out >= 2) {
      throw SchemaError("gateway '" + n.id + "' both merges " + std::to_string(in) +
                        " and splits into " + std::to_string(out) + " flows");
    }
    if (in >= 2) {
      n.joinKind = n.kind == NodeKind::ParallelGateway    ? JoinKind::Parallel
                   : n.kind == NodeKind::InclusiveGateway ? JoinKind::Inclusive
                                                          : JoinKind::Exclusive;
      n.kind = NodeKind::JoinGateway;
    }
  }
}

void dropStrayConditions(ProcessModel& m) {
  for (auto& f : m.flows) {
    if (!f.condition) continue;
    const Node* src = m.node(f.source);
    if (src->kind == NodeKind::ExclusiveGateway || src->kind == NodeKind::InclusiveGateway) continue;
    if (!isGateway(src->kind) && m.outgoing(src->id).size() > 1) continue;  // moved by the fix
    m.warnings.push_back("condition on flow '" + f.id + "' out of '" + src->id + "' ignored");
    f.condition = nullptr;
  }
}

}  // namespace

ProcessModel parseBpmn(std::string_view xmlText) {
  xml::Element root = xml::parse(xmlText);
  if (root.name != "definitions") throw SchemaError("BPMN root element must be <definitions>");
  ProcessModel m = Builder(root).build();
  dropStrayConditions(m);
  fixMultipleOutputs(m);
  classifyGateways(m);
  validate(m);
  return m;
}

}  // namespace bproc::bpmn
