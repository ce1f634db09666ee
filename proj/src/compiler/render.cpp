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

#include "bproc/compiler/ir.hpp"
#include "bproc/feel/parser.hpp"

namespace bproc::ir {

namespace {

std::string quote(const std::string& s) { return feel::render(feel::Value(s)); }

class Renderer {
 public:
  explicit Renderer(const ExecutableModel& x) : x_(x) {}

  std::string run() {
    line("# process " + x_.processId);
    for (const auto& in : x_.inputVars) {
      line("input " + in.name + " : " + feel::typeName(in.type) + "  # " + inputs::render(in.domain));
    }
    for (const auto& [name, t] : x_.processVars) line("var " + name + " : " + feel::typeName(t));
    line("");
    line("procedure init():");
    line("  load inputs file");
    for (const auto& v : x_.initialInputs) line("  " + v + " := nextInput(" + quote(v) + ")");
    line("");
    line("procedure main():");
    line("  init()");
    line("  call " + name(x_.entry));
    for (const auto& id : x_.order) {
      line("");
      routine(x_.routines.at(id));
    }
    for (const auto& [id, t] : x_.tables) {
      line("");
      table(t);
    }
    return out_;
  }

 private:
  void line(const std::string& s) { out_ += s + "\n"; }

  std::string name(const std::string& id) const { return x_.routines.at(id).displayName; }

  static std::string mappings(const std::vector<bpmn::Mapping>& ms) {
    std::string s;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (i) s += ", ";
      s += ms[i].name + " := " + feel::render(ms[i].expr);
    }
    return s;
  }

  void routine(const Routine& r) {
    line("procedure " + r.displayName + ":  # " + bpmn::kindName(r.kind) + " " + r.id);
    for (const auto& s : r.body) step(s);
  }

  void step(const Step& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, step::ConsumeInput>) {
            line("  " + n.var + " := nextInput(" + quote(n.var) + ")");
          } else if constexpr (std::is_same_v<T, step::Assign>) {
            line("  " + n.var + " := " + feel::render(n.expr));
          } else if constexpr (std::is_same_v<T, step::InvokeTable>) {
            std::string args;
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (i) args += ", ";
              args += feel::render(n.args[i]);
            }
            line("  decide " + n.tableId + "(" + args + ") then " + mappings(n.outputs));
          } else if constexpr (std::is_same_v<T, step::Send>) {
            line("  send " + quote(n.msgType) + " on " + quote(n.channel) + " with " + mappings(n.parts));
          } else if constexpr (std::is_same_v<T, step::Receive>) {
            line("  receive " + quote(n.msgType) + " on " + quote(n.channel) + " then " + mappings(n.targets));
          } else if constexpr (std::is_same_v<T, step::Branch>) {
            for (std::size_t i = 0; i < n.cases.size(); ++i) {
              std::string cond = n.cases[i].condition ? feel::render(n.cases[i].condition) : "true";
              line(std::string(i ? "  elif " : "  if ") + cond + " then call " + name(n.cases[i].target));
            }
            std::string indent = n.cases.empty() ? "  " : "  else ";
            if (n.defaultTarget) line(indent + "call " + name(*n.defaultTarget));
            else line(indent + "fail(\"unhandled condition\")");
          } else if constexpr (std::is_same_v<T, step::Fork>) {
            std::string join = n.joinId.empty() ? "" : " join " + name(n.joinId);
            if (n.mode == step::Fork::Mode::All) {
              std::string ts;
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) ts += ", ";
                ts += name(n.branches[i].target);
              }
              line("  fork " + ts + join);
            } else {
              line("  fork selected" + join + ":");
              for (const auto& c : n.branches) {
                std::string cond = c.condition ? feel::render(c.condition) : "true";
                line("    when " + cond + " start " + name(c.target));
              }
              if (n.defaultTarget) line("    otherwise start " + name(*n.defaultTarget));
              else line("    otherwise fail(\"unhandled condition\")");
            }
          } else if constexpr (std::is_same_v<T, step::JoinBarrier>) {
            line("  await " + std::to_string(n.expectedArrivals) + " arrivals then call " + name(n.next));
          } else if constexpr (std::is_same_v<T, step::Continue>) {
            line("  call " + name(n.target));
          } else if constexpr (std::is_same_v<T, step::Terminate>) {
            if (n.success) line("  end success");
            else line("  end error " + quote(n.code) + " " + quote(n.description));
          }
        },
        s);
  }

  void table(const dmn::DecisionTable& t) {
    line("decision " + t.id + " hit " + dmn::hitPolicyName(t.hitPolicy) + ":");
    std::string ins, outs;
    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
      if (i) ins += " | ";
      ins += feel::render(t.inputs[i].expression);
    }
    for (std::size_t i = 0; i < t.outputs.size(); ++i) {
      if (i) outs += " | ";
      outs += t.outputs[i];
    }
    line("  " + ins + " -> " + outs);
    for (std::size_t r = 0; r < t.rules.size(); ++r) {
      const auto& rule = t.rules[r];
      std::string cells, values;
      for (std::size_t i = 0; i < rule.inputEntries.size(); ++i) {
        if (i) cells += " | ";
        cells += feel::render(*rule.inputEntries[i]);
      }
      for (std::size_t i = 0; i < rule.outputEntries.size(); ++i) {
        if (i) values += " | ";
        values += feel::render(rule.outputEntries[i]);
      }
      std::string note = rule.annotation.empty() ? "" : "  # " + rule.annotation;
      line("  rule " + std::to_string(r + 1) + ": " + cells + " -> " + values + note);
    }
    if (std::none_of(t.rules.begin(), t.rules.end(), [](const dmn::Rule& r) { return r.isDefault(); })) {
      line("  otherwise fail(\"no rule matches\")");
    }
  }

  const ExecutableModel& x_;
  std::string out_;
};

}  // namespace

std::string renderSource(const ExecutableModel& x) { return Renderer(x).run(); }

}  // namespace bproc::ir
