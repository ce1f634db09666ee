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

#include <filesystem>
#include <fstream>

#include "bproc/feel/evaluator.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/feel/value.hpp"
#include "bproc/runtime/engine.hpp"

namespace bproc::runtime {

namespace {

std::string nodeLine(const std::string& id, const std::string& label) {
  std::string l = label;
  for (char& c : l) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = '_';
  }
  return l.empty() ? "node " + id + "\n" : "node " + id + " " + l + "\n";
}

}  // namespace

std::string formatGraph(const bpmn::ProcessGraph& g) {
  std::string out;
  for (const auto& v : g.nodes) out += nodeLine(v.id, v.label);
  for (const auto& e : g.edges) out += "edge " + g.nodes[e.src].id + " " + g.nodes[e.dst].id + "\n";
  return out;
}

std::string formatTrace(const Trace& t, const bpmn::ProcessGraph& g) {
  std::map<std::string, std::string> labels;
  for (const auto& v : g.nodes) labels[v.id] = v.label;
  std::string out;
  for (const auto& r : t.records) {
    if (r.kind == TraceRecord::Kind::Node) out += nodeLine(r.a, labels[r.a]);
    else if (r.kind == TraceRecord::Kind::Edge) out += "edge " + r.a + " " + r.b + "\n";
  }
  return out;
}

std::string formatSummary(const RunSummary& s) {
  std::string out;
  for (const auto& [name, values] : s.inputsUsed) {
    std::string v = values.size() == 1 ? feel::render(values.front()) : feel::render(feel::Value(values));
    out += "input " + name + " = " + v + "\n";
  }
  out += std::string("status: ") + outcomeName(s.outcome) + "\n";
  out += s.code.empty() ? "code:\n" : "code: " + s.code + "\n";
  out += s.message.empty() ? "message:\n" : "message: " + s.message + "\n";
  return out;
}

InputLists parseSummaryInputs(const std::string& text) {
  InputLists out;
  std::size_t pos = 0, lineNo = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineNo;
    if (line.rfind("input ", 0) != 0) continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      throw Error("ParseError", "summary line " + std::to_string(lineNo) + ": expected 'input <name> = <value>'");
    }
    std::string name = line.substr(6, eq - 6);
    feel::Value v = feel::evaluate(*feel::parseExpr(line.substr(eq + 3)), feel::emptyEnvironment());
    if (v.kind() == feel::Value::Kind::List) out[name] = v.asList();
    else out[name] = {v};
  }
  return out;
}

std::string describeTrace(const Trace& t) {
  std::string out;
  for (const auto& r : t.records) {
    switch (r.kind) {
      case TraceRecord::Kind::Node: out += "at " + r.a + "\n"; break;
      case TraceRecord::Kind::Edge: out += "  " + r.a + " -> " + r.b + "\n"; break;
      case TraceRecord::Kind::Table: {
        std::string vs;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
          if (i) vs += ", ";
          vs += feel::render(r.values[i]);
        }
        out += "  decision " + r.a + " returned " + vs + "\n";
        break;
      }
      case TraceRecord::Kind::Write: out += "  " + r.a + " := " + feel::render(r.values.front()) + "\n"; break;
    }
  }
  return out;
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IOError", "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("IOError", "failed writing '" + path + "'");
}

void writeArtifacts(const RunResult& r, const bpmn::ProcessGraph& g, const std::string& outDir,
                    const std::string& base) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw Error("IOError", "cannot create '" + outDir + "': " + ec.message());
  auto path = [&](const char* ext) { return (std::filesystem::path(outDir) / (base + ext)).string(); };
  writeTextFile(path(".graph"), formatGraph(g));
  writeTextFile(path(".trace"), formatTrace(r.trace, g));
  writeTextFile(path(".out"), formatSummary(r.summary));
}

}  // namespace bproc::runtime
