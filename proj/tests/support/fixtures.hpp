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

#include <string>
#include <vector>

#include "bproc/bpmn/model.hpp"
#include "bproc/compiler/ir.hpp"
#include "bproc/dmn/table.hpp"
#include "bproc/xml/element.hpp"

namespace bproc::testsupport {

inline std::string fixturePath(const std::string& name) { return std::string(BPROC_FIXTURES) + "/" + name; }

inline bpmn::ProcessModel loadProcess(const std::string& name) {
  return bpmn::parseBpmn(xml::readFile(fixturePath(name)));
}

inline std::vector<dmn::DecisionTable> loadTables(const std::vector<std::string>& names) {
  std::vector<dmn::DecisionTable> out;
  for (const auto& n : names) {
    auto ts = dmn::parseDmn(xml::readFile(fixturePath(n)));
    out.insert(out.end(), ts.begin(), ts.end());
  }
  return out;
}

inline ir::ExecutableModel compileFixture(const std::string& bpmnName, const std::vector<std::string>& dmnNames = {},
                                          const ir::CompileOptions& opts = {}) {
  return ir::compile(loadProcess(bpmnName), loadTables(dmnNames), opts);
}

}  // namespace bproc::testsupport
