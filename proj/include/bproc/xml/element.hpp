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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bproc::xml {

// Namespace-stripped view of an XML element: element and attribute names are
// local names ("bpmn:task" -> "task", "zeebe:decisionId" -> "decisionId").
struct Element {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string text;  // concatenated character data, trimmed
  std::vector<Element> children;

  const Element* child(std::string_view local) const;
  std::vector<const Element*> all(std::string_view local) const;
  // Depth-first search below this element.
  std::vector<const Element*> descendants(std::string_view local) const;
  std::string attr(std::string_view local, std::string fallback = {}) const;
  bool has(std::string_view local) const { return attrs.count(std::string(local)) > 0; }
};

// Throws SchemaError on malformed input.
Element parse(std::string_view document);

std::string readFile(const std::string& path);

}  // namespace bproc::xml
