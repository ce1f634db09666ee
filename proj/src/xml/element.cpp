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

#include "bproc/xml/element.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <sstream>

#include "bproc/error.hpp"

namespace bproc::xml {

namespace pt = boost::property_tree;

namespace {

std::string localName(const std::string& qname) {
  auto colon = qname.rfind(':');
  return colon == std::string::npos ? qname : qname.substr(colon + 1);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Element convert(const std::string& qname, const pt::ptree& tree) {
  Element el;
  el.name = localName(qname);
  el.text = trim(tree.data());
  for (const auto& [key, sub] : tree) {
    if (key == "<xmlattr>") {
      for (const auto& [an, av] : sub) {
        if (an.rfind("xmlns", 0) == 0) continue;
        el.attrs[localName(an)] = av.data();
      }
    } else if (key == "<xmlcomment>") {
      continue;
    } else if (key == "<xmltext>") {
      el.text += trim(sub.data());
    } else {
      el.children.push_back(convert(key, sub));
    }
  }
  return el;
}

void collect(const Element& e, std::string_view local, std::vector<const Element*>& out) {
  for (const auto& c : e.children) {
    if (c.name == local) out.push_back(&c);
    collect(c, local, out);
  }
}

}  // namespace

const Element* Element::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c.name == local) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::all(std::string_view local) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == local) out.push_back(&c);
  }
  return out;
}

std::vector<const Element*> Element::descendants(std::string_view local) const {
  std::vector<const Element*> out;
  collect(*this, local, out);
  return out;
}

std::string Element::attr(std::string_view local, std::string fallback) const {
  auto it = attrs.find(std::string(local));
  return it == attrs.end() ? fallback : it->second;
}

Element parse(std::string_view document) {
  pt::ptree tree;
  std::istringstream in{std::string(document)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw SchemaError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [key, sub] : tree) {
    if (key != "<xmlcomment>") return convert(key, sub);
  }
  throw SchemaError("document has no root element");
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IOError", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bproc::xml
