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
#include <cctype>
#include <map>

#include "bproc/feel/errors.hpp"
#include "bproc/feel/evaluator.hpp"
#include "bproc/feel/parser.hpp"
#include "bproc/inputs/domain.hpp"

namespace bproc::inputs {

using feel::Value;

std::string writeInputsFile(const std::vector<InputSpec>& specs) {
  std::string out = "# <name> : <type> : <domain> : <sample>\n";
  for (const auto& s : specs) {
    out += s.name + " : " + feel::typeName(s.type) + " : " + render(s.domain) + " : " +
           feel::render(s.sample) + "\n";
    if (!s.overrides.empty()) {
      out += "override " + s.name + " =";
      for (std::size_t i = 0; i < s.overrides.size(); ++i) {
        out += i ? ", " : " ";
        out += feel::render(s.overrides[i]);
      }
      out += "\n";
    }
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits at `sep` outside strings and brackets.
std::vector<std::string_view> splitTop(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  bool inString = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (inString) {
      if (c == '\\') ++i;
      else if (c == '"') inString = false;
      continue;
    }
    if (c == '"') inString = true;
    else if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (c == sep && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

Value constant(std::string_view text, std::size_t line, const std::string& what) {
  try {
    auto e = feel::parseExpr(text);
    if (!feel::isConstant(*e)) throw ParseError(line, what + " '" + std::string(text) + "' is not a constant");
    return feel::evaluate(*e, feel::emptyEnvironment());
  } catch (const feel::SyntaxError& err) {
    throw ParseError(line, what + ": " + err.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    throw ParseError(line, what + ": " + err.what());
  }
}

std::string_view inside(std::string_view text, std::string_view tag, std::size_t line) {
  if (text.size() < tag.size() + 2 || text.substr(0, tag.size()) != tag || text[tag.size()] != '(' ||
      text.back() != ')') {
    throw ParseError(line, "malformed domain '" + std::string(text) + "'");
  }
  return trim(text.substr(tag.size() + 1, text.size() - tag.size() - 2));
}

Domain parseDomain(std::string_view text, std::size_t line) {
  try {
    if (text.substr(0, 4) == "ENUM") {
      Value list = constant("[" + std::string(inside(text, "ENUM", line)) + "]", line, "ENUM values");
      return Domain::enumeration(list.asList());
    }
    if (text.substr(0, 4) == "BALL") {
      return Domain::ball(constant(inside(text, "BALL", line), line, "BALL centre"));
    }
    if (text.substr(0, 5) == "RANGE") {
      auto body = inside(text, "RANGE", line);
      if (body.size() < 2 || (body.front() != '[' && body.front() != '(') ||
          (body.back() != ']' && body.back() != ')')) {
        throw ParseError(line, "RANGE needs bracketed ends, e.g. RANGE((11,50])");
      }
      auto ends = splitTop(body.substr(1, body.size() - 2), ',');
      if (ends.size() != 2) throw ParseError(line, "RANGE needs two ends");
      feel::Range r{constant(ends[0], line, "RANGE lower end"), constant(ends[1], line, "RANGE upper end"),
                    body.front() == '[', body.back() == ']'};
      return Domain::interval(r);
    }
    if (text.substr(0, 9) == "UNHANDLED") {
      auto body = inside(text, "UNHANDLED", line);
      std::vector<std::string> exprs;
      if (!body.empty()) {
        for (auto p : splitTop(body, ';')) exprs.emplace_back(p);
      }
      return Domain::unhandled(exprs);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  throw ParseError(line, "unknown domain '" + std::string(text) + "'");
}

}  // namespace

std::vector<InputSpec> parseInputsFile(std::string_view text, const SamplingOptions& opts) {
  std::vector<InputSpec> specs;
  std::map<std::string, std::pair<std::vector<Value>, std::size_t>> overrides;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineNo;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.substr(0, 9) == "override ") {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineNo, "override line needs '='");
      std::string name(trim(line.substr(9, eq - 9)));
      auto values = trim(line.substr(eq + 1));
      if (name.empty() || values.empty()) throw ParseError(lineNo, "override needs a name and values");
      Value list = constant("[" + std::string(values) + "]", lineNo, "override values");
      if (!overrides.emplace(name, std::pair{list.asList(), lineNo}).second) {
        throw ParseError(lineNo, "second override for '" + name + "'");
      }
      continue;
    }

    auto fields = splitTop(line, ':');
    if (fields.size() != 4) {
      throw ParseError(lineNo, "expected `<name> : <type> : <domain> : <sample>`");
    }
    InputSpec s;
    s.name = std::string(fields[0]);
    if (s.name.empty()) throw ParseError(lineNo, "empty variable name");
    auto type = feel::typeFromName(fields[1]);
    if (!type) throw ParseError(lineNo, "unknown type '" + std::string(fields[1]) + "'");
    s.type = *type;
    s.domain = parseDomain(fields[2], lineNo);
    s.sample = constant(fields[3], lineNo, "sample");
    for (const auto& other : specs) {
      if (other.name == s.name) throw ParseError(lineNo, "variable '" + s.name + "' listed twice");
    }
    if (!contains(s.domain, s.type, s.sample, opts)) {
      throw DomainMismatch("line " + std::to_string(lineNo) + ": sample " + feel::render(s.sample) +
                           " of '" + s.name + "' is outside " + render(s.domain));
    }
    specs.push_back(std::move(s));
  }
  for (auto& [name, entry] : overrides) {
    auto it = std::find_if(specs.begin(), specs.end(), [&](const InputSpec& s) { return s.name == name; });
    if (it == specs.end()) throw ParseError(entry.second, "override for unknown variable '" + name + "'");
    it->overrides = entry.first;
  }
  return specs;
}

}  // namespace bproc::inputs
