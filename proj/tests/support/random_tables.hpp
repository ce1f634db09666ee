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

// Random decision tables with enumerable domains plus a literal evaluator of
// the first-hit formula, shared by dmn_test and the acceptance binary.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace bproc::testsupport {

struct Cell {
  enum Kind { Dash, Enum, Interval } kind = Dash;
  std::vector<int> values;  // Enum; indices into the column domain
  int lo = 0, hi = 0;       // Interval over integer columns
  bool loClosed = true, hiClosed = true;
};

struct Column {
  bool text = false;  // text columns use "a".."f", integer columns 0..size-1
  int size = 1;
};

struct RandomTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<int> outputs;  // one integer output per row
};

inline std::string columnValue(const Column& c, int v) {
  return c.text ? "\"" + std::string(1, static_cast<char>('a' + v)) + "\"" : std::to_string(v);
}

inline std::string cellSource(const Column& col, const Cell& c) {
  switch (c.kind) {
    case Cell::Dash: return "-";
    case Cell::Enum: {
      std::string s;
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (i) s += ",";
        s += columnValue(col, c.values[i]);
      }
      return s;
    }
    case Cell::Interval:
      return std::string(c.loClosed ? "[" : "(") + std::to_string(c.lo) + ".." +
             std::to_string(c.hi) + (c.hiClosed ? "]" : ")");
  }
  return "-";
}

inline std::string xmlEscape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

inline std::string toDmnXml(const RandomTable& t, const std::string& hitPolicy = "FIRST") {
  std::string x = "<definitions xmlns=\"https://www.omg.org/spec/DMN/20191111/MODEL/\">"
                  "<decision id=\"R\"><decisionTable hitPolicy=\"" + hitPolicy + "\">";
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    x += "<input><inputExpression><text>x" + std::to_string(j) + "</text></inputExpression></input>";
  }
  x += "<output name=\"out\"/>";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    x += "<rule>";
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      x += "<inputEntry><text>" + xmlEscape(cellSource(t.columns[j], t.rows[i][j])) + "</text></inputEntry>";
    }
    x += "<outputEntry><text>" + std::to_string(t.outputs[i]) + "</text></outputEntry></rule>";
  }
  return x + "</decisionTable></decision></definitions>";
}

inline RandomTable randomTable(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomTable t;
  int k = pick(1, 4);
  for (int j = 0; j < k; ++j) t.columns.push_back({pick(0, 1) == 1, pick(1, 6)});
  int m = pick(1, 6);
  bool withDefault = pick(0, 3) == 0;
  for (int i = 0; i < m; ++i) {
    std::vector<Cell> row;
    for (const auto& col : t.columns) {
      Cell c;
      int r = pick(0, 3);
      if (r == 0 || (withDefault && i == m - 1)) {
        c.kind = Cell::Dash;
      } else if (col.text || r == 1) {
        c.kind = Cell::Enum;
        std::set<int> vs;
        int count = pick(1, col.size);
        while (static_cast<int>(vs.size()) < count) vs.insert(pick(0, col.size - 1));
        c.values.assign(vs.begin(), vs.end());
      } else {
        c.kind = Cell::Interval;
        c.lo = pick(-1, col.size - 1);
        c.hi = pick(c.lo, col.size);
        c.loClosed = pick(0, 1) == 1;
        c.hiClosed = pick(0, 1) == 1;
        if (c.lo == c.hi) c.loClosed = c.hiClosed = true;
      }
      row.push_back(c);
    }
    t.rows.push_back(row);
    t.outputs.push_back(pick(0, 9));
  }
  return t;
}

inline bool cellHolds(const Cell& c, int v) {
  switch (c.kind) {
    case Cell::Dash: return true;
    case Cell::Enum:
      for (int x : c.values) {
        if (x == v) return true;
      }
      return false;
    case Cell::Interval: {
      bool above = c.loClosed ? v >= c.lo : v > c.lo;
      bool below = c.hiClosed ? v <= c.hi : v < c.hi;
      return above && below;
    }
  }
  return false;
}

// Conjunction over rows of ((no earlier row holds) and row i holds) -> out = v_i.
inline bool formulaHolds(const RandomTable& t, const std::vector<int>& args, int out) {
  bool earlierHeld = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    bool rowHolds = true;
    for (std::size_t j = 0; j < args.size(); ++j) rowHolds = rowHolds && cellHolds(t.rows[i][j], args[j]);
    bool premise = !earlierHeld && rowHolds;
    if (premise && out != t.outputs[i]) return false;
    earlierHeld = earlierHeld || rowHolds;
  }
  return true;
}

// Every argument vector of the table's finite domains, odometer order.
inline std::vector<std::vector<int>> allArguments(const RandomTable& t) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(t.columns.size(), 0);
  while (true) {
    out.push_back(cur);
    std::size_t j = 0;
    while (j < cur.size() && ++cur[j] == t.columns[j].size) cur[j++] = 0;
    if (j == cur.size()) break;
  }
  return out;
}

}  // namespace bproc::testsupport
