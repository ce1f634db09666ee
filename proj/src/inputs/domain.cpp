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
#include <cmath>
#include <limits>

#include "bproc/feel/errors.hpp"
#include "bproc/feel/evaluator.hpp"
#include "bproc/inputs/domain.hpp"

namespace bproc::inputs {

using feel::StaticType;
using feel::Value;

Domain Domain::enumeration(std::vector<Value> values) {
  if (values.empty()) throw Error("DomainError", "ENUM domain needs at least one value");
  std::sort(values.begin(), values.end(), feel::canonicalLess);
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Domain d;
  d.kind = Kind::Enum;
  d.values = std::move(values);
  return d;
}

Domain Domain::ball(Value center) {
  if (!center.isNumber()) throw Error("DomainError", "BALL centre must be a number");
  Domain d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  return d;
}

Domain Domain::interval(feel::Range r) {
  if (!r.lo.isNumber() || !r.hi.isNumber()) throw Error("DomainError", "RANGE ends must be numbers");
  if (r.lo.asNumber() > r.hi.asNumber()) {
    throw Error("DomainError", "RANGE lower end " + feel::render(r.lo) + " exceeds upper end " +
                                   feel::render(r.hi));
  }
  Domain d;
  d.kind = Kind::Range;
  d.range = std::move(r);
  return d;
}

Domain Domain::unhandled(std::vector<std::string> exprs) {
  std::sort(exprs.begin(), exprs.end());
  exprs.erase(std::unique(exprs.begin(), exprs.end()), exprs.end());
  Domain d;
  d.kind = Kind::Unhandled;
  d.exprs = std::move(exprs);
  return d;
}

std::string render(const Domain& d) {
  switch (d.kind) {
    case Domain::Kind::Enum: {
      std::string out = "ENUM(";
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (i) out += ",";
        out += feel::render(d.values[i]);
      }
      return out + ")";
    }
    case Domain::Kind::Ball:
      return "BALL(" + feel::render(d.center) + ")";
    case Domain::Kind::Range:
      return std::string("RANGE(") + (d.range.loClosed ? "[" : "(") + feel::render(d.range.lo) + "," +
             feel::render(d.range.hi) + (d.range.hiClosed ? "]" : ")") + ")";
    case Domain::Kind::Unhandled: {
      std::string out = "UNHANDLED(";
      for (std::size_t i = 0; i < d.exprs.size(); ++i) {
        if (i) out += ";";
        out += d.exprs[i];
      }
      return out + ")";
    }
  }
  return "?";
}

double ballRadius(const Value& center, const SamplingOptions& opts) {
  return std::max(opts.minRadius, opts.radiusScale * std::fabs(center.asNumber()));
}

namespace {

bool integral(StaticType t, const Value& a, const Value& b) {
  if (t == StaticType::IntegerT) return true;
  if (t == StaticType::DoubleT) return false;
  return a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer;
}

// Integer lattice inside the range, as [first, last].
std::pair<std::int64_t, std::int64_t> lattice(const feel::Range& r) {
  double lo = r.lo.asNumber(), hi = r.hi.asNumber();
  auto first = static_cast<std::int64_t>(std::ceil(lo));
  if (!r.loClosed && static_cast<double>(first) == lo) ++first;
  auto last = static_cast<std::int64_t>(std::floor(hi));
  if (!r.hiClosed && static_cast<double>(last) == hi) --last;
  return {first, last};
}

bool safeEquals(const Value& a, const Value& b) {
  try {
    return feel::feelEquals(a, b);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

bool contains(const Domain& d, StaticType t, const Value& v, const SamplingOptions& opts) {
  switch (d.kind) {
    case Domain::Kind::Enum:
      return std::any_of(d.values.begin(), d.values.end(), [&](const Value& x) { return safeEquals(x, v); });
    case Domain::Kind::Range:
      if (!v.isNumber()) return false;
      if (integral(t, d.range.lo, d.range.hi) && v.kind() != Value::Kind::Integer) return false;
      return feel::rangeContains(d.range, v);
    case Domain::Kind::Ball: {
      if (!v.isNumber()) return false;
      if (t == StaticType::IntegerT && v.kind() != Value::Kind::Integer) return false;
      return std::fabs(v.asNumber() - d.center.asNumber()) <= ballRadius(d.center, opts);
    }
    case Domain::Kind::Unhandled:
      return true;
  }
  return false;
}

Value sampleDomain(const Domain& d, StaticType t, std::mt19937_64& rng, const SamplingOptions& opts) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (d.kind) {
    case Domain::Kind::Enum: {
      std::uniform_int_distribution<std::size_t> pick(0, d.values.size() - 1);
      return d.values[pick(rng)];
    }
    case Domain::Kind::Range: {
      const auto& r = d.range;
      if (integral(t, r.lo, r.hi)) {
        auto [first, last] = lattice(r);
        if (first > last) throw Error("DomainError", "RANGE" + render(d) + " contains no integer");
        return Value(std::uniform_int_distribution<std::int64_t>(first, last)(rng));
      }
      double lo = r.lo.asNumber(), hi = r.hi.asNumber();
      if (lo == hi) {
        if (!r.loClosed || !r.hiClosed) throw Error("DomainError", render(d) + " is empty");
        return Value(lo);
      }
      double top = r.hiClosed ? std::nextafter(hi, std::numeric_limits<double>::infinity()) : hi;
      std::uniform_real_distribution<double> dist(lo, top);
      while (true) {
        double x = dist(rng);
        if (!r.loClosed && x == lo) continue;
        if (x > hi) continue;
        return Value(x);
      }
    }
    case Domain::Kind::Ball: {
      double w = d.center.asNumber();
      double R = ballRadius(d.center, opts);
      double u = unit(rng);
      double third = opts.boundaryBias / 3.0;
      if (t == StaticType::IntegerT || (t == StaticType::UnknownT && d.center.kind() == Value::Kind::Integer)) {
        auto lo = static_cast<std::int64_t>(std::ceil(w - R));
        auto hi = static_cast<std::int64_t>(std::floor(w + R));
        if (u < third) return Value(static_cast<std::int64_t>(std::llround(w)));
        if (u < 2 * third) return Value(std::max(lo, static_cast<std::int64_t>(std::ceil(w)) - 1));
        if (u < 3 * third) return Value(std::min(hi, static_cast<std::int64_t>(std::floor(w)) + 1));
        return Value(std::uniform_int_distribution<std::int64_t>(lo, hi)(rng));
      }
      if (u < third) return Value(w);
      if (u < 2 * third) return Value(std::nextafter(w, -std::numeric_limits<double>::infinity()));
      if (u < 3 * third) return Value(std::nextafter(w, std::numeric_limits<double>::infinity()));
      double top = std::nextafter(w + R, std::numeric_limits<double>::infinity());
      return Value(std::min(w + R, std::uniform_real_distribution<double>(w - R, top)(rng)));
    }
    case Domain::Kind::Unhandled:
      throw MissingOverride("?");
  }
  return Value();
}

Value sample(const InputSpec& spec, std::mt19937_64& rng, const SamplingOptions& opts) {
  if (!spec.overrides.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, spec.overrides.size() - 1);
    return spec.overrides[pick(rng)];
  }
  if (spec.domain.kind == Domain::Kind::Unhandled) throw MissingOverride(spec.name);
  return sampleDomain(spec.domain, spec.type, rng, opts);
}

Value typeDefault(StaticType t) {
  switch (t) {
    case StaticType::IntegerT: return Value(0);
    case StaticType::DoubleT: return Value(0.0);
    case StaticType::StringT: return Value("");
    case StaticType::BooleanT: return Value(false);
    default: return Value();
  }
}

}  // namespace bproc::inputs
