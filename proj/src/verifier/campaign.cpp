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

#include "bproc/verifier/campaign.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include <json.hpp>

namespace bproc::verifier {

using runtime::Outcome;

double CoverageReport::nodePercent() const {
  return totalNodes == 0 ? 100.0 : 100.0 * static_cast<double>(nodes.size()) / static_cast<double>(totalNodes);
}

double CoverageReport::edgePercent() const {
  return totalEdges == 0 ? 100.0 : 100.0 * static_cast<double>(edges.size()) / static_cast<double>(totalEdges);
}

CoverageReport emptyCoverage(const bpmn::ProcessGraph& g) {
  CoverageReport r;
  r.totalNodes = g.nodes.size();
  r.totalEdges = g.edges.size();
  return r;
}

void accumulateCoverage(CoverageReport& report, const runtime::Trace& t, const bpmn::ProcessGraph& g) {
  std::set<std::string> ids;
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& v : g.nodes) ids.insert(v.id);
  for (const auto& e : g.edges) edges.insert({g.nodes[e.src].id, g.nodes[e.dst].id});
  for (const auto& n : t.nodes()) {
    if (!ids.count(n)) throw Error("UnknownId", "trace activates node '" + n + "', which the graph lacks");
    report.nodes.insert(n);
  }
  for (const auto& e : t.edges()) {
    if (!edges.count(e)) {
      throw Error("UnknownId", "trace traverses edge " + e.first + " -> " + e.second + ", which the graph lacks");
    }
    report.edges.insert(e);
  }
}

std::uint64_t smcSampleSize(double epsilon, double delta) {
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
    throw ConfigError("epsilon and delta must lie strictly between 0 and 1");
  }
  double n = std::ceil(std::log(1.0 / delta) / std::log(1.0 / (1.0 - epsilon)));
  auto N = static_cast<std::uint64_t>(std::max(1.0, n));
  // Guard against rounding in the logarithms.
  while (N > 1 && std::pow(1.0 - epsilon, static_cast<double>(N - 1)) <= delta) --N;
  while (std::pow(1.0 - epsilon, static_cast<double>(N)) > delta) ++N;
  return N;
}

const char* combinerName(Combiner c) {
  switch (c) {
    case Combiner::And: return "and";
    case Combiner::Or: return "or";
    case Combiner::NodesOnly: return "nodes";
    case Combiner::EdgesOnly: return "edges";
  }
  return "?";
}

std::optional<Combiner> combinerFromName(const std::string& s) {
  for (auto c : {Combiner::And, Combiner::Or, Combiner::NodesOnly, Combiner::EdgesOnly}) {
    if (s == combinerName(c)) return c;
  }
  return std::nullopt;
}

bool Thresholds::met(const CoverageReport& r) const {
  bool n = r.nodePercent() >= nodes;
  bool e = r.edgePercent() >= edges;
  switch (combiner) {
    case Combiner::And: return n && e;
    case Combiner::Or: return n || e;
    case Combiner::NodesOnly: return n;
    case Combiner::EdgesOnly: return e;
  }
  return false;
}

bool Thresholds::trivial() const {
  switch (combiner) {
    case Combiner::And: return nodes <= 0 && edges <= 0;
    case Combiner::Or: return nodes <= 0 || edges <= 0;
    case Combiner::NodesOnly: return nodes <= 0;
    case Combiner::EdgesOnly: return edges <= 0;
  }
  return false;
}

runtime::InputLists drawInputs(const ir::ExecutableModel& x, const std::vector<inputs::InputSpec>& specs,
                               std::uint64_t seed, std::uint64_t k, const inputs::SamplingOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  // One value per place that consumes the variable; repeated visits reuse the last.
  std::map<std::string, std::size_t> sites;
  for (const auto& v : x.initialInputs) ++sites[v];
  for (const auto& id : x.order) {
    for (const auto& s : x.routine(id).body) {
      if (const auto* c = std::get_if<ir::step::ConsumeInput>(&s)) ++sites[c->var];
    }
  }
  runtime::InputLists out;
  for (const auto& spec : specs) {
    std::size_t len = std::max<std::size_t>(1, sites[spec.name]);
    auto& list = out[spec.name];
    for (std::size_t i = 0; i < len; ++i) list.push_back(inputs::sample(spec, rng, opts));
  }
  return out;
}

namespace {

struct Slot {
  runtime::RunResult result;
  double ms = 0;
};

bool isErrorBlock(Outcome o) { return o == Outcome::Error || o == Outcome::Fault; }

std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", p);
  return buf;
}

class Campaign {
 public:
  Campaign(const ir::ExecutableModel& x, const std::vector<inputs::InputSpec>& specs, const CampaignConfig& cfg)
      : x_(x), specs_(specs), cfg_(cfg) {
    v_.coverage = emptyCoverage(x.graph);
  }

  Verdict run() {
    validate();
    std::uint64_t limit = 0;
    if (const auto* f = std::get_if<FixedBudget>(&cfg_.mode)) limit = f->n;
    if (const auto* e = std::get_if<ErrorSeek>(&cfg_.mode)) limit = e->n;
    if (const auto* s = std::get_if<Smc>(&cfg_.mode)) limit = smcSampleSize(s->epsilon, s->delta);

    unsigned runners = std::max(1u, cfg_.parallelRunners);
    bool stop = false;
    for (std::uint64_t k = 1; k <= limit && !stop;) {
      auto batch = static_cast<std::size_t>(std::min<std::uint64_t>(runners, limit - k + 1));
      std::vector<Slot> slots(batch);
      if (batch == 1) {
        slots[0] = runOne(k);
      } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(batch);
        for (std::size_t i = 0; i < batch; ++i) {
          threads.emplace_back([&, i] {
            try {
              slots[i] = runOne(k + i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
      for (std::size_t i = 0; i < batch && !stop; ++i) stop = absorb(k + i, std::move(slots[i]));
      k += batch;
    }
    if (!stop) finishUnstopped(limit);
    summariseTiming();
    return std::move(v_);
  }

 private:
  void validate() {
    if (const auto* f = std::get_if<FixedBudget>(&cfg_.mode)) {
      if (f->n < 1) throw ConfigError("run budget must be at least 1");
      checkThresholds(f->target);
    } else if (const auto* e = std::get_if<ErrorSeek>(&cfg_.mode)) {
      if (e->n < 1) throw ConfigError("run budget must be at least 1");
    } else {
      const auto& s = std::get<Smc>(cfg_.mode);
      smcSampleSize(s.epsilon, s.delta);
      checkThresholds(s.target);
    }
    for (const auto& spec : specs_) {
      if (spec.domain.kind == inputs::Domain::Kind::Unhandled && spec.overrides.empty()) {
        throw inputs::MissingOverride(spec.name);
      }
    }
  }

  static void checkThresholds(const Thresholds& t) {
    if (t.nodes < 0 || t.nodes > 100 || t.edges < 0 || t.edges > 100) {
      throw ConfigError("coverage thresholds must lie in [0, 100]");
    }
  }

  Slot runOne(std::uint64_t k) const {
    auto in = drawInputs(x_, specs_, cfg_.seed, k, cfg_.sampling);
    Slot s;
    s.result = runtime::runOnce(x_, in, cfg_.run);
    s.ms = std::chrono::duration<double, std::milli>(s.result.summary.elapsed).count();
    return s;
  }

  std::string writeRun(std::uint64_t k, const runtime::RunResult& r) const {
    if (cfg_.outDir.empty()) return "";
    auto dir = std::filesystem::path(cfg_.outDir) / "runs";
    std::filesystem::create_directories(dir);
    auto base = dir / ("run_" + std::to_string(k));
    runtime::writeTextFile(base.string() + ".trace", runtime::formatTrace(r.trace, x_.graph));
    runtime::writeTextFile(base.string() + ".out", runtime::formatSummary(r.summary));
    return "runs/run_" + std::to_string(k) + ".trace";
  }

  void witness(std::uint64_t k, Slot& s, const std::string& path) {
    v_.pass = false;
    v_.failingRun = k;
    v_.failingTrace = path;
    v_.witness = std::move(s.result);
  }

  // Returns true when the campaign can stop.
  bool absorb(std::uint64_t k, Slot s) {
    ++v_.runs;
    times_.push_back(s.ms);
    std::string path = writeRun(k, s.result);
    accumulateCoverage(v_.coverage, s.result.trace, x_.graph);
    const auto& sum = s.result.summary;

    if (const auto* f = std::get_if<FixedBudget>(&cfg_.mode)) {
      if (!f->target.trivial() && f->target.met(v_.coverage)) {
        v_.reason = "coverage target met after " + std::to_string(k) + " runs";
        return true;
      }
      return false;
    }
    if (std::holds_alternative<ErrorSeek>(cfg_.mode)) {
      if (!isErrorBlock(sum.outcome)) return false;
      v_.reason = "run " + std::to_string(k) + " ended in " + runtime::outcomeName(sum.outcome) +
                  (sum.code.empty() ? "" : " " + sum.code) + " at '" + sum.node + "'";
      witness(k, s, path);
      return true;
    }
    const auto& smc = std::get<Smc>(cfg_.mode);
    if (smc.property == Smc::Property::NoErrorBlock) {
      if (!isErrorBlock(sum.outcome)) return false;
      v_.reason = "run " + std::to_string(k) + " reached an error: " + runtime::outcomeName(sum.outcome) +
                  (sum.code.empty() ? "" : " " + sum.code) + " at '" + sum.node + "'";
      witness(k, s, path);
      return true;
    }
    if (!smc.target.met(v_.coverage)) return false;
    v_.reason = "coverage target reached after " + std::to_string(k) + " runs: C_n=" +
                percent(v_.coverage.nodePercent()) + ", C_e=" + percent(v_.coverage.edgePercent());
    witness(k, s, path);
    return true;
  }

  void finishUnstopped(std::uint64_t limit) {
    std::string cov = "C_n=" + percent(v_.coverage.nodePercent()) + ", C_e=" + percent(v_.coverage.edgePercent());
    std::string n = std::to_string(limit);
    if (const auto* f = std::get_if<FixedBudget>(&cfg_.mode)) {
      v_.pass = f->target.met(v_.coverage);
      v_.reason = v_.pass ? "coverage target met after " + n + " runs (" + cov + ")"
                          : "coverage target not met after " + n + " runs (" + cov + ")";
    } else if (std::holds_alternative<ErrorSeek>(cfg_.mode)) {
      v_.reason = "no error reached in " + n + " runs";
    } else {
      const auto& smc = std::get<Smc>(cfg_.mode);
      std::string bound = " (statistical: epsilon=" + fmt(smc.epsilon) + ", delta=" + fmt(smc.delta) + ")";
      v_.reason = smc.property == Smc::Property::NoErrorBlock
                      ? "no error reached in " + n + " runs" + bound
                      : "coverage target not reached in " + n + " runs, " + cov + bound;
    }
  }

  static std::string fmt(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
  }

  void summariseTiming() {
    if (times_.empty()) return;
    double sum = 0;
    for (double t : times_) sum += t;
    v_.meanRunMs = sum / static_cast<double>(times_.size());
    if (times_.size() > 1) {
      double sq = 0;
      for (double t : times_) sq += (t - v_.meanRunMs) * (t - v_.meanRunMs);
      v_.stddevRunMs = std::sqrt(sq / static_cast<double>(times_.size() - 1));
    }
  }

  const ir::ExecutableModel& x_;
  const std::vector<inputs::InputSpec>& specs_;
  const CampaignConfig& cfg_;
  Verdict v_;
  std::vector<double> times_;
};

}  // namespace

Verdict runCampaign(const ir::ExecutableModel& x, const std::vector<inputs::InputSpec>& specs,
                    const CampaignConfig& cfg) {
  return Campaign(x, specs, cfg).run();
}

std::string verdictJson(const Verdict& v) {
  nlohmann::ordered_json j;
  j["result"] = v.pass ? "PASS" : "FAIL";
  j["reason"] = v.reason;
  j["c_n"] = v.coverage.nodePercent();
  j["c_e"] = v.coverage.edgePercent();
  j["runs"] = v.runs;
  j["mean_run_ms"] = v.meanRunMs;
  j["stddev_run_ms"] = v.stddevRunMs;
  if (v.failingRun) {
    j["failing_trace"] = v.failingTrace.empty() ? "run_" + std::to_string(*v.failingRun) : v.failingTrace;
  } else {
    j["failing_trace"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace bproc::verifier
