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

#include "bproc/runtime/engine.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>

#include "bproc/feel/errors.hpp"
#include "bproc/feel/evaluator.hpp"

namespace bproc::runtime {

using feel::Value;
using Clock = std::chrono::steady_clock;

std::vector<std::string> Trace::nodes() const {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (r.kind == TraceRecord::Kind::Node) out.push_back(r.a);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Trace::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : records) {
    if (r.kind == TraceRecord::Kind::Edge) out.emplace_back(r.a, r.b);
  }
  return out;
}

std::vector<std::pair<std::string, Value>> Trace::writes() const {
  std::vector<std::pair<std::string, Value>> out;
  for (const auto& r : records) {
    if (r.kind == TraceRecord::Kind::Write) out.emplace_back(r.a, r.values.front());
  }
  return out;
}

const char* outcomeName(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Error: return "error";
    case Outcome::Timeout: return "timeout";
    case Outcome::Fault: return "fault";
  }
  return "?";
}

namespace {

using Store = std::map<std::string, Value, std::less<>>;

class StoreEnvironment : public feel::Environment {
 public:
  explicit StoreEnvironment(const Store& s) : s_(s) {}
  const Value* lookup(std::string_view name) const override {
    auto it = s_.find(name);
    return it == s_.end() ? nullptr : &it->second;
  }

 private:
  const Store& s_;
};

struct Message {
  std::string msgType;
  Store parts;
};

struct Token {
  std::string at;
  std::string from;  // empty for the start event
  int forkInstance = -1;
  int branch = -1;
};

// Raised inside a step to end the run as an engine fault.
struct Fault {
  std::string code;
  std::string message;
};

class Run {
 public:
  Run(const ir::ExecutableModel& x, const InputLists& inputs, const RunOptions& opts)
      : x_(x), inputs_(inputs), opts_(opts), deadline_(Clock::now() + opts.timeout) {}

  RunResult execute() {
    auto started = Clock::now();
    for (const auto& in : x_.inputVars) {
      auto it = inputs_.find(in.name);
      if (it == inputs_.end() || it->second.empty()) {
        throw MissingInput("no values supplied for input variable '" + in.name + "'");
      }
      result_.summary.inputsUsed[in.name] = it->second;
      store_[in.name] = Value();
    }
    for (const auto& [name, type] : x_.processVars) store_[name] = Value();
    for (const auto& v : x_.initialInputs) consume(v, Token{});

    Token first{x_.entry, "", -1, -1};
    if (opts_.mode == Mode::Sequential) {
      sequential(first);
    } else {
      parallel(first);
    }
    if (!finished_) {
      if (successEnds_ > 0) {
        finish(Outcome::Success, "", "", lastEnd_);
      } else {
        finish(Outcome::Fault, "Stalled", "no end event was reached; a join never completed", "");
      }
    }
    result_.summary.elapsed = Clock::now() - started;
    return std::move(result_);
  }

 private:
  // ---- scheduling -------------------------------------------------------

  void sequential(Token first) {
    worklist_.push_back(std::move(first));
    while (!worklist_.empty() && !finished_) {
      Token t = std::move(worklist_.front());
      worklist_.pop_front();
      drive(std::move(t));
    }
  }

  void parallel(Token first) {
    spawn(std::move(first));
    std::unique_lock lock(mu_);
    doneCv_.wait(lock, [&] { return active_ == 0; });
    auto threads = std::move(threads_);
    lock.unlock();
    for (auto& th : threads) th.join();
  }

  void spawn(Token t) {
    std::lock_guard lock(mu_);
    ++active_;
    threads_.emplace_back([this, t = std::move(t)]() mutable {
      drive(std::move(t));
      std::lock_guard inner(mu_);
      if (--active_ == 0) doneCv_.notify_all();
    });
  }

  // Runs one token until it terminates, blocks at a barrier or forks.
  void drive(Token t) {
    while (true) {
      if (isFinished()) return;
      if (++steps_ > opts_.stepBudget) {
        finish(Outcome::Timeout, "StepBudget",
               "step budget of " + std::to_string(opts_.stepBudget) + " exhausted", t.at);
        return;
      }
      if (Clock::now() > deadline_) {
        finish(Outcome::Timeout, "Timeout",
               "timeout after " + std::to_string(opts_.timeout.count()) + " ms", t.at);
        return;
      }
      const ir::Routine& r = x_.routine(t.at);
      bool isBarrier = std::holds_alternative<ir::step::JoinBarrier>(r.terminal());
      if (!t.from.empty()) record({TraceRecord::Kind::Edge, t.from, t.at, {}});
      if (!isBarrier) record({TraceRecord::Kind::Node, t.at, "", {}});
      std::optional<std::string> next;
      try {
        for (std::size_t i = 0; i + 1 < r.body.size(); ++i) {
          if (!body(r.body[i], t)) return;
        }
        next = terminal(r, t);
      } catch (const Fault& f) {
        finish(Outcome::Fault, f.code, f.message, t.at);
        return;
      } catch (const Error& e) {
        finish(Outcome::Fault, e.kind(), e.what(), t.at);
        return;
      }
      if (!next) return;
      t.from = t.at;
      t.at = *next;
    }
  }

  // ---- steps ------------------------------------------------------------

  Value eval(const feel::Expr& e) {
    if (opts_.mode == Mode::Sequential) return feel::evaluate(e, StoreEnvironment(store_));
    Store snapshot;
    {
      std::lock_guard lock(mu_);
      snapshot = store_;
    }
    return feel::evaluate(e, StoreEnvironment(snapshot));
  }

  // Returns false when the token must stop (run finished while blocked).
  bool body(const ir::Step& s, const Token& t) {
    if (const auto* c = std::get_if<ir::step::ConsumeInput>(&s)) {
      consume(c->var, t);
    } else if (const auto* a = std::get_if<ir::step::Assign>(&s)) {
      write(a->var, eval(*a->expr), t);
    } else if (const auto* inv = std::get_if<ir::step::InvokeTable>(&s)) {
      std::vector<Value> args;
      for (const auto& e : inv->args) args.push_back(eval(*e));
      const auto& table = x_.tables.at(inv->tableId);
      auto res = dmn::evaluateTable(table, args);
      record({TraceRecord::Kind::Table, inv->tableId, "", res.outputs});
      Store outs;
      for (std::size_t j = 0; j < table.outputs.size(); ++j) outs[table.outputs[j]] = res.outputs[j];
      for (const auto& m : inv->outputs) write(m.name, feel::evaluate(*m.expr, StoreEnvironment(outs)), t);
    } else if (const auto* snd = std::get_if<ir::step::Send>(&s)) {
      Message msg{snd->msgType, {}};
      for (const auto& p : snd->parts) msg.parts[p.name] = eval(*p.expr);
      std::lock_guard lock(mu_);
      channels_[snd->channel].push_back(std::move(msg));
      channelCv_.notify_all();
    } else if (const auto* rcv = std::get_if<ir::step::Receive>(&s)) {
      auto msg = receive(*rcv, t);
      if (!msg) return false;
      for (const auto& m : rcv->targets) write(m.name, feel::evaluate(*m.expr, StoreEnvironment(msg->parts)), t);
    }
    return true;
  }

  std::optional<Message> receive(const ir::step::Receive& r, const Token& t) {
    std::unique_lock lock(mu_);
    auto& q = channels_[r.channel];
    if (opts_.mode == Mode::Sequential) {
      if (q.empty()) {
        throw Fault{"SequentialDeadlock", "receive task '" + t.at + "' blocks on channel '" + r.channel +
                                              "' and no message is queued"};
      }
    } else {
      while (q.empty() && !finished_) {
        if (channelCv_.wait_until(lock, deadline_) == std::cv_status::timeout && q.empty()) {
          lock.unlock();
          finish(Outcome::Timeout, "Timeout",
                 "timeout after " + std::to_string(opts_.timeout.count()) + " ms waiting on channel '" +
                     r.channel + "'",
                 t.at);
          return std::nullopt;
        }
      }
      if (finished_) return std::nullopt;
    }
    if (q.front().msgType != r.msgType) {
      throw Fault{"TypeMismatch", "receive task '" + t.at + "' expects message '" + r.msgType +
                                      "' but channel '" + r.channel + "' holds '" + q.front().msgType + "'"};
    }
    Message m = std::move(q.front());
    q.pop_front();
    return m;
  }

  static bool truthy(const Value& v, const std::string& where) {
    if (v.isNull()) return false;
    if (v.kind() != Value::Kind::Boolean) {
      throw feel::TypeError("condition at '" + where + "' evaluated to a " + feel::kindName(v.kind()));
    }
    return v.asBool();
  }

  std::optional<std::string> terminal(const ir::Routine& r, const Token& t) {
    const ir::Step& s = r.terminal();
    if (const auto* c = std::get_if<ir::step::Continue>(&s)) return c->target;
    if (const auto* b = std::get_if<ir::step::Branch>(&s)) {
      for (const auto& c : b->cases) {
        if (!c.condition || truthy(eval(*c.condition), r.id)) return c.target;
      }
      if (b->defaultTarget) return *b->defaultTarget;
      finish(Outcome::Error, "UNHANDLED_CONDITION", "unhandled condition at gateway '" + r.id + "'", r.id);
      return std::nullopt;
    }
    if (const auto* e = std::get_if<ir::step::Terminate>(&s)) {
      if (e->success) {
        std::lock_guard lock(mu_);
        ++successEnds_;
        lastEnd_ = r.id;
      } else {
        finish(Outcome::Error, e->code, e->description, r.id);
      }
      return std::nullopt;
    }
    if (const auto* f = std::get_if<ir::step::Fork>(&s)) {
      fork(*f, r, t);
      return std::nullopt;
    }
    const auto& j = std::get<ir::step::JoinBarrier>(s);
    {
      std::lock_guard lock(mu_);
      auto it = barriers_.find(r.id);
      if (it == barriers_.end()) it = barriers_.emplace(r.id, Barrier{j.expectedArrivals, 0}).first;
      if (++it->second.arrived < it->second.expected) return std::nullopt;
      barriers_.erase(it);
    }
    record({TraceRecord::Kind::Node, r.id, "", {}});
    return j.next;
  }

  void fork(const ir::step::Fork& f, const ir::Routine& r, const Token& t) {
    std::vector<std::string> targets;
    for (const auto& c : f.branches) {
      if (!c.condition || truthy(eval(*c.condition), r.id)) targets.push_back(c.target);
    }
    if (targets.empty() && f.defaultTarget) targets.push_back(*f.defaultTarget);
    if (targets.empty()) {
      finish(Outcome::Error, "UNHANDLED_CONDITION", "unhandled condition at gateway '" + r.id + "'", r.id);
      return;
    }
    int instance;
    {
      std::lock_guard lock(mu_);
      instance = forks_++;
      if (!f.joinId.empty()) barriers_[f.joinId] = Barrier{targets.size(), 0};
    }
    (void)t;
    if (opts_.mode == Mode::Sequential) {
      for (std::size_t i = targets.size(); i-- > 0;) {
        worklist_.push_front(Token{targets[i], r.id, instance, static_cast<int>(i)});
      }
    } else {
      for (std::size_t i = 0; i < targets.size(); ++i) {
        spawn(Token{targets[i], r.id, instance, static_cast<int>(i)});
      }
    }
  }

  // ---- state ------------------------------------------------------------

  void consume(const std::string& var, const Token& t) {
    Value v;
    {
      std::lock_guard lock(mu_);
      const auto& list = inputs_.at(var);
      std::size_t& j = cursors_[var];
      v = list[std::min(j, list.size() - 1)];
      if (j < list.size()) ++j;
    }
    write(var, v, t);
  }

  void write(const std::string& var, const Value& v, const Token& t) {
    std::lock_guard lock(mu_);
    store_[var] = v;
    result_.trace.records.push_back({TraceRecord::Kind::Write, var, "", {v}});
    if (t.forkInstance >= 0) {
      auto [it, fresh] = writers_.try_emplace(var, t.forkInstance, t.branch);
      if (!fresh && it->second.first == t.forkInstance && it->second.second != t.branch) {
        std::string d = "parallel branches of one fork both write '" + var + "'";
        auto& ds = result_.summary.diagnostics;
        if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
      }
      it->second = {t.forkInstance, t.branch};
    }
  }

  void record(TraceRecord r) {
    std::lock_guard lock(mu_);
    result_.trace.records.push_back(std::move(r));
  }

  bool isFinished() {
    std::lock_guard lock(mu_);
    return finished_;
  }

  void finish(Outcome o, std::string code, std::string message, std::string node) {
    std::lock_guard lock(mu_);
    if (finished_) return;
    finished_ = true;
    auto& s = result_.summary;
    s.outcome = o;
    s.code = std::move(code);
    s.message = std::move(message);
    s.node = std::move(node);
    channelCv_.notify_all();
  }

  struct Barrier {
    std::size_t expected;
    std::size_t arrived;
  };

  const ir::ExecutableModel& x_;
  const InputLists& inputs_;
  RunOptions opts_;
  Clock::time_point deadline_;

  std::mutex mu_;
  Store store_;
  std::map<std::string, std::size_t> cursors_;
  std::map<std::string, std::deque<Message>> channels_;
  std::condition_variable channelCv_;
  std::map<std::string, Barrier> barriers_;
  std::map<std::string, std::pair<int, int>> writers_;
  int forks_ = 0;
  std::size_t successEnds_ = 0;
  std::string lastEnd_;
  bool finished_ = false;
  RunResult result_;
  std::atomic<std::uint64_t> steps_{0};

  std::deque<Token> worklist_;
  std::vector<std::thread> threads_;
  std::condition_variable doneCv_;
  std::size_t active_ = 0;
};

}  // namespace

RunResult runOnce(const ir::ExecutableModel& x, const InputLists& inputs, const RunOptions& opts) {
  return Run(x, inputs, opts).execute();
}

}  // namespace bproc::runtime
