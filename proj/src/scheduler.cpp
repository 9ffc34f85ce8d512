#include "dyncon/scheduler.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "dyncon/errors.hpp"
#include "dyncon/objects.hpp"

namespace dyncon {

namespace {

// Upper bound on ticks for one run; publish is wait-free, so hitting it
// means an engine bug.
constexpr std::int64_t kMaxTicks = 1'000'000;

struct ProcessRuntime {
  std::vector<OpInstance> program;
  std::size_t next = 0;
  std::optional<PublishMachine> active;
  bool crashed = false;

  bool enabled() const { return !crashed && (active.has_value() || next < program.size()); }
};

class TraceRecorder final : public StepObserver {
 public:
  TraceRecorder(Trace& trace, std::int64_t tick) : trace_(trace), tick_(tick) {}

  std::int64_t on_step(BaseStepRecord record) override {
    ++recorded_;
    const auto step = static_cast<std::int64_t>(trace_.events.size());
    const auto process = record.process;
    trace_.events.push_back({step, tick_, process, std::move(record)});
    return step;
  }

  int recorded() const { return recorded_; }

 private:
  Trace& trace_;
  std::int64_t tick_;
  int recorded_ = 0;
};

// Complete simulation state; copyable so exhaustive exploration can branch.
class World {
 public:
  explicit World(const Scenario& s)
      : spec_(make_spec(s.spec, s.spec_params)),
        options_(s.engine),
        shared_(static_cast<std::size_t>(s.n_processes)),
        processes_(static_cast<std::size_t>(s.n_processes)),
        crashes_(s.crashes) {
    for (const auto& op : s.workload) processes_[static_cast<std::size_t>(op.id.process)].program.push_back(op);
    trace_.header.spec = s.spec;
    trace_.header.spec_params = s.spec_params;
    trace_.header.n_processes = s.n_processes;
    trace_.header.commutativity_cap = s.engine.commutativity_cap;
    trace_.header.mutation = s.engine.mutation;
  }

  Trace& trace() { return trace_; }
  std::int64_t tick() const { return tick_; }

  std::vector<ProcessId> enabled() const {
    std::vector<ProcessId> out;
    for (std::size_t p = 0; p < processes_.size(); ++p)
      if (processes_[p].enabled()) out.push_back(static_cast<ProcessId>(p));
    return out;
  }

  bool is_enabled(ProcessId p) const {
    return p >= 0 && static_cast<std::size_t>(p) < processes_.size() && processes_[static_cast<std::size_t>(p)].enabled();
  }

  // Crashes whose tick has come.
  void apply_crashes() {
    for (const auto& c : crashes_) {
      auto& proc = processes_.at(static_cast<std::size_t>(c.process));
      if (c.tick <= tick_ && !proc.crashed) {
        proc.crashed = true;
        push_event(c.process, CrashRecord{});
      }
    }
  }

  void skip(ProcessId p) {
    std::string reason = "unknown process";
    if (p >= 0 && static_cast<std::size_t>(p) < processes_.size())
      reason = processes_[static_cast<std::size_t>(p)].crashed ? "crashed" : "finished";
    trace_.header.skipped.push_back({tick_, p, reason});
    ++tick_;
  }

  void act(ProcessId p) {
    if (tick_ >= kMaxTicks) throw InvariantViolation("run exceeded " + std::to_string(kMaxTicks) + " ticks");
    auto& proc = processes_.at(static_cast<std::size_t>(p));
    if (!proc.active) {
      auto op = proc.program[proc.next++];
      push_event(p, Invocation{op});
      proc.active.emplace(p, std::move(op));
    } else if (proc.active->finished()) {
      const auto cert = proc.active->certificate();
      push_event(p, cert);
      push_event(p, ResponseRecord{cert.op.id, cert.response});
      proc.active.reset();
    } else {
      TraceRecorder recorder(trace_, tick_);
      proc.active->step(spec_, shared_, options_, &recorder);
      if (recorder.recorded() != 1)
        throw InvariantViolation("publish step of p" + std::to_string(p) + " performed " +
                                 std::to_string(recorder.recorded()) + " shared accesses");
    }
    ++tick_;
  }

 private:
  template <typename Body>
  void push_event(ProcessId p, Body body) {
    trace_.events.push_back({static_cast<std::int64_t>(trace_.events.size()), tick_, p, std::move(body)});
  }

  SeqObjectSpec spec_;
  EngineOptions options_;
  SharedObjects shared_;
  std::vector<ProcessRuntime> processes_;
  std::vector<CrashPoint> crashes_;
  Trace trace_;
  std::int64_t tick_ = 0;
};

void run_round_robin(World& world) {
  ProcessId last = -1;
  for (;;) {
    world.apply_crashes();
    auto ready = world.enabled();
    if (ready.empty()) return;
    auto it = std::upper_bound(ready.begin(), ready.end(), last);
    last = it == ready.end() ? ready.front() : *it;
    world.act(last);
  }
}

void explore(World world, std::vector<ProcessId>& schedule, std::size_t max_runs, std::size_t& runs,
             const std::function<void(const std::vector<ProcessId>&, const Trace&)>& visit) {
  world.apply_crashes();
  auto ready = world.enabled();
  if (ready.empty()) {
    if (++runs > max_runs)
      throw CapacityError("exhaustive exploration exceeds " + std::to_string(max_runs) + " interleavings");
    visit(schedule, world.trace());
    return;
  }
  for (auto p : ready) {
    World next = world;
    next.act(p);
    schedule.push_back(p);
    explore(std::move(next), schedule, max_runs, runs, visit);
    schedule.pop_back();
  }
}

}  // namespace

void validate(const Scenario& s) {
  if (s.n_processes < 1) throw MalformedInput("n_processes must be positive");
  auto spec = make_spec(s.spec, s.spec_params);
  std::vector<int> next_seq(static_cast<std::size_t>(s.n_processes), 0);
  for (const auto& op : s.workload) {
    if (op.id.process < 0 || op.id.process >= s.n_processes)
      throw MalformedInput("operation " + op.id.str() + " names a process outside 0.." + std::to_string(s.n_processes - 1));
    auto& expect = next_seq[static_cast<std::size_t>(op.id.process)];
    if (op.id.seq != expect)
      throw MalformedInput("operation " + op.id.str() + " out of program order (expected seq " + std::to_string(expect) + ")");
    ++expect;
    spec.apply(spec.initial_state, op);  // rejects unknown methods and bad arguments
  }
  for (const auto& c : s.crashes)
    if (c.process < 0 || c.process >= s.n_processes || c.tick < 0)
      throw MalformedInput("crash point names an unknown process or a negative tick");
  if (s.crash_probability < 0.0 || s.crash_probability > 1.0)
    throw MalformedInput("crash_probability must lie in [0, 1]");
  if (s.engine.commutativity_cap < 1) throw MalformedInput("cap must be positive");
}

Value to_json(const Scenario& s) {
  Value workload = Value::array();
  for (const auto& op : s.workload)
    workload.push_back(Value{{"process", op.id.process}, {"method", op.method}, {"args", op.args}});
  Value crashes = Value::array();
  for (const auto& c : s.crashes) crashes.push_back(Value{{"process", c.process}, {"tick", c.tick}});
  Value out{{"format_version", kTraceFormatVersion},
            {"spec", s.spec},
            {"spec_params", s.spec_params},
            {"n_processes", s.n_processes},
            {"workload", std::move(workload)},
            {"crashes", std::move(crashes)},
            {"cap", s.engine.commutativity_cap}};
  if (s.schedule) {
    out["schedule"] = *s.schedule;
    out["round_robin_tail"] = s.round_robin_tail;
  }
  if (s.seed) out["seed"] = *s.seed;
  if (s.crash_probability > 0) out["crash_probability"] = s.crash_probability;
  if (s.engine.mutation != Mutation::kNone) out["mutation"] = std::string(to_string(s.engine.mutation));
  return out;
}

Scenario scenario_from_json(const Value& v) {
  try {
    if (!v.is_object()) throw MalformedInput("scenario must be a JSON object");
    check_format_version(v.value("format_version", kTraceFormatVersion));
    Scenario s;
    s.spec = v.at("spec").get<std::string>();
    s.spec_params = v.value("spec_params", Value::object());
    s.n_processes = v.at("n_processes").get<int>();
    std::map<ProcessId, int> seq;
    for (const auto& w : v.at("workload")) {
      OpInstance op;
      op.id.process = w.at("process").get<int>();
      op.id.seq = seq[op.id.process]++;
      op.method = w.at("method").get<std::string>();
      op.args = w.value("args", Value::array());
      s.workload.push_back(std::move(op));
    }
    if (v.contains("schedule")) s.schedule = v.at("schedule").get<std::vector<ProcessId>>();
    s.round_robin_tail = v.value("round_robin_tail", true);
    if (v.contains("seed")) s.seed = v.at("seed").get<std::uint64_t>();
    for (const auto& c : v.value("crashes", Value::array()))
      s.crashes.push_back({c.at("process").get<int>(), c.at("tick").get<std::int64_t>()});
    s.crash_probability = v.value("crash_probability", 0.0);
    s.engine.commutativity_cap = v.value("cap", kDefaultCommutativityCap);
    s.engine.mutation = mutation_from_string(v.value("mutation", std::string("none")));
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedInput(std::string("malformed scenario: ") + ex.what());
  }
}

Trace run(const Scenario& scenario) {
  validate(scenario);
  World world(scenario);
  if (scenario.schedule) {
    world.trace().header.schedule = Value{{"mode", "explicit"}, {"round_robin_tail", scenario.round_robin_tail}};
    for (auto p : *scenario.schedule) {
      world.apply_crashes();
      if (world.is_enabled(p))
        world.act(p);
      else
        world.skip(p);
    }
    if (scenario.round_robin_tail) run_round_robin(world);
  } else {
    const auto seed = scenario.seed.value_or(0);
    world.trace().header.schedule = Value{{"mode", "seed"}, {"seed", seed}};
    std::mt19937_64 rng(seed);
    for (;;) {
      world.apply_crashes();
      auto ready = world.enabled();
      if (ready.empty()) break;
      world.act(ready[rng() % ready.size()]);
    }
  }
  return std::move(world.trace());
}

void explore_exhaustively(const Scenario& scenario, std::size_t max_runs,
                          const std::function<void(const std::vector<ProcessId>&, const Trace&)>& visit) {
  validate(scenario);
  World world(scenario);
  world.trace().header.schedule = Value{{"mode", "exhaustive"}};
  std::vector<ProcessId> schedule;
  std::size_t runs = 0;
  explore(std::move(world), schedule, max_runs, runs, visit);
}

}  // namespace dyncon
