#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dyncon/trace.hpp"
#include "dyncon/universal_construction.hpp"

namespace dyncon {

// Process `process` takes no action at or after scheduler tick `tick`.
struct CrashPoint {
  ProcessId process = 0;
  std::int64_t tick = 0;
};

// A workload plus a schedule. Each scheduler tick lets one process take one
// action: invoke its next operation, take one base-object step, or return
// the response of a finished publish.
struct Scenario {
  std::string spec;
  Value spec_params = Value::object();
  int n_processes = 1;
  // Per-process program order is the order of appearance; ids must be
  // p<process>.<0,1,2,...>.
  std::vector<OpInstance> workload;
  // Explicit schedule: one process id per tick. Takes precedence over seed.
  std::optional<std::vector<ProcessId>> schedule;
  // After an explicit schedule runs out, continue round-robin until every
  // live process is done.
  bool round_robin_tail = true;
  std::optional<std::uint64_t> seed;
  std::vector<CrashPoint> crashes;
  // Fuzz templates only: chance that a seed injects one random crash.
  double crash_probability = 0.0;
  EngineOptions engine;
};

// Validates ids, process bounds, program order and that every operation is
// accepted by the spec. Throws MalformedInput.
void validate(const Scenario& s);

Value to_json(const Scenario& s);
Scenario scenario_from_json(const Value& v);

// Executes the scenario. A pure function of its input: the same scenario
// yields an identical trace.
Trace run(const Scenario& scenario);

// Every interleaving of the scenario's processes (schedule and seed are
// ignored), in depth-first order. Throws CapacityError after `max_runs`.
void explore_exhaustively(const Scenario& scenario, std::size_t max_runs,
                          const std::function<void(const std::vector<ProcessId>&, const Trace&)>& visit);

}  // namespace dyncon
