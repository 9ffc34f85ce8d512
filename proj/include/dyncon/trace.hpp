#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dyncon/abc_graph.hpp"
#include "dyncon/history.hpp"
#include "dyncon/universal_construction.hpp"

namespace dyncon {

inline constexpr int kTraceFormatVersion = 1;

// Throws MalformedInput unless `version` is supported and matches
// DYNCON_FORMAT_VERSION when that variable is set.
void check_format_version(int version);

struct Invocation {
  OpInstance op;
};

struct ResponseRecord {
  OpId op;
  Response response;
};

struct CrashRecord {};

enum class EventKind { kInv, kRes, kBaseStep, kCrash, kCommit };

std::string_view to_string(EventKind k);

struct TraceEvent {
  std::int64_t step = 0;
  // Scheduler slot during which the event happened.
  std::int64_t tick = 0;
  ProcessId process = 0;
  std::variant<Invocation, ResponseRecord, BaseStepRecord, CrashRecord, CommitCertificate> body;

  EventKind kind() const { return static_cast<EventKind>(body.index()); }
};

// A schedule slot naming a process that could not act.
struct SkippedSlot {
  std::int64_t tick = 0;
  ProcessId process = 0;
  std::string reason;
};

struct TraceHeader {
  int format_version = kTraceFormatVersion;
  std::string spec;
  Value spec_params = Value::object();
  int n_processes = 0;
  // {"mode": "explicit"|"seed"|"exhaustive", "seed": ...}
  Value schedule = Value::object();
  std::size_t commutativity_cap = kDefaultCommutativityCap;
  Mutation mutation = Mutation::kNone;
  std::vector<SkippedSlot> skipped;
};

// Globally ordered event log of one run. Steps are strictly increasing.
struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;

  // Invocations and responses in trace order.
  History history() const;
  // Every invoked operation by id.
  std::map<OpId, OpInstance> catalog() const;
};

History history_of(const Trace& trace);

// Line-delimited JSON: one header line followed by one line per event.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);
Trace read_trace(std::istream& in);
Trace trace_from_string(const std::string& text);

Value to_json(const TraceEvent& e);

// Decoding of G payloads recorded in a trace.
using OpCatalog = std::map<OpId, OpInstance>;
AbcView view_from_json(const Value& v, const OpCatalog& catalog);
OpInstance resolve(const OpCatalog& catalog, const std::string& id);

}  // namespace dyncon
