#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dyncon/linearizability.hpp"
#include "dyncon/trace.hpp"

namespace dyncon {

struct CheckBounds {
  // Operations in a history checked for linearizability.
  std::size_t max_lin_ops = kDefaultLinearizabilityBound;
  // Operations in a history whose system states are enumerated.
  std::size_t max_state_ops = kDefaultStateEnumerationBound;
  // Vertices of a graph whose topological orderings are enumerated.
  std::size_t max_topo_vertices = 8;
};

struct Violation {
  std::string check;
  std::string message;
};

Value to_json(const Violation& v);

// Per-publish outcome of the dynamic-concurrency audit.
struct AuditEntry {
  OpInstance op;
  bool used_strong_sync = false;
  bool cap_triggered = false;
  std::optional<SystemState> witness_state;
  std::optional<NonCommutingWitness> witness_subset;
};

struct AuditVerdict {
  std::vector<AuditEntry> entries;
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  std::size_t strong_sync_uses() const;
  std::size_t cap_triggered_uses() const;
};

Value to_json(const AuditVerdict& v);

// For every publish that proposed to a consensus object (and did not get
// there through the commutativity cap), finds a system state (l, O) during
// it and a subset of O it does not commute with in l. Throws CapacityError
// when a search is needed on a history above bounds.max_state_ops.
AuditVerdict audit_dynamic_concurrency(const SeqObjectSpec& spec, const Trace& trace, const CheckBounds& bounds = {});

// The history is linearizable, and every topological ordering of the final C
// (only linearize(C) above bounds.max_topo_vertices) is a linearization of it.
std::vector<Violation> check_trace_linearizability(const SeqObjectSpec& spec, const Trace& trace,
                                                   const CheckBounds& bounds = {});

// Structural invariants over every recorded view of G and the final C:
// acyclic, irreflexive and transitive C; monotone growth; containment
// vertices(C) within vertices(B) within A; equivalence of all topological
// orderings and equal-set prefixes; response stability; real-time
// precedence; commitment on return; and agreement of every scan with a
// replay of the writes before it.
std::vector<Violation> check_graph_invariants(const SeqObjectSpec& spec, const Trace& trace,
                                              const CheckBounds& bounds = {});

// Trace well-formedness, consensus agreement and validity, dedicated and
// increasing K writes, K scans against replay, single announce/book per
// operation.
std::vector<Violation> check_base_objects(const Trace& trace);

// Each publish that entered conflict resolution ran at most c + 2 loop
// iterations, c being the run's largest number of outstanding publishes.
std::vector<Violation> check_wait_freedom(const Trace& trace);

struct CheckSelection {
  bool lin = true;
  bool graph = true;
  bool dyncon = true;
};

struct CheckReport {
  std::vector<Violation> violations;
  std::optional<AuditVerdict> audit;
  std::size_t consensus_uses = 0;
  std::size_t conflict_resolution_publishes = 0;
  int max_iterations = 0;
  int concurrency = 0;

  bool passed() const { return violations.empty(); }
};

Value to_json(const CheckReport& r);

// Runs the selected checkers; `graph` also covers base objects and the
// wait-freedom bound.
CheckReport check_trace(const SeqObjectSpec& spec, const Trace& trace, const CheckSelection& selection,
                        const CheckBounds& bounds = {});

// Final state of G, rebuilt by replaying the trace's writes.
AbcView replay_final_view(const Trace& trace);

}  // namespace dyncon
