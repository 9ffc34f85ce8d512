#include "dyncon/checkers.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "dyncon/errors.hpp"

namespace dyncon {

namespace {

bool subset_of(const OpSet& a, const OpSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

// Naive merge of the latest components written by each process.
class GraphReplay {
 public:
  explicit GraphReplay(const OpCatalog& catalog) : catalog_(catalog) {}

  void apply_write(ProcessId p, const std::string& which, const Value& payload) { latest_[p][which] = payload; }

  AbcView view() const {
    AbcView v;
    for (const auto& [p, parts] : latest_) {
      if (auto it = parts.find("write_A"); it != parts.end())
        for (const auto& id : it->second) v.A.insert(resolve(catalog_, id.get<std::string>()));
      if (auto it = parts.find("write_B"); it != parts.end()) {
        for (const auto& pair : it->second) {
          auto op = resolve(catalog_, pair.at(0).get<std::string>());
          int b = pair.at(1).get<int>();
          auto [slot, fresh] = v.B.emplace(op, b);
          if (!fresh && b < slot->second) slot->second = b;
        }
      }
      if (auto it = parts.find("write_C"); it != parts.end()) {
        for (const auto& pair : it->second) {
          auto& deps = v.C[resolve(catalog_, pair.at(0).get<std::string>())];
          for (const auto& src : pair.at(1)) deps.insert(resolve(catalog_, src.get<std::string>()));
        }
      }
    }
    return v;
  }

  const std::map<ProcessId, std::map<std::string, Value>>& latest() const { return latest_; }

 private:
  const OpCatalog& catalog_;
  std::map<ProcessId, std::map<std::string, Value>> latest_;
};

const BaseStepRecord* as_base(const TraceEvent& e) { return std::get_if<BaseStepRecord>(&e.body); }

bool is_graph_object(const BaseStepRecord& r) { return r.object == "G"; }

// Enumerates topological orderings of c; stops when visit returns false.
void for_each_topological_order(const DependencyGraph& c, const std::function<bool(const OpSequence&)>& visit) {
  const auto verts = vertices(c);
  const OpSequence vs(verts.begin(), verts.end());
  const auto n = vs.size();
  std::vector<std::uint32_t> preds(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = c.find(vs[i]);
    if (it == c.end()) continue;
    for (const auto& src : it->second) {
      auto j = static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), src) - vs.begin());
      preds[i] |= 1u << j;
    }
  }
  OpSequence order;
  bool stop = false;
  std::function<void(std::uint32_t)> dfs = [&](std::uint32_t placed) {
    if (order.size() == n) {
      stop = !visit(order);
      return;
    }
    for (std::size_t i = 0; i < n && !stop; ++i) {
      if ((placed >> i) & 1u) continue;
      if ((preds[i] & placed) != preds[i]) continue;
      order.push_back(vs[i]);
      dfs(placed | (1u << i));
      order.pop_back();
    }
  };
  dfs(0);
}

// All topological orderings of c, and every pair of equal-set prefixes of
// them, are equivalent.
std::optional<std::string> topological_orders_equivalent(const SeqObjectSpec& spec, const DependencyGraph& c) {
  struct Rep {
    ObjectState state;
    std::map<OpId, Response> responses;
    OpSequence prefix;
  };
  std::map<std::set<OpId>, Rep> reps;
  std::optional<std::string> problem;
  for_each_topological_order(c, [&](const OpSequence& order) {
    ObjectState state = spec.initial_state;
    std::map<OpId, Response> responses;
    std::set<OpId> members;
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto [r, next] = spec.apply(state, order[i]);
      state = std::move(next);
      responses.emplace(order[i].id, std::move(r));
      members.insert(order[i].id);
      auto [it, fresh] = reps.try_emplace(members, Rep{state, responses, {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i) + 1}});
      if (fresh) continue;
      if (!spec.state_eq(it->second.state, state) || it->second.responses != responses) {
        std::string a, b;
        for (const auto& op : it->second.prefix) a += op.describe() + " ";
        for (std::size_t j = 0; j <= i; ++j) b += order[j].describe() + " ";
        problem = "orderings [" + a + "] and [" + b + "] of the same operations are not equivalent";
        return false;
      }
    }
    return true;
  });
  return problem;
}

void check_view_shape(const AbcView& v, const std::string& where, std::vector<Violation>& out) {
  const auto committed = v.committed();
  for (const auto& [op, sources] : v.C)
    if (sources.contains(op)) out.push_back({"graph.irreflexive", where + ": self-edge on " + op.id.str()});
  try {
    linearize(v.C);
  } catch (const InvariantViolation&) {
    out.push_back({"graph.acyclic", where + ": C contains a cycle"});
  }
  for (const auto& [op, sources] : v.C) {
    for (const auto& src : sources) {
      auto it = v.C.find(src);
      if (it != v.C.end() && !subset_of(it->second, sources))
        out.push_back({"graph.transitive", where + ": " + src.id.str() + " -> " + op.id.str() +
                                               " but not every predecessor of " + src.id.str() + " precedes " +
                                               op.id.str()});
    }
  }
  if (!subset_of(committed, v.booked()))
    out.push_back({"graph.containment", where + ": committed operation without a B-value"});
  if (!subset_of(v.booked(), v.A)) out.push_back({"graph.containment", where + ": booked operation not announced"});
}

void check_growth(const AbcView& before, const AbcView& after, const std::string& where,
                  std::vector<Violation>& out) {
  bool ok = subset_of(before.A, after.A);
  for (const auto& [op, b] : before.B) {
    auto it = after.B.find(op);
    ok = ok && it != after.B.end() && it->second <= b;
  }
  for (const auto& [op, deps] : before.C) {
    auto it = after.C.find(op);
    ok = ok && it != after.C.end() && subset_of(deps, it->second);
  }
  if (!ok) out.push_back({"graph.monotone", where + ": view is not contained in a later view"});
}

std::set<OpId> ancestors(const DependencyGraph& c, const OpInstance& op) {
  std::set<OpId> seen;
  std::vector<OpInstance> stack{op};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    auto it = c.find(cur);
    if (it == c.end()) continue;
    for (const auto& src : it->second)
      if (seen.insert(src.id).second) stack.push_back(src);
  }
  return seen;
}

std::string event_where(const TraceEvent& e) { return "step " + std::to_string(e.step); }

// Operation each process is executing at every event.
class Outstanding {
 public:
  void observe(const TraceEvent& e) {
    if (const auto* inv = std::get_if<Invocation>(&e.body)) current_[e.process] = inv->op.id;
    if (std::holds_alternative<ResponseRecord>(e.body)) current_.erase(e.process);
  }
  std::optional<OpId> of(ProcessId p) const {
    auto it = current_.find(p);
    if (it == current_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<ProcessId, OpId> current_;
};

}  // namespace

Value to_json(const Violation& v) { return Value{{"check", v.check}, {"message", v.message}}; }

std::size_t AuditVerdict::strong_sync_uses() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.used_strong_sync; }));
}

std::size_t AuditVerdict::cap_triggered_uses() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.used_strong_sync && e.cap_triggered; }));
}

Value to_json(const AuditVerdict& v) {
  Value entries = Value::array();
  for (const auto& e : v.entries) {
    Value entry{{"op", e.op.describe()}, {"used_strong_sync", e.used_strong_sync}, {"cap_triggered", e.cap_triggered}};
    if (e.witness_state) {
      Value subset = Value::array();
      for (const auto& op : e.witness_subset->subset) subset.push_back(op.describe());
      Value ordering = Value::array();
      for (const auto& op : e.witness_subset->ordering) ordering.push_back(op.describe());
      entry["witness"] = Value{{"state", to_json(*e.witness_state)}, {"subset", subset}, {"ordering", ordering}};
    }
    entries.push_back(std::move(entry));
  }
  Value violations = Value::array();
  for (const auto& x : v.violations) violations.push_back(to_json(x));
  return Value{{"passed", v.passed()},
               {"strong_sync_uses", v.strong_sync_uses()},
               {"cap_triggered_uses", v.cap_triggered_uses()},
               {"entries", std::move(entries)},
               {"violations", std::move(violations)}};
}

AuditVerdict audit_dynamic_concurrency(const SeqObjectSpec& spec, const Trace& trace, const CheckBounds& bounds) {
  const auto h = trace.history();
  std::map<OpId, AuditEntry> entries;
  for (const auto& op : h.ops()) entries[op.id].op = op;
  for (const auto& e : trace.events) {
    const auto* r = as_base(e);
    if (!r || r->op != "propose") continue;
    auto id = OpId::parse(r->annotations.at("publish").get<std::string>());
    auto& entry = entries.at(id);
    entry.used_strong_sync = true;
    entry.cap_triggered = entry.cap_triggered || r->annotations.value("cap_triggered", false);
  }

  AuditVerdict verdict;
  for (auto& [id, entry] : entries) {
    if (entry.used_strong_sync && !entry.cap_triggered) {
      if (h.size() > bounds.max_state_ops)
        throw CapacityError("dynamic-concurrency audit of " + id.str() + ": history has " + std::to_string(h.size()) +
                            " operations, bound is " + std::to_string(bounds.max_state_ops));
      for (const auto& state : enumerate_system_states(spec, h, id, bounds.max_state_ops)) {
        auto w = find_noncommuting_subset(spec, state.l, entry.op, state.O, state.O.size());
        if (w) {
          entry.witness_state = state;
          entry.witness_subset = std::move(w);
          break;
        }
      }
      if (!entry.witness_state)
        verdict.violations.push_back({"dyncon.witness", entry.op.describe() +
                                                            " used consensus but commutes with every subset of "
                                                            "pending operations in every system state"});
    }
    verdict.entries.push_back(std::move(entry));
  }
  return verdict;
}

AbcView replay_final_view(const Trace& trace) {
  const auto catalog = trace.catalog();
  GraphReplay replay(catalog);
  for (const auto& e : trace.events)
    if (const auto* r = as_base(e); r && is_graph_object(*r) && r->op != "scan")
      replay.apply_write(e.process, r->op, r->value);
  return replay.view();
}

std::vector<Violation> check_trace_linearizability(const SeqObjectSpec& spec, const Trace& trace,
                                                   const CheckBounds& bounds) {
  std::vector<Violation> out;
  const auto h = trace.history();
  if (!check_linearizable(spec, h, bounds.max_lin_ops)) {
    out.push_back({"lin.history", "the induced history has no linearization"});
  }
  const auto final_c = replay_final_view(trace).C;
  try {
    if (vertices(final_c).size() <= bounds.max_topo_vertices) {
      for_each_topological_order(final_c, [&](const OpSequence& order) {
        if (is_linearization(spec, h, order)) return true;
        std::string text;
        for (const auto& op : order) text += op.describe() + " ";
        out.push_back({"lin.topological_order", "topological ordering [" + text + "] of the final C is not a linearization"});
        return false;
      });
    } else if (!is_linearization(spec, h, linearize(final_c))) {
      out.push_back({"lin.topological_order", "linearize(final C) is not a linearization"});
    }
  } catch (const InvariantViolation& ex) {
    out.push_back({"lin.topological_order", ex.what()});
  }
  return out;
}

std::vector<Violation> check_graph_invariants(const SeqObjectSpec& spec, const Trace& trace,
                                              const CheckBounds& bounds) {
  std::vector<Violation> out;
  const auto catalog = trace.catalog();
  const auto h = trace.history();
  GraphReplay replay(catalog);

  std::optional<AbcView> previous;
  std::map<Value, bool> checked_graphs;  // serialized C -> already analysed
  std::map<OpId, Response> stable;

  auto analyse_graph = [&](const DependencyGraph& c, const std::string& where) {
    Value key = to_json(AbcView{{}, {}, c}).at("C");
    if (!checked_graphs.emplace(key, true).second) return;
    OpSequence l;
    try {
      l = linearize(c);
    } catch (const InvariantViolation&) {
      return;  // reported as a cycle
    }
    if (l.size() <= bounds.max_topo_vertices) {
      if (auto problem = topological_orders_equivalent(spec, c))
        out.push_back({"graph.topological_equivalence", where + ": " + *problem});
    }
    for (const auto& [id, r] : apply_sequence(spec, l).responses) {
      auto [it, fresh] = stable.emplace(id, r);
      if (!fresh && it->second != r)
        out.push_back({"graph.response_stability", where + ": response of " + id.str() + " changed from " +
                                                       it->second.dump() + " to " + r.dump()});
    }
  };

  for (const auto& e : trace.events) {
    const auto where = event_where(e);
    if (const auto* r = as_base(e); r && is_graph_object(*r)) {
      if (r->op != "scan") {
        replay.apply_write(e.process, r->op, r->value);
        continue;
      }
      AbcView recorded;
      try {
        recorded = view_from_json(r->value, catalog);
      } catch (const std::exception& ex) {
        out.push_back({"graph.decode", where + ": " + ex.what()});
        continue;
      }
      if (!(recorded == replay.view()))
        out.push_back({"graph.replay", where + ": scan differs from the merge of all writes before it"});
      check_view_shape(recorded, where, out);
      if (previous) check_growth(*previous, recorded, where, out);
      previous = recorded;
      analyse_graph(recorded.C, where);
    } else if (const auto* res = std::get_if<ResponseRecord>(&e.body)) {
      const auto committed = replay.view().committed();
      if (!committed.contains(catalog.at(res->op)))
        out.push_back({"graph.commitment", where + ": " + res->op.str() + " returned before being committed"});
    }
  }

  // Each process announces and books only its own operations, once each.
  for (const auto& [p, parts] : replay.latest()) {
    std::set<std::string> booked;
    if (auto it = parts.find("write_A"); it != parts.end())
      for (const auto& id : it->second)
        if (OpId::parse(id.get<std::string>()).process != p)
          out.push_back({"graph.single_announce", "p" + std::to_string(p) + " announced " + id.get<std::string>()});
    if (auto it = parts.find("write_B"); it != parts.end()) {
      for (const auto& pair : it->second) {
        auto id = pair.at(0).get<std::string>();
        if (OpId::parse(id).process != p || !booked.insert(id).second)
          out.push_back({"graph.single_book", "p" + std::to_string(p) + " booked " + id + " more than once or for another process"});
      }
    }
  }

  const auto final_view = replay.view();
  check_view_shape(final_view, "final", out);
  if (previous) check_growth(*previous, final_view, "final", out);
  analyse_graph(final_view.C, "final");

  for (const auto& op : h.ops()) {
    if (!h.is_complete(op.id)) continue;
    if (auto it = stable.find(op.id); it != stable.end() && it->second != h.response(op.id))
      out.push_back({"graph.response_stability", op.id.str() + " returned " + h.response(op.id).dump() +
                                                     " but its response in C is " + it->second.dump()});
  }

  const auto final_vertices = final_view.committed();
  for (const auto& later : final_vertices) {
    if (!h.contains(later.id)) continue;
    const auto before = ancestors(final_view.C, later);
    for (const auto& earlier : h.ops())
      if (h.precedes(earlier.id, later.id) && !before.contains(earlier.id))
        out.push_back({"graph.precedence", earlier.id.str() + " returned before " + later.id.str() +
                                               " was invoked, but no path " + earlier.id.str() + " -> " +
                                               later.id.str() + " exists in the final C"});
  }
  return out;
}

std::vector<Violation> check_base_objects(const Trace& trace) {
  std::vector<Violation> out;
  std::set<ProcessId> crashed;
  std::map<std::string, std::pair<std::string, std::string>> consensus;  // object -> (first proposal, decided)
  std::map<ProcessId, int> last_k;
  std::vector<int> k_array(static_cast<std::size_t>(std::max(trace.header.n_processes, 0)), 0);
  Outstanding outstanding;
  std::set<OpId> invoked;

  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    const auto where = event_where(e);
    if (e.step != static_cast<std::int64_t>(i)) out.push_back({"trace.steps", where + ": steps are not consecutive"});
    if (e.process < 0 || e.process >= trace.header.n_processes) {
      out.push_back({"trace.process", where + ": unknown process"});
      continue;
    }
    if (crashed.contains(e.process)) out.push_back({"trace.crash", where + ": p" + std::to_string(e.process) + " acted after crashing"});
    if (std::holds_alternative<CrashRecord>(e.body)) crashed.insert(e.process);
    if (const auto* inv = std::get_if<Invocation>(&e.body)) invoked.insert(inv->op.id);
    if (const auto* res = std::get_if<ResponseRecord>(&e.body)) {
      if (!invoked.contains(res->op) || res->op.process != e.process || outstanding.of(e.process) != res->op)
        out.push_back({"trace.response", where + ": response of " + res->op.str() + " without a matching invocation"});
    }

    if (const auto* r = as_base(e)) {
      if (!outstanding.of(e.process))
        out.push_back({"trace.attribution", where + ": base step outside any publish"});
      if (r->op == "propose") {
        const auto proposed = r->annotations.value("proposed", std::string());
        const auto decided = r->value.get<std::string>();
        auto [it, fresh] = consensus.try_emplace(r->object, proposed, decided);
        if (fresh && decided != proposed)
          out.push_back({"consensus.validity", where + ": " + r->object + " decided " + decided + ", never proposed"});
        if (!fresh && decided != it->second.second)
          out.push_back({"consensus.agreement", where + ": " + r->object + " returned " + decided + " after " +
                                                    it->second.second});
        auto publish = r->annotations.value("publish", std::string());
        if (!outstanding.of(e.process) || outstanding.of(e.process)->str() != publish)
          out.push_back({"consensus.attribution", where + ": propose attributed to " + publish +
                                                      ", not the publish running on p" + std::to_string(e.process)});
      } else if (r->object == "K" && r->op == "write") {
        int k = r->value.get<int>();
        auto [it, fresh] = last_k.try_emplace(e.process, k);
        if (!fresh && k <= it->second)
          out.push_back({"k.increasing", where + ": p" + std::to_string(e.process) + " wrote K=" + std::to_string(k) +
                                             " after " + std::to_string(it->second)});
        it->second = k;
        k_array.at(static_cast<std::size_t>(e.process)) = k;
      } else if (r->object == "K" && r->op == "scan") {
        if (r->value != Value(k_array)) out.push_back({"k.replay", where + ": K scan differs from replayed writes"});
      }
    }
    outstanding.observe(e);
  }
  return out;
}

std::vector<Violation> check_wait_freedom(const Trace& trace) {
  std::vector<Violation> out;
  const int c = trace.history().max_concurrency();
  std::map<OpId, int> proposes;
  std::set<OpId> returned;
  for (const auto& e : trace.events) {
    if (const auto* cert = std::get_if<CommitCertificate>(&e.body)) {
      returned.insert(cert->op.id);
      if (cert->k0 && cert->iterations > c + 2)
        out.push_back({"waitfree.bound", cert->op.id.str() + " needed " + std::to_string(cert->iterations) +
                                             " iterations beyond k0=" + std::to_string(*cert->k0) + " with c=" +
                                             std::to_string(c)});
    }
    if (const auto* r = as_base(e); r && r->op == "propose")
      ++proposes[OpId::parse(r->annotations.value("publish", std::string("p0.0")))];
  }
  for (const auto& [id, n] : proposes)
    if (!returned.contains(id) && n > c + 2)
      out.push_back({"waitfree.bound", id.str() + " ran " + std::to_string(n) + " iterations without returning, c=" +
                                           std::to_string(c)});
  return out;
}

Value to_json(const CheckReport& r) {
  Value violations = Value::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  Value out{{"passed", r.passed()},
            {"violations", std::move(violations)},
            {"consensus_uses", r.consensus_uses},
            {"conflict_resolution_publishes", r.conflict_resolution_publishes},
            {"max_iterations", r.max_iterations},
            {"concurrency", r.concurrency}};
  if (r.audit) out["audit"] = to_json(*r.audit);
  return out;
}

CheckReport check_trace(const SeqObjectSpec& spec, const Trace& trace, const CheckSelection& selection,
                        const CheckBounds& bounds) {
  CheckReport report;
  auto append = [&](std::vector<Violation> vs) {
    report.violations.insert(report.violations.end(), vs.begin(), vs.end());
  };
  report.concurrency = trace.history().max_concurrency();
  std::set<OpId> resolving;
  Outstanding outstanding;
  for (const auto& e : trace.events) {
    if (const auto* r = as_base(e)) {
      if (r->op == "propose") ++report.consensus_uses;
      if (r->object == "K" && r->op == "scan")
        if (auto cur = outstanding.of(e.process)) resolving.insert(*cur);
    }
    if (const auto* cert = std::get_if<CommitCertificate>(&e.body))
      report.max_iterations = std::max(report.max_iterations, cert->iterations);
    outstanding.observe(e);
  }
  report.conflict_resolution_publishes = resolving.size();

  if (selection.graph) {
    append(check_base_objects(trace));
    append(check_wait_freedom(trace));
    append(check_graph_invariants(spec, trace, bounds));
  }
  if (selection.lin) append(check_trace_linearizability(spec, trace, bounds));
  if (selection.dyncon) {
    report.audit = audit_dynamic_concurrency(spec, trace, bounds);
    append(report.audit->violations);
  }
  return report;
}

}  // namespace dyncon
