#include "dyncon/linearizability.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>

#include "dyncon/errors.hpp"

namespace dyncon {

namespace {

using Mask = std::uint32_t;

// Index-based view of a history for the searches below.
struct SearchProblem {
  const SeqObjectSpec& spec;
  const History& h;
  std::vector<Mask> must_precede;  // ops whose response precedes op i's invocation
  std::vector<bool> complete;
  Mask complete_mask = 0;

  SearchProblem(const SeqObjectSpec& s, const History& hist, std::size_t max_ops, const char* what)
      : spec(s), h(hist) {
    const auto n = h.size();
    if (n > max_ops)
      throw CapacityError(std::string(what) + ": history has " + std::to_string(n) + " operations, bound is " +
                          std::to_string(max_ops));
    if (n > 31) throw CapacityError("history too large for exhaustive search");
    const auto& ops = h.ops();
    must_precede.assign(n, 0);
    complete.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      complete[i] = h.is_complete(ops[i].id);
      if (complete[i]) complete_mask |= Mask{1} << i;
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && h.precedes(ops[j].id, ops[i].id)) must_precede[i] |= Mask{1} << j;
    }
  }

  // Applies op i to state if it is enabled under `placed` and its response
  // agrees with the history.
  std::optional<ObjectState> try_place(Mask placed, std::size_t i, const ObjectState& state) const {
    if (placed & (Mask{1} << i)) return std::nullopt;
    if ((must_precede[i] & placed) != must_precede[i]) return std::nullopt;
    const auto& op = h.ops()[i];
    auto [response, next] = spec.apply(state, op);
    if (complete[i] && response != h.response(op.id)) return std::nullopt;
    return std::move(next);
  }
};

}  // namespace

std::optional<OpSequence> check_linearizable(const SeqObjectSpec& spec, const History& h, std::size_t max_ops) {
  SearchProblem problem(spec, h, max_ops, "linearizability check");
  const auto n = h.size();
  std::unordered_set<std::string> dead;  // (mask, state) pairs that cannot finish
  OpSequence seq;

  std::function<bool(Mask, const ObjectState&)> dfs = [&](Mask placed, const ObjectState& state) -> bool {
    if ((placed & problem.complete_mask) == problem.complete_mask) return true;
    auto key = std::to_string(placed) + "|" + state.dump();
    if (dead.contains(key)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      auto next = problem.try_place(placed, i, state);
      if (!next) continue;
      seq.push_back(h.ops()[i]);
      if (dfs(placed | (Mask{1} << i), *next)) return true;
      seq.pop_back();
    }
    dead.insert(std::move(key));
    return false;
  };
  if (dfs(0, spec.initial_state)) return seq;
  return std::nullopt;
}

void for_each_linearization(const SeqObjectSpec& spec, const History& h, std::size_t max_ops,
                            const std::function<bool(const OpSequence&)>& visit) {
  SearchProblem problem(spec, h, max_ops, "linearization enumeration");
  const auto n = h.size();
  OpSequence seq;
  bool stop = false;

  std::function<void(Mask, const ObjectState&)> dfs = [&](Mask placed, const ObjectState& state) {
    if ((placed & problem.complete_mask) == problem.complete_mask) {
      if (!visit(seq)) {
        stop = true;
        return;
      }
    }
    for (std::size_t i = 0; i < n && !stop; ++i) {
      auto next = problem.try_place(placed, i, state);
      if (!next) continue;
      seq.push_back(h.ops()[i]);
      dfs(placed | (Mask{1} << i), *next);
      seq.pop_back();
    }
  };
  dfs(0, spec.initial_state);
}

bool is_linearization(const SeqObjectSpec& spec, const History& h, const OpSequence& seq) {
  std::set<OpId> in_seq;
  for (const auto& op : seq) {
    if (!h.contains(op.id) || !in_seq.insert(op.id).second) return false;
  }
  for (const auto& op : h.ops())
    if (h.is_complete(op.id) && !in_seq.contains(op.id)) return false;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (h.precedes(seq[j].id, seq[i].id)) return false;
  auto outcome = apply_sequence(spec, seq);
  for (const auto& op : seq)
    if (h.is_complete(op.id) && outcome.responses.at(op.id) != h.response(op.id)) return false;
  return true;
}

std::vector<SystemState> enumerate_system_states(const SeqObjectSpec& spec, const History& h, const OpId& target,
                                                 std::size_t max_ops) {
  if (!h.contains(target)) throw MalformedInput("operation " + target.str() + " is not in the history");
  if (h.size() > max_ops)
    throw CapacityError("system-state enumeration: history has " + std::to_string(h.size()) +
                        " operations, bound is " + std::to_string(max_ops));

  // Every prefix, stopping before `target`, of every linearization of h.
  std::set<OpSequence> prefixes;
  for_each_linearization(spec, h, max_ops, [&](const OpSequence& lin) {
    OpSequence prefix;
    prefixes.insert(prefix);
    for (const auto& op : lin) {
      if (op.id == target) break;
      prefix.push_back(op);
      prefixes.insert(prefix);
    }
    return true;
  });

  const std::size_t first_cut = h.inv_index(target) + 1;
  const std::size_t last_cut = h.res_index(target).value_or(h.events().size());
  std::set<SystemState> states;
  for (std::size_t cut = first_cut; cut <= last_cut; ++cut) {
    // H' = first `cut` events.
    auto invoked = [&](const OpId& id) { return h.inv_index(id) < cut; };
    auto responded = [&](const OpId& id) {
      auto r = h.res_index(id);
      return r && *r < cut;
    };
    for (const auto& l : prefixes) {
      std::set<OpId> in_l;
      bool ok = true;
      for (const auto& op : l) {
        in_l.insert(op.id);
        ok = ok && invoked(op.id);
      }
      if (!ok) continue;
      for (const auto& op : h.ops())
        if (responded(op.id) && !in_l.contains(op.id)) ok = false;
      if (!ok) continue;
      SystemState s{l, {}};
      for (const auto& op : h.ops())
        if (invoked(op.id) && !in_l.contains(op.id) && op.id != target) s.O.insert(op);
      states.insert(std::move(s));
    }
  }
  return {states.begin(), states.end()};
}

Value to_json(const SystemState& s) {
  Value l = Value::array();
  for (const auto& op : s.l) l.push_back(op.describe());
  Value o = Value::array();
  for (const auto& op : s.O) o.push_back(op.describe());
  return Value{{"l", std::move(l)}, {"O", std::move(o)}};
}

}  // namespace dyncon
