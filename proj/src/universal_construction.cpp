#include "dyncon/universal_construction.hpp"

#include <algorithm>

#include "dyncon/errors.hpp"

namespace dyncon {

std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::kNone: return "none";
    case Mutation::kSkipCommutativityCheck: return "skip-commute";
    case Mutation::kStaleDependencies: return "stale-deps";
  }
  return "none";
}

Mutation mutation_from_string(std::string_view name) {
  if (name == "none") return Mutation::kNone;
  if (name == "skip-commute") return Mutation::kSkipCommutativityCheck;
  if (name == "stale-deps") return Mutation::kStaleDependencies;
  throw MalformedInput("unknown mutation '" + std::string(name) + "'");
}

std::string_view to_string(CommitPath p) {
  return p == CommitPath::kConflictFree ? "conflict_free" : "conflict_resolution";
}

CommitPath commit_path_from_string(std::string_view name) {
  if (name == "conflict_free") return CommitPath::kConflictFree;
  if (name == "conflict_resolution") return CommitPath::kConflictResolution;
  throw MalformedInput("unknown commit path '" + std::string(name) + "'");
}

SharedObjects::SharedObjects(std::size_t n_processes) : graph(n_processes), k("K", n_processes, 0) {}

ConsensusObject& SharedObjects::cons(int index) { return consensus.try_emplace(index, index).first->second; }

OpSequence linearize(const DependencyGraph& c) {
  std::map<OpInstance, std::size_t> missing;  // unplaced predecessors
  std::map<OpInstance, std::vector<OpInstance>> successors;
  for (const auto& v : vertices(c)) missing.emplace(v, 0);
  for (const auto& [op, sources] : c) {
    for (const auto& src : sources) {
      if (src == op) throw InvariantViolation("self-loop on " + op.id.str() + " in C");
      ++missing[op];
      successors[src].push_back(op);
    }
  }
  OpSet ready;
  for (const auto& [v, n] : missing)
    if (n == 0) ready.insert(v);

  OpSequence order;
  order.reserve(missing.size());
  while (!ready.empty()) {
    auto next = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(next);
    for (const auto& succ : successors[next])
      if (--missing[succ] == 0) ready.insert(succ);
  }
  if (order.size() != missing.size()) throw InvariantViolation("dependency graph C contains a cycle");
  return order;
}

Response result_in(const SeqObjectSpec& spec, std::span<const OpInstance> l, const OpInstance& op) {
  auto outcome = apply_sequence(spec, l);
  auto it = outcome.responses.find(op.id);
  if (it == outcome.responses.end())
    throw InvariantViolation("result requested for " + op.id.str() + ", which is not in the sequence");
  return it->second;
}

PublishMachine::PublishMachine(ProcessId process, OpInstance op) : process_(process), op_(std::move(op)) {}

const CommitCertificate& PublishMachine::certificate() const {
  if (!certificate_) throw InvariantViolation("publish(" + op_.id.str() + ") has not returned");
  return *certificate_;
}

void PublishMachine::finish(CommitPath path, OpSet dependencies, Response response) {
  certificate_ = CommitCertificate{op_, path, std::move(dependencies), std::move(response), k0_, iterations_,
                                   cap_triggered_};
  phase_ = Phase::kDone;
}

void PublishMachine::after_read2(const SeqObjectSpec& spec, const EngineOptions& options) {
  l_ = linearize(view_.C);
  const auto committed = view_.committed();
  if (committed.contains(op_)) {
    // Committed by someone else's conflict resolution.
    finish(CommitPath::kConflictResolution, view_.C[op_], result_in(spec, l_, op_));
    return;
  }
  OpSet concurrent;
  for (const auto& x : view_.A)
    if (!committed.contains(x) && x != op_) concurrent.insert(x);

  bool commutes = false;
  if (options.mutation == Mutation::kSkipCommutativityCheck) {
    commutes = true;
  } else if (concurrent.size() > options.commutativity_cap) {
    cap_triggered_ = true;
  } else {
    commutes = commutes_with_all_subsets(spec, l_, op_, concurrent, options.commutativity_cap);
  }

  if (commutes) {
    pending_deps_ = options.mutation == Mutation::kStaleDependencies ? first_view_.committed() : committed;
    phase_ = Phase::kCommitConflictFree;
  } else {
    phase_ = Phase::kReadK;
  }
}

void PublishMachine::after_loop_read(const SeqObjectSpec& spec) {
  const auto committed = view_.committed();
  if (committed.contains(op_)) {
    finish(CommitPath::kConflictResolution, view_.C[op_], result_in(spec, linearize(view_.C), op_));
    return;
  }
  // Smallest B-value among booked, uncommitted operations; ties by id.
  std::optional<OpInstance> best;
  for (const auto& [x, b] : view_.B) {
    if (committed.contains(x)) continue;
    if (!best || view_.b_value(x) < view_.b_value(*best)) best = x;
  }
  if (!best)
    throw InvariantViolation("publish(" + op_.id.str() + "): no booked uncommitted operation in conflict resolution");
  candidate_ = *best;
  phase_ = Phase::kPropose;
}

void PublishMachine::step(const SeqObjectSpec& spec, SharedObjects& shared, const EngineOptions& options,
                          StepObserver* observer) {
  auto& g = shared.graph;
  switch (phase_) {
    case Phase::kAnnounce:
      g.add_A(process_, op_, observer);
      phase_ = Phase::kRead1;
      return;
    case Phase::kRead1:
      first_view_ = g.read(process_, observer);
      phase_ = Phase::kBook;
      return;
    case Phase::kBook:
      g.add_B(process_, op_, static_cast<int>(first_view_.A.size()), observer);
      phase_ = Phase::kRead2;
      return;
    case Phase::kRead2:
      view_ = g.read(process_, observer);
      after_read2(spec, options);
      return;
    case Phase::kCommitConflictFree: {
      g.add_C(process_, op_, pending_deps_, observer);
      OpSequence extended = l_;
      extended.push_back(op_);
      finish(CommitPath::kConflictFree, pending_deps_, result_in(spec, extended, op_));
      return;
    }
    case Phase::kReadK: {
      auto ks = shared.k.scan();
      if (observer) observer->on_step({process_, shared.k.object_id(), "scan", Value(ks)});
      k_ = *std::max_element(ks.begin(), ks.end());
      k0_ = k_;
      phase_ = Phase::kLoopRead;
      return;
    }
    case Phase::kLoopRead:
      ++k_;
      ++iterations_;
      view_ = g.read(process_, observer);
      after_loop_read(spec);
      return;
    case Phase::kPropose: {
      auto& cons = shared.cons(k_);
      const OpId decided = cons.propose(candidate_.id);
      std::int64_t step = 0;
      if (observer) {
        step = observer->on_step({process_, cons.object_id(), "propose", decided.str(),
                                  Value{{"publish", op_.id.str()},
                                        {"proposed", candidate_.id.str()},
                                        {"cap_triggered", cap_triggered_}}});
      }
      shared.usage.append({op_.id, cons.object_id(), step});
      // The decided value was proposed by someone and is therefore in B of
      // some read; the next read of G resolves its full instance.
      decided_ = candidate_.id == decided ? candidate_ : OpInstance{decided, {}, Value::array()};
      phase_ = Phase::kLoopRead2;
      return;
    }
    case Phase::kLoopRead2: {
      view_ = g.read(process_, observer);
      auto committed = view_.committed();
      if (committed.contains(decided_)) {
        phase_ = Phase::kWriteK;
      } else {
        auto it = view_.B.find(decided_);
        if (it == view_.B.end())
          throw InvariantViolation("decided operation " + decided_.id.str() + " is not booked");
        decided_ = it->first;
        pending_deps_ = std::move(committed);
        phase_ = Phase::kCommitResolved;
      }
      return;
    }
    case Phase::kCommitResolved:
      g.add_C(process_, decided_, pending_deps_, observer);
      phase_ = Phase::kWriteK;
      return;
    case Phase::kWriteK:
      shared.k.write(process_, process_, k_);
      if (observer) observer->on_step({process_, shared.k.object_id(), "write", k_});
      phase_ = Phase::kLoopRead;
      return;
    case Phase::kDone:
      throw InvariantViolation("step on a finished publish(" + op_.id.str() + ")");
  }
}

}  // namespace dyncon
