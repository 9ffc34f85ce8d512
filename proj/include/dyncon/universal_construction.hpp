#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dyncon/abc_graph.hpp"
#include "dyncon/base_objects.hpp"
#include "dyncon/sequential_spec.hpp"

namespace dyncon {

// Deliberately broken engine variants, used to show that the checkers catch
// real bugs.
enum class Mutation {
  kNone,
  // Always take the conflict-free path.
  kSkipCommutativityCheck,
  // Conflict-free commits use vertices(C) from the first read instead of the second.
  kStaleDependencies,
};

std::string_view to_string(Mutation m);
Mutation mutation_from_string(std::string_view name);

struct EngineOptions {
  // Largest concurrent set the commutativity check enumerates. Larger sets
  // send the operation to conflict resolution.
  std::size_t commutativity_cap = kDefaultCommutativityCap;
  Mutation mutation = Mutation::kNone;
};

// Shared state of one universal-construction instance: the ABC graph G, the
// iteration snapshot K and the consensus objects CONS_1, CONS_2, ...
struct SharedObjects {
  explicit SharedObjects(std::size_t n_processes);

  AbcGraph graph;
  SnapshotObject<int> k;
  std::map<int, ConsensusObject> consensus;
  SyncUsageLog usage;

  ConsensusObject& cons(int index);
};

enum class CommitPath { kConflictFree, kConflictResolution };

std::string_view to_string(CommitPath p);
CommitPath commit_path_from_string(std::string_view name);

// Audit record emitted when a publish returns.
struct CommitCertificate {
  OpInstance op;
  CommitPath path = CommitPath::kConflictFree;
  OpSet dependencies;
  Response response;
  // Conflict resolution only: the k read from K and the number of loop
  // iterations executed.
  std::optional<int> k0;
  int iterations = 0;
  bool cap_triggered = false;
};

// Topological ordering of C. Ties are broken by operation id, so the result
// is a function of C. Throws InvariantViolation on a cycle.
OpSequence linearize(const DependencyGraph& c);

// Response of op when l is applied from the initial state.
Response result_in(const SeqObjectSpec& spec, std::span<const OpInstance> l, const OpInstance& op);

// publish(op) as a step machine. Each call to step() performs exactly one
// access to a shared object and reports it to the observer.
class PublishMachine {
 public:
  enum class Phase {
    kAnnounce,
    kRead1,
    kBook,
    kRead2,
    kCommitConflictFree,
    kReadK,
    kLoopRead,
    kPropose,
    kLoopRead2,
    kCommitResolved,
    kWriteK,
    kDone,
  };

  PublishMachine(ProcessId process, OpInstance op);

  void step(const SeqObjectSpec& spec, SharedObjects& shared, const EngineOptions& options,
            StepObserver* observer);

  bool finished() const { return phase_ == Phase::kDone; }
  Phase phase() const { return phase_; }
  const OpInstance& op() const { return op_; }
  ProcessId process() const { return process_; }
  bool in_conflict_resolution() const { return k0_.has_value(); }
  int iterations() const { return iterations_; }

  // Valid once finished().
  const CommitCertificate& certificate() const;

 private:
  void finish(CommitPath path, OpSet dependencies, Response response);
  void after_read2(const SeqObjectSpec& spec, const EngineOptions& options);
  void after_loop_read(const SeqObjectSpec& spec);

  ProcessId process_;
  OpInstance op_;
  Phase phase_ = Phase::kAnnounce;

  AbcView first_view_;
  AbcView view_;
  OpSequence l_;
  OpSet pending_deps_;
  bool cap_triggered_ = false;

  std::optional<int> k0_;
  int k_ = 0;
  int iterations_ = 0;
  OpInstance candidate_;
  OpInstance decided_;

  std::optional<CommitCertificate> certificate_;
};

}  // namespace dyncon
