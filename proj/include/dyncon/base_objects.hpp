#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyncon/errors.hpp"
#include "dyncon/op.hpp"

namespace dyncon {

// One atomic access to a shared base object, as it appears in a trace.
struct BaseStepRecord {
  ProcessId process = 0;
  std::string object;
  std::string op;
  Value value;
  // Extra fields merged into the trace record (attribution of propose steps).
  Value annotations = Value::object();
};

// Receives every base-object step and returns the global step number the
// harness assigned to it.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual std::int64_t on_step(BaseStepRecord record) = 0;
};

// Multi-writer snapshot object: component i belongs to process i. write and
// scan are each a single atomic step.
template <typename V>
class SnapshotObject {
 public:
  SnapshotObject(std::string object_id, std::size_t n_processes, V initial = V{})
      : object_id_(std::move(object_id)), components_(n_processes, std::move(initial)) {}

  const std::string& object_id() const { return object_id_; }
  std::size_t size() const { return components_.size(); }

  void write(ProcessId caller, ProcessId component, V value) {
    if (caller != component)
      throw InvariantViolation("process p" + std::to_string(caller) + " wrote component " +
                               std::to_string(component) + " of " + object_id_);
    components_.at(static_cast<std::size_t>(component)) = std::move(value);
  }

  std::vector<V> scan() const { return components_; }

 private:
  std::string object_id_;
  std::vector<V> components_;
};

// One-shot compare-and-set cell: the first proposal is stored and every
// propose returns the stored value.
class ConsensusObject {
 public:
  explicit ConsensusObject(int index) : index_(index) {}

  int index() const { return index_; }
  std::string object_id() const { return "CONS_" + std::to_string(index_); }
  const std::optional<OpId>& stored() const { return stored_; }

  OpId propose(const OpId& value) {
    if (!stored_) stored_ = value;
    return *stored_;
  }

 private:
  int index_;
  std::optional<OpId> stored_;
};

// Every use of a strong synchronization primitive, attributed to the publish
// invocation during which it happened. Append-only.
class SyncUsageLog {
 public:
  struct Record {
    OpId publish;
    std::string object_id;
    std::int64_t step = 0;
  };

  void append(Record r) { records_.push_back(std::move(r)); }
  const std::vector<Record>& records() const { return records_; }

 private:
  std::vector<Record> records_;
};

}  // namespace dyncon
