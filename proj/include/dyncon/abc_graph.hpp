#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "dyncon/base_objects.hpp"
#include "dyncon/op.hpp"

namespace dyncon {

// B-value of an operation. Unbooked operations carry the infinite value,
// which compares greater than every integer.
class BValue {
 public:
  BValue() = default;
  explicit BValue(int v) : value_(v) {}
  static BValue infinity() { return BValue(); }

  bool is_infinite() const { return !value_.has_value(); }
  int value() const { return value_.value(); }

  friend bool operator==(const BValue&, const BValue&) = default;
  friend std::strong_ordering operator<=>(const BValue& a, const BValue& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() <=> b.is_infinite();
    return *a.value_ <=> *b.value_;
  }

 private:
  std::optional<int> value_;
};

// C as an incoming-edge map: C[op] is the set of operations with an edge to op.
using DependencyGraph = std::map<OpInstance, OpSet>;

OpSet vertices(const DependencyGraph& c);

// Result of one atomic read of the ABC graph.
struct AbcView {
  OpSet A;
  std::map<OpInstance, int> B;
  DependencyGraph C;

  BValue b_value(const OpInstance& op) const;
  OpSet booked() const;
  OpSet committed() const { return vertices(C); }

  friend bool operator==(const AbcView&, const AbcView&) = default;
};

// Per-process local sets R_A, R_B, R_C; each add writes one of them whole.
struct AbcLocal {
  OpSet announced;
  std::set<std::pair<OpInstance, int>> booked;
  std::set<std::pair<OpInstance, OpSet>> committed;

  friend bool operator==(const AbcLocal&, const AbcLocal&) = default;
};

// Min-merge for B, union-merge for C.
AbcView merge_components(const std::vector<AbcLocal>& components);

// The Announce-Book-Commit graph over one snapshot object whose component j
// holds (S_A[j], S_B[j], S_C[j]). Every add is a single snapshot write of
// the updated local set and every read a single scan.
class AbcGraph {
 public:
  explicit AbcGraph(std::size_t n_processes, std::string object_id = "G");

  void add_A(ProcessId p, const OpInstance& op, StepObserver* obs = nullptr);
  void add_B(ProcessId p, const OpInstance& op, int b, StepObserver* obs = nullptr);
  void add_C(ProcessId p, const OpInstance& op, const OpSet& deps, StepObserver* obs = nullptr);
  AbcView read(ProcessId p, StepObserver* obs = nullptr) const;

  const std::string& object_id() const { return snapshot_.object_id(); }

 private:
  std::vector<AbcLocal> locals_;
  SnapshotObject<AbcLocal> snapshot_;
};

// Trace encoding: A as a sorted id list, B as id -> int for every announced
// operation (null when unbooked), C as id -> sorted list of source ids.
Value to_json(const AbcView& view);
Value to_json(const AbcLocal& local, char component);

}  // namespace dyncon
