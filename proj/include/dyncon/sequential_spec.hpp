#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyncon/op.hpp"

namespace dyncon {

using ObjectState = Value;
using Response = Value;

// A sequential object: initial state, a deterministic transition function
// and an equality on states. apply throws MalformedInput for operations the
// object does not export.
struct SeqObjectSpec {
  std::string name;
  ObjectState initial_state;
  std::function<std::pair<Response, ObjectState>(const ObjectState&, const OpInstance&)> apply;
  std::function<bool(const ObjectState&, const ObjectState&)> state_eq;
};

struct OrderingOutcome {
  ObjectState final_state;
  std::map<OpId, Response> responses;
};

// Default bound on the size of the set handed to commutes_with_all_subsets.
inline constexpr std::size_t kDefaultCommutativityCap = 8;

OrderingOutcome apply_sequence(const SeqObjectSpec& spec, std::span<const OpInstance> seq);

// Same fold, starting from an arbitrary state instead of the initial one.
OrderingOutcome apply_sequence_from(const SeqObjectSpec& spec, const ObjectState& from,
                                    std::span<const OpInstance> seq);

// s and s2 must be orderings of the same operations.
bool orderings_equivalent(const SeqObjectSpec& spec, std::span<const OpInstance> s,
                          std::span<const OpInstance> s2);

// l.s.op ~ l.op.s
bool commutes_in(const SeqObjectSpec& spec, std::span<const OpInstance> l, const OpInstance& op,
                 std::span<const OpInstance> s);

// commutes_in for every ordering of set.
bool commutes_with_set(const SeqObjectSpec& spec, std::span<const OpInstance> l, const OpInstance& op,
                       const OpSet& set);

// commutes_with_set for every subset of set. Throws CapacityError when
// |set| > cap.
bool commutes_with_all_subsets(const SeqObjectSpec& spec, std::span<const OpInstance> l,
                               const OpInstance& op, const OpSet& set,
                               std::size_t cap = kDefaultCommutativityCap);

// A subset of `set` together with one of its orderings s for which
// l.s.op and l.op.s are not equivalent.
struct NonCommutingWitness {
  OpSet subset;
  OpSequence ordering;
};

// Searches subsets by increasing size; nullopt when op commutes with every
// subset. Throws CapacityError when |set| > cap.
std::optional<NonCommutingWitness> find_noncommuting_subset(const SeqObjectSpec& spec,
                                                            std::span<const OpInstance> l,
                                                            const OpInstance& op, const OpSet& set,
                                                            std::size_t cap = kDefaultCommutativityCap);

}  // namespace dyncon
