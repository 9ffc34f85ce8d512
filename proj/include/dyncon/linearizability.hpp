#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dyncon/history.hpp"
#include "dyncon/sequential_spec.hpp"

namespace dyncon {

inline constexpr std::size_t kDefaultLinearizabilityBound = 10;
inline constexpr std::size_t kDefaultStateEnumerationBound = 8;

// A legal, precedence-preserving sequential witness over a completion of h,
// or nullopt. Exhaustive with memoization of dead ends. Throws CapacityError
// when h has more than `max_ops` operations.
std::optional<OpSequence> check_linearizable(const SeqObjectSpec& spec, const History& h,
                                             std::size_t max_ops = kDefaultLinearizabilityBound);

// Calls `visit` with every linearization of h (each completion, each legal
// precedence-preserving order). Stops early when visit returns false.
void for_each_linearization(const SeqObjectSpec& spec, const History& h, std::size_t max_ops,
                            const std::function<bool(const OpSequence&)>& visit);

// Whether `seq` is a linearization of h: it holds every complete operation
// and only operations of h, respects <_H and reproduces every recorded
// response.
bool is_linearization(const SeqObjectSpec& spec, const History& h, const OpSequence& seq);

// (l, O): a possible linearized past and the invoked-but-not-linearized
// operations at some instant during an operation.
struct SystemState {
  OpSequence l;
  OpSet O;

  friend bool operator==(const SystemState&, const SystemState&) = default;
  friend std::strong_ordering operator<=>(const SystemState& a, const SystemState& b) {
    if (auto c = std::lexicographical_compare_three_way(a.l.begin(), a.l.end(), b.l.begin(), b.l.end()); c != 0)
      return c;
    return std::lexicographical_compare_three_way(a.O.begin(), a.O.end(), b.O.begin(), b.O.end());
  }
};

// All system states during `op` in h, deduplicated and sorted. History
// prefixes are cut between consecutive events; l must be a prefix of some
// linearization of the whole of h. Throws CapacityError above `max_ops`,
// MalformedInput when op is not in h.
std::vector<SystemState> enumerate_system_states(const SeqObjectSpec& spec, const History& h, const OpId& op,
                                                 std::size_t max_ops = kDefaultStateEnumerationBound);

Value to_json(const SystemState& s);

}  // namespace dyncon
