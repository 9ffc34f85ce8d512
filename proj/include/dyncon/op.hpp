#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dyncon {

// Arguments, responses and object states are structural values.
using Value = nlohmann::json;

using ProcessId = int;

// Identity of an operation: the invoking process and its per-process
// sequence number. Unique within a run.
struct OpId {
  ProcessId process = 0;
  int seq = 0;

  friend auto operator<=>(const OpId&, const OpId&) = default;

  // "p<process>.<seq>", e.g. "p3.1".
  std::string str() const;
  static OpId parse(std::string_view text);
};

std::ostream& operator<<(std::ostream& os, const OpId& id);

// A uniquely identified invocation. Comparison and equality look at the
// identity only; method and args are fixed at creation.
struct OpInstance {
  OpId id;
  std::string method;
  Value args = Value::array();

  bool operator==(const OpInstance& other) const { return id == other.id; }
  std::strong_ordering operator<=>(const OpInstance& other) const { return id <=> other.id; }

  // e.g. "p1.0:append(b)"
  std::string describe() const;
};

std::ostream& operator<<(std::ostream& os, const OpInstance& op);

using OpSequence = std::vector<OpInstance>;
using OpSet = std::set<OpInstance>;

Value to_json(const OpInstance& op);
OpInstance op_from_json(const Value& v);

}  // namespace dyncon

template <>
struct std::hash<dyncon::OpId> {
  std::size_t operator()(const dyncon::OpId& id) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(id.process) << 32) ^ id.seq);
  }
};
