#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyncon/sequential_spec.hpp"

namespace dyncon {

struct HistoryEvent {
  enum class Kind { kInvoke, kRespond };
  Kind kind = Kind::kInvoke;
  OpInstance op;
  Response response;  // kRespond only
};

// Invocations and responses of the implemented object, in run order.
// Construction validates well-formedness: unique invocations, every response
// preceded by its invocation, at most one outstanding operation per process.
class History {
 public:
  History() = default;
  explicit History(std::vector<HistoryEvent> events);

  const std::vector<HistoryEvent>& events() const { return events_; }
  // Operations in invocation order.
  const OpSequence& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  bool contains(const OpId& id) const { return info_.contains(id); }
  const OpInstance& op(const OpId& id) const;
  std::size_t inv_index(const OpId& id) const;
  std::optional<std::size_t> res_index(const OpId& id) const;
  bool is_complete(const OpId& id) const { return res_index(id).has_value(); }
  const Response& response(const OpId& id) const;

  // a <_H b: a's response precedes b's invocation.
  bool precedes(const OpId& a, const OpId& b) const;

  // The first `n_events` events.
  History prefix(std::size_t n_events) const;
  // Drops an operation (both events).
  History without(const OpId& id) const;

  // Largest number of simultaneously outstanding operations; operations
  // that never respond stay outstanding to the end.
  int max_concurrency() const;

 private:
  struct Info {
    std::size_t op_index = 0;
    std::size_t inv = 0;
    std::optional<std::size_t> res;
  };
  std::vector<HistoryEvent> events_;
  OpSequence ops_;
  std::map<OpId, Info> info_;
};

// Standalone history documents (cmd_states input):
// {"format_version":1,"spec":..,"spec_params":..,"events":[...]}.
struct HistoryDocument {
  std::string spec;
  Value spec_params = Value::object();
  History history;
};

Value to_json(const HistoryEvent& e);
Value to_json(const HistoryDocument& doc);
HistoryDocument history_document_from_json(const Value& v);

}  // namespace dyncon
