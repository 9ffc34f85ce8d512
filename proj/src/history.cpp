#include "dyncon/history.hpp"

#include <algorithm>
#include <set>

#include "dyncon/errors.hpp"
#include "dyncon/trace.hpp"

namespace dyncon {

History::History(std::vector<HistoryEvent> events) : events_(std::move(events)) {
  std::map<ProcessId, OpId> outstanding;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    const auto& id = e.op.id;
    if (e.kind == HistoryEvent::Kind::kInvoke) {
      if (info_.contains(id)) throw MalformedInput("operation " + id.str() + " invoked twice");
      if (outstanding.contains(id.process))
        throw MalformedInput("process p" + std::to_string(id.process) + " invoked " + id.str() + " while " +
                             outstanding.at(id.process).str() + " is outstanding");
      outstanding.emplace(id.process, id);
      info_.emplace(id, Info{ops_.size(), i, std::nullopt});
      ops_.push_back(e.op);
    } else {
      auto it = info_.find(id);
      if (it == info_.end()) throw MalformedInput("response of " + id.str() + " without invocation");
      if (it->second.res) throw MalformedInput("operation " + id.str() + " responded twice");
      it->second.res = i;
      outstanding.erase(id.process);
    }
  }
}

const OpInstance& History::op(const OpId& id) const {
  auto it = info_.find(id);
  if (it == info_.end()) throw MalformedInput("operation " + id.str() + " is not in the history");
  return ops_[it->second.op_index];
}

std::size_t History::inv_index(const OpId& id) const {
  op(id);
  return info_.at(id).inv;
}

std::optional<std::size_t> History::res_index(const OpId& id) const {
  op(id);
  return info_.at(id).res;
}

const Response& History::response(const OpId& id) const {
  auto r = res_index(id);
  if (!r) throw MalformedInput("operation " + id.str() + " has no response");
  return events_[*r].response;
}

bool History::precedes(const OpId& a, const OpId& b) const {
  auto ra = res_index(a);
  return ra && *ra < inv_index(b);
}

History History::prefix(std::size_t n_events) const {
  n_events = std::min(n_events, events_.size());
  return History(std::vector<HistoryEvent>(events_.begin(), events_.begin() + static_cast<std::ptrdiff_t>(n_events)));
}

History History::without(const OpId& id) const {
  std::vector<HistoryEvent> kept;
  for (const auto& e : events_)
    if (e.op.id != id) kept.push_back(e);
  return History(std::move(kept));
}

int History::max_concurrency() const {
  int live = 0, best = 0;
  for (const auto& e : events_) {
    live += e.kind == HistoryEvent::Kind::kInvoke ? 1 : -1;
    best = std::max(best, live);
  }
  return best;
}

Value to_json(const HistoryEvent& e) {
  if (e.kind == HistoryEvent::Kind::kInvoke) return Value{{"kind", "inv"}, {"op", to_json(e.op)}};
  return Value{{"kind", "res"}, {"op", e.op.id.str()}, {"response", e.response}};
}

Value to_json(const HistoryDocument& doc) {
  Value events = Value::array();
  for (const auto& e : doc.history.events()) events.push_back(to_json(e));
  return Value{{"format_version", kTraceFormatVersion},
               {"spec", doc.spec},
               {"spec_params", doc.spec_params},
               {"events", std::move(events)}};
}

HistoryDocument history_document_from_json(const Value& v) {
  if (!v.is_object() || !v.contains("spec") || !v.contains("events") || !v.at("events").is_array())
    throw MalformedInput("history document needs 'spec' and an 'events' array");
  check_format_version(v.value("format_version", kTraceFormatVersion));
  HistoryDocument doc;
  doc.spec = v.at("spec").get<std::string>();
  doc.spec_params = v.value("spec_params", Value::object());
  std::map<OpId, OpInstance> invoked;
  std::vector<HistoryEvent> events;
  for (const auto& e : v.at("events")) {
    auto kind = e.value("kind", std::string());
    if (kind == "inv") {
      auto op = op_from_json(e.at("op"));
      invoked[op.id] = op;
      events.push_back({HistoryEvent::Kind::kInvoke, op, {}});
    } else if (kind == "res") {
      auto id = OpId::parse(e.at("op").get<std::string>());
      auto it = invoked.find(id);
      if (it == invoked.end()) throw MalformedInput("response of " + id.str() + " without invocation");
      events.push_back({HistoryEvent::Kind::kRespond, it->second, e.value("response", Value())});
    } else {
      throw MalformedInput("history event kind must be 'inv' or 'res': " + e.dump());
    }
  }
  doc.history = History(std::move(events));
  return doc;
}

}  // namespace dyncon
