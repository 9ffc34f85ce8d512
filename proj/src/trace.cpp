#include "dyncon/trace.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "dyncon/errors.hpp"

namespace dyncon {

void check_format_version(int version) {
  if (const char* pinned = std::getenv("DYNCON_FORMAT_VERSION"); pinned && *pinned) {
    if (std::string(pinned) != std::to_string(kTraceFormatVersion))
      throw MalformedInput("DYNCON_FORMAT_VERSION=" + std::string(pinned) + " but this build speaks version " +
                           std::to_string(kTraceFormatVersion));
  }
  if (version != kTraceFormatVersion)
    throw MalformedInput("unsupported format_version " + std::to_string(version) + " (expected " +
                         std::to_string(kTraceFormatVersion) + ")");
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kInv: return "inv";
    case EventKind::kRes: return "res";
    case EventKind::kBaseStep: return "base_step";
    case EventKind::kCrash: return "crash";
    case EventKind::kCommit: return "commit";
  }
  return "?";
}

std::map<OpId, OpInstance> Trace::catalog() const {
  std::map<OpId, OpInstance> out;
  for (const auto& e : events)
    if (const auto* inv = std::get_if<Invocation>(&e.body)) out.emplace(inv->op.id, inv->op);
  return out;
}

History Trace::history() const {
  auto ops = catalog();
  std::vector<HistoryEvent> out;
  for (const auto& e : events) {
    if (const auto* inv = std::get_if<Invocation>(&e.body)) {
      out.push_back({HistoryEvent::Kind::kInvoke, inv->op, {}});
    } else if (const auto* res = std::get_if<ResponseRecord>(&e.body)) {
      out.push_back({HistoryEvent::Kind::kRespond, resolve(ops, res->op.str()), res->response});
    }
  }
  return History(std::move(out));
}

History history_of(const Trace& trace) { return trace.history(); }

OpInstance resolve(const OpCatalog& catalog, const std::string& id) {
  auto it = catalog.find(OpId::parse(id));
  if (it == catalog.end()) throw MalformedInput("trace refers to operation " + id + " before its invocation");
  return it->second;
}

namespace {

OpSet resolve_all(const OpCatalog& catalog, const Value& ids) {
  OpSet out;
  for (const auto& id : ids) out.insert(resolve(catalog, id.get<std::string>()));
  return out;
}

Value ids(const OpSet& ops) {
  Value out = Value::array();
  for (const auto& op : ops) out.push_back(op.id.str());
  return out;
}

Value header_json(const TraceHeader& h) {
  Value skipped = Value::array();
  for (const auto& s : h.skipped)
    skipped.push_back(Value{{"tick", s.tick}, {"process", s.process}, {"reason", s.reason}});
  return Value{{"type", "header"},
               {"format_version", h.format_version},
               {"spec", h.spec},
               {"spec_params", h.spec_params},
               {"n_processes", h.n_processes},
               {"schedule", h.schedule},
               {"cap", h.commutativity_cap},
               {"mutation", std::string(to_string(h.mutation))},
               {"skipped", std::move(skipped)}};
}

TraceHeader header_from_json(const Value& v) {
  if (v.value("type", std::string()) != "header") throw MalformedInput("trace must start with a header line");
  TraceHeader h;
  h.format_version = v.value("format_version", 0);
  check_format_version(h.format_version);
  h.spec = v.at("spec").get<std::string>();
  h.spec_params = v.value("spec_params", Value::object());
  h.n_processes = v.at("n_processes").get<int>();
  h.schedule = v.value("schedule", Value::object());
  h.commutativity_cap = v.value("cap", kDefaultCommutativityCap);
  h.mutation = mutation_from_string(v.value("mutation", std::string("none")));
  for (const auto& s : v.value("skipped", Value::array()))
    h.skipped.push_back({s.at("tick").get<std::int64_t>(), s.at("process").get<int>(), s.value("reason", "")});
  return h;
}

TraceEvent event_from_json(const Value& v, OpCatalog& catalog) {
  TraceEvent e;
  e.step = v.at("step").get<std::int64_t>();
  e.tick = v.value("tick", e.step);
  e.process = v.at("process").get<int>();
  const auto kind = v.at("kind").get<std::string>();
  if (kind == "inv") {
    auto op = op_from_json(v.at("op"));
    catalog[op.id] = op;
    e.body = Invocation{std::move(op)};
  } else if (kind == "res") {
    e.body = ResponseRecord{OpId::parse(v.at("op").get<std::string>()), v.value("response", Value())};
  } else if (kind == "base_step") {
    BaseStepRecord r{e.process, v.at("object").get<std::string>(), v.at("op").get<std::string>(),
                     v.value("value", Value()), Value::object()};
    for (const auto& [key, val] : v.items())
      if (key != "step" && key != "tick" && key != "kind" && key != "process" && key != "object" && key != "op" &&
          key != "value")
        r.annotations[key] = val;
    e.body = std::move(r);
  } else if (kind == "crash") {
    e.body = CrashRecord{};
  } else if (kind == "commit") {
    CommitCertificate c;
    c.op = resolve(catalog, v.at("op").get<std::string>());
    c.path = commit_path_from_string(v.at("path").get<std::string>());
    c.dependencies = resolve_all(catalog, v.at("dependencies"));
    c.response = v.value("response", Value());
    if (v.contains("k0") && !v.at("k0").is_null()) c.k0 = v.at("k0").get<int>();
    c.iterations = v.value("iterations", 0);
    c.cap_triggered = v.value("cap_triggered", false);
    e.body = std::move(c);
  } else {
    throw MalformedInput("unknown trace event kind '" + kind + "'");
  }
  return e;
}

}  // namespace

Value to_json(const TraceEvent& e) {
  Value out{{"step", e.step}, {"tick", e.tick}, {"kind", std::string(to_string(e.kind()))}, {"process", e.process}};
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Invocation>) {
          out["op"] = to_json(body.op);
        } else if constexpr (std::is_same_v<T, ResponseRecord>) {
          out["op"] = body.op.str();
          out["response"] = body.response;
        } else if constexpr (std::is_same_v<T, BaseStepRecord>) {
          out["object"] = body.object;
          out["op"] = body.op;
          out["value"] = body.value;
          for (const auto& [key, val] : body.annotations.items()) out[key] = val;
        } else if constexpr (std::is_same_v<T, CommitCertificate>) {
          out["op"] = body.op.id.str();
          out["path"] = std::string(to_string(body.path));
          out["dependencies"] = ids(body.dependencies);
          out["response"] = body.response;
          out["k0"] = body.k0 ? Value(*body.k0) : Value(nullptr);
          out["iterations"] = body.iterations;
          out["cap_triggered"] = body.cap_triggered;
        }
      },
      e.body);
  return out;
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << header_json(trace.header).dump() << '\n';
  for (const auto& e : trace.events) out << to_json(e).dump() << '\n';
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  OpCatalog catalog;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Value v;
    try {
      v = Value::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedInput("trace line " + std::to_string(line_no) + ": " + ex.what());
    }
    try {
      if (!have_header) {
        trace.header = header_from_json(v);
        have_header = true;
      } else {
        trace.events.push_back(event_from_json(v, catalog));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedInput("trace line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  if (!have_header) throw MalformedInput("empty trace");
  return trace;
}

Trace trace_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

AbcView view_from_json(const Value& v, const OpCatalog& catalog) {
  AbcView view;
  view.A = resolve_all(catalog, v.at("A"));
  for (const auto& [id, b] : v.at("B").items())
    if (!b.is_null()) view.B.emplace(resolve(catalog, id), b.get<int>());
  for (const auto& [id, sources] : v.at("C").items()) view.C[resolve(catalog, id)] = resolve_all(catalog, sources);
  return view;
}

}  // namespace dyncon
