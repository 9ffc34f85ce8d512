#include "dyncon/op.hpp"

#include <charconv>

#include "dyncon/errors.hpp"

namespace dyncon {

std::string OpId::str() const { return "p" + std::to_string(process) + "." + std::to_string(seq); }

OpId OpId::parse(std::string_view text) {
  auto fail = [&] { return MalformedInput("bad operation id '" + std::string(text) + "' (expected p<process>.<seq>)"); };
  if (text.size() < 4 || text.front() != 'p') throw fail();
  auto dot = text.find('.');
  if (dot == std::string_view::npos) throw fail();
  OpId id;
  auto parse_int = [&](std::string_view part, int& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size() || out < 0) throw fail();
  };
  parse_int(text.substr(1, dot - 1), id.process);
  parse_int(text.substr(dot + 1), id.seq);
  return id;
}

std::ostream& operator<<(std::ostream& os, const OpId& id) { return os << id.str(); }

std::string OpInstance::describe() const {
  std::string out = id.str() + ":" + method + "(";
  bool first = true;
  for (const auto& a : args) {
    if (!first) out += ",";
    first = false;
    out += a.is_string() ? a.get<std::string>() : a.dump();
  }
  return out + ")";
}

std::ostream& operator<<(std::ostream& os, const OpInstance& op) { return os << op.describe(); }

Value to_json(const OpInstance& op) {
  return Value{{"id", op.id.str()}, {"method", op.method}, {"args", op.args}};
}

OpInstance op_from_json(const Value& v) {
  if (!v.is_object() || !v.contains("id") || !v.contains("method"))
    throw MalformedInput("operation record needs 'id' and 'method': " + v.dump());
  OpInstance op;
  op.id = OpId::parse(v.at("id").get<std::string>());
  op.method = v.at("method").get<std::string>();
  op.args = v.value("args", Value::array());
  if (!op.args.is_array()) throw MalformedInput("operation args must be an array: " + v.dump());
  return op;
}

}  // namespace dyncon
