#include "dyncon/objects.hpp"

#include <algorithm>
#include <array>

#include "dyncon/errors.hpp"

namespace dyncon {

namespace {

const Value kOk = "ok";

bool structural_eq(const ObjectState& a, const ObjectState& b) { return a == b; }

[[noreturn]] void bad_op(const OpInstance& op, const std::string& why) {
  throw MalformedInput("malformed operation " + op.describe() + ": " + why);
}

void require_arity(const OpInstance& op, std::size_t n) {
  if (op.args.size() != n) bad_op(op, "expected " + std::to_string(n) + " argument(s)");
}

long long int_arg(const OpInstance& op, std::size_t i) {
  const auto& a = op.args.at(i);
  if (!a.is_number_integer()) bad_op(op, "argument " + std::to_string(i) + " must be an integer");
  return a.get<long long>();
}

std::pair<Response, ObjectState> apply_list(const ObjectState& state, const OpInstance& op) {
  static constexpr std::array<std::string_view, 4> kValues{"a", "b", "c", "d"};
  if (op.method == "append") {
    require_arity(op, 1);
    const auto& v = op.args[0];
    if (!v.is_string() || std::find(kValues.begin(), kValues.end(), v.get<std::string>()) == kValues.end())
      bad_op(op, "value must be one of a, b, c, d");
    ObjectState next = state;
    next.push_back(v);
    return {kOk, std::move(next)};
  }
  if (op.method == "readLast") {
    require_arity(op, 0);
    return {state.empty() ? Value(nullptr) : state.back(), state};
  }
  if (op.method == "readAll") {
    require_arity(op, 0);
    return {state, state};
  }
  if (op.method == "swap") {
    require_arity(op, 2);
    auto i = int_arg(op, 0);
    auto j = int_arg(op, 1);
    if (i < 0 || i > j) bad_op(op, "indices must satisfy 0 <= i <= j");
    if (static_cast<long long>(state.size()) < j + 1) return {Value(nullptr), state};
    ObjectState next = state;
    std::swap(next[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(j)]);
    return {kOk, std::move(next)};
  }
  bad_op(op, "list has no method '" + op.method + "'");
}

std::pair<Response, ObjectState> apply_asset(const ObjectState& state, const OpInstance& op) {
  auto account = [&](std::size_t i) {
    const auto& a = op.args.at(i);
    if (!a.is_string() || !state.contains(a.get<std::string>())) bad_op(op, "unknown account " + a.dump());
    return a.get<std::string>();
  };
  if (op.method == "transfer") {
    require_arity(op, 3);
    auto from = account(0);
    auto to = account(1);
    auto amount = int_arg(op, 2);
    if (amount < 0) bad_op(op, "amount must be non-negative");
    if (state[from].get<long long>() < amount) return {"rejected", state};
    ObjectState next = state;
    next[from] = next[from].get<long long>() - amount;
    next[to] = next[to].get<long long>() + amount;
    return {"accepted", std::move(next)};
  }
  if (op.method == "readBalance") {
    require_arity(op, 1);
    return {state[account(0)], state};
  }
  bad_op(op, "asset-transfer has no method '" + op.method + "'");
}

std::pair<Response, ObjectState> apply_counter(const ObjectState& state, const OpInstance& op) {
  if (op.method == "inc") {
    require_arity(op, 0);
    return {kOk, state.get<long long>() + 1};
  }
  if (op.method == "read") {
    require_arity(op, 0);
    return {state, state};
  }
  bad_op(op, "counter has no method '" + op.method + "'");
}

std::pair<Response, ObjectState> apply_register(const ObjectState& state, const OpInstance& op) {
  if (op.method == "write") {
    require_arity(op, 1);
    return {kOk, op.args[0]};
  }
  if (op.method == "read") {
    require_arity(op, 0);
    return {state, state};
  }
  bad_op(op, "register has no method '" + op.method + "'");
}

}  // namespace

SeqObjectSpec list_spec() { return {"list", Value::array(), apply_list, structural_eq}; }

SeqObjectSpec asset_transfer_spec(const Value& balances) {
  Value initial = balances.is_null() ? Value{{"a", 100}, {"b", 0}} : balances;
  if (!initial.is_object() || initial.empty()) throw MalformedInput("asset-transfer balances must be a non-empty object");
  for (const auto& [acct, bal] : initial.items()) {
    if (!bal.is_number_integer() || bal.get<long long>() < 0)
      throw MalformedInput("balance of account '" + acct + "' must be a non-negative integer");
  }
  return {"asset-transfer", std::move(initial), apply_asset, structural_eq};
}

SeqObjectSpec counter_spec() { return {"counter", Value(0), apply_counter, structural_eq}; }

SeqObjectSpec register_spec() { return {"register", Value(nullptr), apply_register, structural_eq}; }

const std::vector<std::string>& registered_spec_names() {
  static const std::vector<std::string> names{"list", "asset-transfer", "counter", "register"};
  return names;
}

SeqObjectSpec make_spec(std::string_view name, const Value& params) {
  if (name == "list") return list_spec();
  if (name == "asset-transfer")
    return asset_transfer_spec(params.is_object() && params.contains("balances") ? params.at("balances") : Value());
  if (name == "counter") return counter_spec();
  if (name == "register") return register_spec();
  throw MalformedInput("unknown object spec '" + std::string(name) + "'");
}

std::string render_response(const Response& r) {
  if (r.is_null()) return "⊥";
  if (r.is_string()) return r.get<std::string>();
  if (r.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ",";
      out += render_response(r[i]);
    }
    return out + "]";
  }
  return r.dump();
}

}  // namespace dyncon
