#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dyncon/sequential_spec.hpp"

namespace dyncon {

// List over values {a,b,c,d}: append(v) -> "ok", readLast() -> last value or
// null on an empty list, readAll() -> whole list, swap(i,j) with i <= j ->
// "ok" when indices 0..j exist, otherwise null and no effect.
SeqObjectSpec list_spec();

// Accounts with non-negative balances. transfer(from,to,amount) moves the
// amount and responds "accepted" if `from` holds enough, otherwise responds
// "rejected" with no effect. readBalance(account) -> integer.
// `balances` is an object account -> initial balance; defaults to
// {"a": 100, "b": 0}.
SeqObjectSpec asset_transfer_spec(const Value& balances = Value());

// inc() -> "ok", read() -> count.
SeqObjectSpec counter_spec();

// write(v) -> "ok", read() -> last written value (null initially).
SeqObjectSpec register_spec();

// Names accepted by make_spec: "list", "asset-transfer", "counter", "register".
const std::vector<std::string>& registered_spec_names();

// Looks a spec up by its registered name. `params` carries object-specific
// configuration (for "asset-transfer": {"balances": {...}}).
SeqObjectSpec make_spec(std::string_view name, const Value& params = Value::object());

// Renders a response for human output; null prints as the bottom symbol.
std::string render_response(const Response& r);

}  // namespace dyncon
