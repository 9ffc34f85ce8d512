#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "dyncon/history.hpp"
#include "dyncon/objects.hpp"
#include "dyncon/op.hpp"
#include "dyncon/sequential_spec.hpp"
#include "dyncon/trace.hpp"

namespace dyncon::testing {

inline OpInstance mk(int process, int seq, std::string method, Value args = Value::array()) {
  return OpInstance{{process, seq}, std::move(method), std::move(args)};
}

// Plain left fold through spec.apply, kept separate from the library helpers
// so tests can use it as an oracle.
struct Folded {
  Value state;
  std::vector<Value> responses;
};

inline Folded fold(const SeqObjectSpec& spec, const Value& from, const std::vector<OpInstance>& seq) {
  Folded f{from, {}};
  for (const auto& op : seq) {
    auto [r, s] = spec.apply(f.state, op);
    f.responses.push_back(r);
    f.state = s;
  }
  return f;
}

inline Folded fold(const SeqObjectSpec& spec, const std::vector<OpInstance>& seq) {
  return fold(spec, spec.initial_state, seq);
}

// s and s2 hold the same operations; compare final states and per-op responses.
inline bool naive_equivalent(const SeqObjectSpec& spec, const std::vector<OpInstance>& prefix,
                             const std::vector<OpInstance>& s, const std::vector<OpInstance>& s2) {
  auto base = fold(spec, prefix).state;
  auto a = fold(spec, base, s);
  auto b = fold(spec, base, s2);
  if (!spec.state_eq(a.state, b.state)) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto j = std::find(s2.begin(), s2.end(), s[i]) - s2.begin();
    if (a.responses[i] != b.responses[static_cast<std::size_t>(j)]) return false;
  }
  return true;
}

// Three processes increment once each, all announced before anyone reads,
// with the commutativity cap at 1 so every publish falls through.
inline Value capped_counter_scenario() {
  Value wl = Value::array();
  for (int p = 0; p < 3; ++p) wl.push_back({{"process", p}, {"method", "inc"}});
  Value sched = Value::array();
  for (int r = 0; r < 3; ++r)
    for (int p = 0; p < 3; ++p) sched.push_back(p);
  return {{"spec", "counter"}, {"n_processes", 3}, {"workload", wl}, {"schedule", sched}, {"cap", 1}};
}

inline std::string scenario_path(const std::string& name) { return std::string(DYNCON_SCENARIO_DIR) + "/" + name; }

inline Value load_json(const std::string& path) {
  std::ifstream in(path);
  return Value::parse(in);
}

// The four-process list history used throughout: p2 appends a, p1 appends b
// and then d, p3 appends a and swaps (0,2), p2 reads last and all, p0 appends c.
// swap and append(c) never return.
struct ListExample {
  OpInstance a2 = mk(2, 0, "append", {"a"});
  OpInstance b = mk(1, 0, "append", {"b"});
  OpInstance a3 = mk(3, 0, "append", {"a"});
  OpInstance read_last = mk(2, 1, "readLast");
  OpInstance swap = mk(3, 1, "swap", {0, 2});
  OpInstance d = mk(1, 1, "append", {"d"});
  OpInstance c = mk(0, 0, "append", {"c"});
  OpInstance read_all = mk(2, 2, "readAll");

  History history(bool with_read_all = true) const {
    using K = HistoryEvent::Kind;
    std::vector<HistoryEvent> ev{
        {K::kInvoke, a2, {}},     {K::kRespond, a2, "ok"},      {K::kInvoke, b, {}},     {K::kInvoke, a3, {}},
        {K::kRespond, b, "ok"},   {K::kRespond, a3, "ok"},      {K::kInvoke, read_last, {}},
        {K::kInvoke, swap, {}},   {K::kRespond, read_last, "a"}, {K::kInvoke, d, {}},     {K::kInvoke, c, {}},
        {K::kInvoke, read_all, {}}, {K::kRespond, d, "ok"},
        {K::kRespond, read_all, Value::array({"a", "b", "a"})},
    };
    if (!with_read_all)
      std::erase_if(ev, [&](const HistoryEvent& e) { return e.op == read_all; });
    return History(std::move(ev));
  }
};

}  // namespace dyncon::testing
