#include "dyncon/fuzz.hpp"

#include <random>

#include "dyncon/errors.hpp"
#include "dyncon/objects.hpp"

namespace dyncon {

namespace {

// Ticks a publish typically needs on the conflict-free path, including its
// invocation and response.
constexpr std::int64_t kTicksPerOp = 7;

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

OpInstance random_op(std::mt19937_64& rng, const std::string& spec, OpId id) {
  static const char* kListValues[] = {"a", "b", "c", "d"};
  OpInstance op{id, "", Value::array()};
  const auto roll = below(rng, 10);
  if (spec == "list") {
    if (roll < 4) {
      op.method = "append";
      op.args.push_back(kListValues[below(rng, 4)]);
    } else if (roll < 6) {
      op.method = "readLast";
    } else if (roll < 8) {
      op.method = "swap";
      auto i = static_cast<int>(below(rng, 3));
      op.args = Value::array({i, i + static_cast<int>(below(rng, 3))});
    } else {
      op.method = "readAll";
    }
  } else if (spec == "asset-transfer") {
    if (roll < 7) {
      static const int kAmounts[] = {0, 30, 50, 70, 100};
      op.method = "transfer";
      bool forward = below(rng, 4) != 0;
      op.args = Value::array({forward ? "a" : "b", forward ? "b" : "a", kAmounts[below(rng, 5)]});
    } else {
      op.method = "readBalance";
      op.args.push_back(below(rng, 2) ? "a" : "b");
    }
  } else if (spec == "counter") {
    op.method = roll < 7 ? "inc" : "read";
  } else if (spec == "register") {
    if (roll < 6) {
      op.method = "write";
      op.args.push_back(below(rng, 2) ? "x" : "y");
    } else {
      op.method = "read";
    }
  } else {
    throw MalformedInput("no random workload generator for spec '" + spec + "'");
  }
  return op;
}

}  // namespace

Scenario instantiate(const Scenario& tmpl, std::uint64_t seed) {
  Scenario s = tmpl;
  s.schedule.reset();
  s.seed = seed;
  if (tmpl.crash_probability > 0) {
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < tmpl.crash_probability) {
      const auto horizon = std::max<std::int64_t>(1, kTicksPerOp * static_cast<std::int64_t>(tmpl.workload.size()));
      s.crashes.push_back({static_cast<ProcessId>(below(rng, static_cast<std::uint64_t>(tmpl.n_processes))),
                           static_cast<std::int64_t>(below(rng, static_cast<std::uint64_t>(horizon)))});
    }
  }
  return s;
}

std::vector<FuzzResult> fuzz(const Scenario& tmpl, std::uint64_t first, std::uint64_t last,
                             const CheckSelection& checks, const CheckBounds& bounds) {
  validate(tmpl);
  const auto spec = make_spec(tmpl.spec, tmpl.spec_params);
  std::vector<FuzzResult> results;
  for (auto seed = first; seed < last; ++seed) {
    FuzzResult r;
    r.seed = seed;
    try {
      r.trace = run(instantiate(tmpl, seed));
      r.report = check_trace(spec, r.trace, checks, bounds);
    } catch (const std::exception& ex) {
      r.error = ex.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

Scenario generate_scenario(std::uint64_t seed, const CorpusOptions& options) {
  std::mt19937_64 rng(seed * 0x2545F4914F6CDD1DULL + 1);
  Scenario s;
  s.spec = options.specs.at(below(rng, options.specs.size()));
  if (s.spec == "asset-transfer") {
    static const int kBalances[] = {100, 120, 150};
    s.spec_params = Value{{"balances", {{"a", kBalances[below(rng, 3)]}, {"b", 0}}}};
  }
  s.n_processes = options.min_processes +
                  static_cast<int>(below(rng, static_cast<std::uint64_t>(options.max_processes - options.min_processes + 1)));
  const int n_ops = options.min_ops + static_cast<int>(below(rng, static_cast<std::uint64_t>(options.max_ops - options.min_ops + 1)));
  std::vector<int> seq(static_cast<std::size_t>(s.n_processes), 0);
  for (int i = 0; i < n_ops; ++i) {
    // Every process gets at least one operation when there are enough.
    auto p = i < s.n_processes ? i : static_cast<ProcessId>(below(rng, static_cast<std::uint64_t>(s.n_processes)));
    s.workload.push_back(random_op(rng, s.spec, OpId{p, seq[static_cast<std::size_t>(p)]++}));
  }
  // Program order requires each process's operations in seq order.
  std::stable_sort(s.workload.begin(), s.workload.end());
  s.seed = rng();
  s.engine.mutation = options.mutation;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < options.crash_probability) {
    const auto horizon = kTicksPerOp * n_ops;
    const auto crashes = 1 + below(rng, 2);
    for (std::uint64_t c = 0; c < crashes; ++c)
      s.crashes.push_back({static_cast<ProcessId>(below(rng, static_cast<std::uint64_t>(s.n_processes))),
                           static_cast<std::int64_t>(below(rng, static_cast<std::uint64_t>(horizon)))});
  }
  return s;
}

}  // namespace dyncon
