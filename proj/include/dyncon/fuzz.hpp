#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dyncon/checkers.hpp"
#include "dyncon/scheduler.hpp"

namespace dyncon {

struct FuzzResult {
  std::uint64_t seed = 0;
  Trace trace;
  CheckReport report;
  // Set instead of report when a checker could not run (capacity, malformed).
  std::string error;

  bool passed() const { return error.empty() && report.passed(); }
};

// The template with `seed` as its schedule seed and, with probability
// crash_probability, one crash of a random process at a random tick.
Scenario instantiate(const Scenario& tmpl, std::uint64_t seed);

// Runs seeds [first, last) and applies the selected checkers to each trace.
// Individual failures are reported, not thrown.
std::vector<FuzzResult> fuzz(const Scenario& tmpl, std::uint64_t first, std::uint64_t last,
                             const CheckSelection& checks, const CheckBounds& bounds = {});

// Shape of the random corpus used by the property suites.
struct CorpusOptions {
  std::vector<std::string> specs{"list", "asset-transfer", "counter", "register"};
  int min_processes = 2;
  int max_processes = 4;
  int min_ops = 3;
  int max_ops = 8;
  double crash_probability = 0.3;
  Mutation mutation = Mutation::kNone;
};

// A random workload, schedule seed and crash set, fully determined by seed.
Scenario generate_scenario(std::uint64_t seed, const CorpusOptions& options = {});

}  // namespace dyncon
