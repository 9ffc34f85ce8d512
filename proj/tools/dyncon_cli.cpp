// dyncon: run scenarios through the universal construction, fuzz schedules,
// check traces and enumerate system states.
//
// Exit codes: 0 pass, 1 violation, 2 malformed input or capacity exceeded.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "dyncon/checkers.hpp"
#include "dyncon/errors.hpp"
#include "dyncon/fuzz.hpp"
#include "dyncon/objects.hpp"
#include "dyncon/scheduler.hpp"

namespace {

using namespace dyncon;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

struct CommonOptions {
  std::string format = "human";
  std::size_t max_ops = 0;  // 0: per-checker defaults
  std::size_t cap = 0;      // 0: keep the scenario's cap
  std::string mutant;
  std::string checks = "lin,graph,dyncon";

  bool json() const { return format == "json"; }

  CheckBounds bounds() const {
    CheckBounds b;
    if (max_ops) {
      b.max_lin_ops = max_ops;
      b.max_state_ops = max_ops;
    }
    return b;
  }

  void apply(Scenario& s) const {
    if (cap) s.engine.commutativity_cap = cap;
    if (!mutant.empty()) s.engine.mutation = mutation_from_string(mutant);
  }
};

Value read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  try {
    return Value::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedInput(path + ": " + ex.what());
  }
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  return read_trace(in);
}

CheckSelection parse_checks(const std::string& text) {
  CheckSelection sel{false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "lin") sel.lin = true;
    else if (item == "graph") sel.graph = true;
    else if (item == "dyncon") sel.dyncon = true;
    else if (!item.empty()) throw MalformedInput("unknown check '" + item + "' (expected lin, graph, dyncon)");
  }
  return sel;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  auto dots = text.find("..");
  auto parse = [&](std::string_view part) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size()) throw MalformedInput("bad seed range '" + text + "'");
    return v;
  };
  if (dots == std::string::npos) {
    auto v = parse(text);
    return {v, v};
  }
  auto lo = parse(std::string_view(text).substr(0, dots));
  auto hi = parse(std::string_view(text).substr(dots + 2));
  if (hi < lo) throw MalformedInput("empty seed range '" + text + "'");
  return {lo, hi};
}

void print_violations(const std::vector<Violation>& vs) {
  for (const auto& v : vs) std::cout << "  VIOLATION [" << v.check << "] " << v.message << "\n";
}

struct PublishSummary {
  OpInstance op;
  std::optional<CommitCertificate> cert;
  int proposes = 0;
  bool crashed = false;
};

std::vector<PublishSummary> summarize(const Trace& trace) {
  std::map<OpId, PublishSummary> by_op;
  std::vector<OpId> order;
  std::map<ProcessId, OpId> current;
  for (const auto& e : trace.events) {
    if (const auto* inv = std::get_if<Invocation>(&e.body)) {
      by_op[inv->op.id].op = inv->op;
      order.push_back(inv->op.id);
      current[e.process] = inv->op.id;
    } else if (const auto* cert = std::get_if<CommitCertificate>(&e.body)) {
      by_op[cert->op.id].cert = *cert;
    } else if (const auto* r = std::get_if<BaseStepRecord>(&e.body); r && r->op == "propose") {
      ++by_op[OpId::parse(r->annotations.at("publish").get<std::string>())].proposes;
    } else if (std::holds_alternative<CrashRecord>(e.body)) {
      if (auto it = current.find(e.process); it != current.end() && !by_op[it->second].cert)
        by_op[it->second].crashed = true;
    } else if (std::holds_alternative<ResponseRecord>(e.body)) {
      current.erase(e.process);
    }
  }
  std::vector<PublishSummary> out;
  for (const auto& id : order) out.push_back(by_op[id]);
  return out;
}

int cmd_run(const std::string& scenario_path, const std::string& out_path, std::optional<std::uint64_t> seed,
            const CommonOptions& opts) {
  auto scenario = scenario_from_json(read_json_file(scenario_path));
  opts.apply(scenario);
  if (seed) {
    scenario.schedule.reset();
    scenario.seed = *seed;
  }
  Trace trace;
  try {
    trace = run(scenario);
  } catch (const InvariantViolation& ex) {
    std::cerr << "invariant violated: " << ex.what() << "\n";
    return kExitViolation;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw MalformedInput("cannot write " + out_path);
    write_trace(out, trace);
  }

  const auto publishes = summarize(trace);
  int uses = 0;
  for (const auto& p : publishes) uses += p.proposes;

  if (opts.json()) {
    Value ops = Value::array();
    for (const auto& p : publishes) {
      Value entry{{"op", p.op.describe()}, {"consensus_uses", p.proposes}, {"crashed", p.crashed}};
      if (p.cert) {
        entry["response"] = p.cert->response;
        entry["path"] = std::string(to_string(p.cert->path));
        entry["iterations"] = p.cert->iterations;
      }
      ops.push_back(std::move(entry));
    }
    std::cout << Value{{"trace", out_path}, {"operations", ops}, {"consensus_uses", uses}}.dump(2) << "\n";
  } else {
    for (const auto& p : publishes) {
      std::cout << p.op.describe() << "  ";
      if (p.cert) {
        std::cout << "-> " << render_response(p.cert->response) << "  [" << to_string(p.cert->path);
        if (p.cert->k0) std::cout << ", k0=" << *p.cert->k0 << ", iterations=" << p.cert->iterations;
        std::cout << "]";
      } else {
        std::cout << (p.crashed ? "(crashed)" : "(pending)");
      }
      if (p.proposes) std::cout << "  consensus uses: " << p.proposes;
      std::cout << "\n";
    }
    std::cout << "consensus uses: " << uses << "\n";
    if (!out_path.empty()) std::cout << "trace written to " << out_path << "\n";
  }
  return kExitPass;
}

int cmd_check(const std::string& trace_path, const CommonOptions& opts) {
  auto selection = parse_checks(opts.checks);
  auto trace = read_trace_file(trace_path);
  auto spec = make_spec(trace.header.spec, trace.header.spec_params);
  auto report = check_trace(spec, trace, selection, opts.bounds());
  if (opts.json()) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << (report.passed() ? "PASS" : "FAIL") << "  consensus uses: " << report.consensus_uses
              << "  conflict-resolution publishes: " << report.conflict_resolution_publishes
              << "  max iterations: " << report.max_iterations << "  concurrency: " << report.concurrency << "\n";
    print_violations(report.violations);
  }
  return report.passed() ? kExitPass : kExitViolation;
}

int cmd_states(const std::string& history_path, const std::string& op_text, const CommonOptions& opts) {
  HistoryDocument doc;
  {
    std::ifstream in(history_path);
    if (!in) throw MalformedInput("cannot open " + history_path);
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    Value probe;
    try {
      probe = Value::parse(first);
    } catch (const nlohmann::json::exception&) {
    }
    if (probe.is_object() && probe.value("type", std::string()) == "header") {
      auto trace = read_trace(in);
      doc = {trace.header.spec, trace.header.spec_params, trace.history()};
    } else {
      doc = history_document_from_json(read_json_file(history_path));
    }
  }
  auto spec = make_spec(doc.spec, doc.spec_params);
  const auto id = OpId::parse(op_text);
  const auto& op = doc.history.op(id);
  const auto bound = opts.max_ops ? opts.max_ops : kDefaultStateEnumerationBound;
  auto states = enumerate_system_states(spec, doc.history, id, bound);

  if (opts.json()) {
    Value out = Value::array();
    for (const auto& s : states) {
      auto entry = to_json(s);
      entry["commutes_with_all_subsets"] = commutes_with_all_subsets(spec, s.l, op, s.O, s.O.size());
      out.push_back(std::move(entry));
    }
    std::cout << Value{{"op", op.describe()}, {"count", states.size()}, {"states", out}}.dump(2) << "\n";
  } else {
    std::cout << states.size() << " system state(s) during " << op.describe() << "\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& s = states[i];
      std::cout << "  " << i + 1 << ". l = (";
      for (std::size_t j = 0; j < s.l.size(); ++j) std::cout << (j ? ", " : "") << s.l[j].describe();
      std::cout << ")  O = {";
      bool first = true;
      for (const auto& x : s.O) {
        std::cout << (first ? "" : ", ") << x.describe();
        first = false;
      }
      std::cout << "}  " << (commutes_with_all_subsets(spec, s.l, op, s.O, s.O.size()) ? "commutes" : "CONFLICT")
                << "\n";
    }
  }
  return kExitPass;
}

int cmd_fuzz(const std::string& template_path, const std::string& seeds, const std::string& out_dir,
             const CommonOptions& opts) {
  auto tmpl = scenario_from_json(read_json_file(template_path));
  opts.apply(tmpl);
  auto selection = parse_checks(opts.checks);
  auto [lo, hi] = parse_seed_range(seeds);
  auto results = fuzz(tmpl, lo, hi + 1, selection, opts.bounds());

  std::size_t failed = 0, errors = 0, uses = 0;
  Value failing = Value::array();
  for (const auto& r : results) {
    uses += r.report.consensus_uses;
    if (!r.error.empty()) {
      ++errors;
      failing.push_back(Value{{"seed", r.seed}, {"error", r.error}});
    } else if (!r.report.passed()) {
      ++failed;
      failing.push_back(Value{{"seed", r.seed}, {"violation", to_json(r.report.violations.front())}});
    }
    if (!r.passed() && !out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream out(std::filesystem::path(out_dir) / ("seed-" + std::to_string(r.seed) + ".jsonl"));
      write_trace(out, r.trace);
    }
  }
  if (opts.json()) {
    std::cout << Value{{"seeds", results.size()},
                       {"failed", failed},
                       {"errors", errors},
                       {"consensus_uses", uses},
                       {"failing", failing}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "seeds: " << results.size() << "  failed: " << failed << "  errors: " << errors
              << "  consensus uses: " << uses << "\n";
    for (const auto& f : failing) std::cout << "  seed " << f.at("seed") << ": " << (f.contains("error") ? f.at("error").get<std::string>() : f.at("violation").at("message").get<std::string>()) << "\n";
  }
  if (failed) return kExitViolation;
  return errors ? kExitInput : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamically concurrent universal construction: runner and checkers"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"json", "human"}));
    cmd->add_option("--max-ops", opts.max_ops, "enumeration bound on history operations")->check(CLI::PositiveNumber);
  };

  std::string scenario_path, out_path, trace_path, history_path, op_id, seeds;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write its trace");
  run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_path, "trace output path (line-delimited JSON)");
  run_cmd->add_option("--seed", seed, "use a seeded random schedule instead of the scenario's");
  run_cmd->add_option("--cap", opts.cap, "commutativity enumeration cap")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mutant", opts.mutant, "broken engine variant: skip-commute, stale-deps");
  add_common(run_cmd);

  auto* check_cmd = app.add_subcommand("check", "check a trace");
  check_cmd->add_option("trace", trace_path, "trace file")->required();
  check_cmd->add_option("--checks", opts.checks, "comma-separated subset of lin,graph,dyncon");
  add_common(check_cmd);

  auto* states_cmd = app.add_subcommand("states", "enumerate system states during an operation");
  states_cmd->add_option("history", history_path, "history JSON document or trace file")->required();
  states_cmd->add_option("op", op_id, "operation id, e.g. p3.1")->required();
  add_common(states_cmd);

  auto* fuzz_cmd = app.add_subcommand("fuzz", "run a scenario template under many seeds and check every trace");
  fuzz_cmd->add_option("template", scenario_path, "scenario template JSON file")->required();
  fuzz_cmd->add_option("--seeds", seeds, "inclusive seed range A..B")->required();
  fuzz_cmd->add_option("--checks", opts.checks, "comma-separated subset of lin,graph,dyncon");
  fuzz_cmd->add_option("--cap", opts.cap, "commutativity enumeration cap")->check(CLI::PositiveNumber);
  fuzz_cmd->add_option("--mutant", opts.mutant, "broken engine variant: skip-commute, stale-deps");
  fuzz_cmd->add_option("--out", out_path, "directory receiving traces of failing seeds");
  add_common(fuzz_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(scenario_path, out_path, seed, opts);
    if (*check_cmd) return cmd_check(trace_path, opts);
    if (*states_cmd) return cmd_states(history_path, op_id, opts);
    if (*fuzz_cmd) return cmd_fuzz(scenario_path, seeds, out_path, opts);
  } catch (const MalformedInput& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const CapacityError& ex) {
    std::cerr << "capacity error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const InvariantViolation& ex) {
    std::cerr << "invariant violated: " << ex.what() << "\n";
    return kExitViolation;
  }
  return kExitInput;
}
