// Command-line front end: run, transform, prove, prove-total, check, oracle.
//
// Exit codes: 0 success (Complete, Proved, Ok, Holds); 1 failure (Truncated
// or cycle, Unknown, Reject, counterexample); 2 malformed input; 3
// inconclusive oracle.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rl/lang.hpp"
#include "rl/prover.hpp"
#include "rl/semantics.hpp"
#include "rl/syntax.hpp"
#include "rl/theta.hpp"

using namespace rl;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;
constexpr int kInconclusive = 3;

constexpr const char* kBundledPrefix = "bundled:";

// A path, or "bundled:<name>" for a file compiled into the tool.
std::string read_source(const std::string& path) {
  if (path.rfind(kBundledPrefix, 0) == 0) return std::string(bundled_file(path.substr(std::string_view(kBundledPrefix).size())));
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Input, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::Input, "cannot write " + path);
  out << text;
}

struct SolverFlags {
  std::string path;
  bool disabled = false;
  std::size_t timeout_ms = 5000;

  SolverOptions options() const {
    SolverOptions o;
    o.external = detect_external_solver(path.empty() ? std::nullopt : std::optional<std::string>(path), disabled);
    o.timeout = std::chrono::milliseconds(timeout_ms);
    return o;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--solver", f.path, "External SMT-LIB solver command (overrides RL_SOLVER)");
  cmd->add_flag("--no-external-solver", f.disabled, "Use the builtin procedure only");
  cmd->add_option("--solver-timeout", f.timeout_ms, "External solver timeout in milliseconds");
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string theory, start, imp_file;
  std::vector<std::string> sets;
  std::size_t max_steps = 10000;
  bool detect_cycles = false;
  std::string format = "text";
};

int cmd_run(const RunArgs& a) {
  ReachabilitySystem sys = parse_theory(read_source(a.theory));
  Term start = Term::boolean(false);
  if (!a.imp_file.empty()) {
    if (!a.start.empty()) throw Error(Error::Kind::Input, "give either a start term or --imp, not both");
    std::vector<std::pair<std::string, std::int64_t>> env;
    for (const auto& s : a.sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(Error::Kind::Input, "--set expects name=value, got " + s);
      try {
        env.emplace_back(s.substr(0, eq), std::stoll(s.substr(eq + 1)));
      } catch (const std::exception&) {
        throw Error(Error::Kind::Input, "--set expects an integer value, got " + s);
      }
    }
    start = initial_config(parse_imp(read_source(a.imp_file), sys.sig), imp_env(env, sys.sig), sys.sig);
  } else {
    if (a.start.empty()) throw Error(Error::Kind::Input, "no start term");
    start = parse_term(a.start, sys.sig);
  }
  if (!start.is_ground()) throw Error(Error::Kind::NotGround, "start term is not ground: " + to_string(start));
  if (!sys.sig.has_cfg_sort() || !sort_accepts(sys.sig.cfg_sort(), start.sort())) {
    throw Error(Error::Kind::IllSorted, "start term is not a configuration: " + to_string(start));
  }
  ExecutionResult r = execute(start, sys, a.max_steps, a.detect_cycles);
  if (a.format == "machine") {
    std::cout << nlohmann::json{{"format", "rl-trace"}, {"version", 1}}.dump() << "\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      std::cout << nlohmann::json{{"step", i}, {"config", to_string(r.trace[i])}}.dump() << "\n";
    }
    nlohmann::json end{{"status", to_string(r.status)}, {"steps", r.steps()}};
    if (r.status == ExecStatus::CycleDetected) end["cycle_start"] = r.cycle_index;
    std::cout << end.dump() << "\n";
  } else {
    for (const auto& t : r.trace) std::cout << to_string(t) << "\n";
    if (!a.imp_file.empty()) {
      std::cout << "env:";
      for (const auto& [x, v] : imp_env_bindings(r.trace.back().arg(1))) std::cout << " " << x << "=" << v;
      std::cout << "\n";
    }
    std::cerr << to_string(r.status) << " after " << r.steps() << " steps";
    if (r.status == ExecStatus::CycleDetected) std::cerr << " (repeats step " << r.cycle_index << ")";
    std::cerr << "\n";
  }
  return r.status == ExecStatus::Complete ? kOk : kFail;
}

// ---------------------------------------------------------------------------
// transform

int cmd_transform(const std::string& theory, const std::string& out) {
  ReachabilitySystem sys = parse_theory(read_source(theory));
  write_output(out, print_theory(ext_system(sys)));
  return kOk;
}

// ---------------------------------------------------------------------------
// prove, prove-total

struct ProveArgs {
  std::string theory, goals, goal, emit, bound;
  std::size_t max_depth = ProverConfig{}.max_depth;
  std::size_t max_branches = ProverConfig{}.max_branches;
  SolverFlags solver;
};

int cmd_prove(const ProveArgs& a, bool total) {
  ReachabilitySystem base = parse_theory(read_source(a.theory));
  GoalFile file = parse_goal_file(read_source(a.goals));
  if (total) {
    const RawGoal* raw = file.find(a.goal);
    if (raw && !raw->bound && a.bound.empty()) {
      throw Error(Error::Kind::Input, "goal " + a.goal + " has no bound; give one with --bound");
    }
  }
  PreparedGoal g = prepare_goal(base, file, a.goal, a.bound);
  std::vector<LabeledClaim> hints;
  for (const auto& c : g.goal.circularities) hints.push_back({c.label, c.claim});
  Solver solver(a.solver.options());
  ProverConfig config;
  config.max_depth = a.max_depth;
  config.max_branches = a.max_branches;
  ProveResult r = prove(g.system, Sequent{{}, {}, g.goal.claim}, hints, solver, config);
  std::cerr << "steps: " << r.steps << ", solver queries: " << solver.stats().queries
            << ", external calls: " << solver.stats().external_calls << "\n";
  if (!r.proved) {
    std::cout << "Unknown: " << r.reason << "\n";
    for (const auto& f : r.frontier) std::cout << "  open: " << f << "\n";
    return kFail;
  }
  if (!a.emit.empty()) write_output(a.emit, print_proof(r.tree, g.system.name));
  std::cout << "Proved: " << to_string(g.goal.claim) << " (" << r.tree.size() << " nodes)\n";
  if (g.total) {
    std::cout << base.name << " |=_t " << to_string(g.stated.claim) << "  [variant "
              << to_string(*g.stated.bound) << "]\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const std::string& theory, const std::string& proof_file, const SolverFlags& flags) {
  ReachabilitySystem sys = parse_theory(read_source(theory));
  std::string text = read_source(proof_file);
  // A proof about ext(S) may be checked against the theory of S.
  auto top = parse_sexprs(text);
  if (top.size() == 1 && top[0].is_list("proof") && top[0].items.size() > 1 &&
      top[0].items[1].text == sys.name + ".theta") {
    sys = ext_system(sys);
  }
  ProofTree tree = parse_proof(text, sys);
  Solver solver(flags.options());
  CheckResult c = check_proof(tree, ProofContext{&sys, &solver});
  if (!c.ok) {
    std::cout << "Reject at " << c.path << ": " << c.reason << "\n";
    return kFail;
  }
  std::cout << "Ok: " << to_string(tree.conclusion.claim) << " (" << tree.size() << " nodes)\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

int cmd_oracle(const std::string& theory, const std::string& goals, const std::string& goal,
               const std::string& mode, std::size_t budget) {
  ReachabilitySystem sys = parse_theory(read_source(theory));
  GoalFile file = parse_goal_file(read_source(goals));
  PreparedGoal g = prepare_goal(sys, file, goal);
  auto instances = g.stated.instances.expand();
  if (instances.empty()) throw Error(Error::Kind::Input, "goal " + goal + " lists no instances");
  OracleOptions options;
  options.budget = budget;
  bool inconclusive = false;
  std::size_t checked = 0, vacuous = 0;
  for (const auto& lhs : normalize(g.stated.claim.lhs)) {
    OracleResult r = mode == "total" ? oracle_total(sys, lhs, g.stated.claim.rhs, instances, options)
                                     : oracle_partial(sys, lhs, g.stated.claim.rhs, instances, options);
    checked += r.instances_checked;
    vacuous += r.instances_vacuous;
    if (r.verdict == Verdict::CounterexampleTrace) {
      std::cout << "CounterexampleTrace: " << r.detail << "\n";
      for (const auto& [v, t] : r.instance) std::cout << "  " << v.name << " = " << to_string(t) << "\n";
      for (const auto& t : r.trace) std::cout << "  " << to_string(t) << "\n";
      return kFail;
    }
    if (r.verdict == Verdict::Inconclusive) {
      inconclusive = true;
      std::cout << "Inconclusive: " << r.detail << "\n";
    }
  }
  if (inconclusive) return kInconclusive;
  std::cout << "Holds (" << mode << ") on " << checked << " instances";
  if (vacuous) std::cout << ", " << vacuous << " vacuous";
  std::cout << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachability-logic prover for rewrite-based language definitions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Execute a ground configuration");
  run_cmd->add_option("theory", run.theory, "Theory file")->required();
  run_cmd->add_option("start", run.start, "Start configuration term");
  run_cmd->add_option("--imp", run.imp_file, "IMP program to start from, with an environment from --set");
  run_cmd->add_option("--set", run.sets, "Initial IMP variable, name=value");
  run_cmd->add_option("--max-steps", run.max_steps, "Step budget");
  run_cmd->add_flag("--detect-cycles", run.detect_cycles, "Stop when a configuration repeats");
  run_cmd->add_option("--trace-format", run.format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  std::string transform_theory, transform_out;
  auto* transform_cmd = app.add_subcommand("transform", "Emit the variant extension of a theory");
  transform_cmd->add_option("theory", transform_theory, "Theory file")->required();
  transform_cmd->add_option("--out", transform_out, "Output file (default stdout)");

  ProveArgs prove_args;
  auto add_prove = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("theory", prove_args.theory, "Theory file")->required();
    cmd->add_option("goals", prove_args.goals, "Goal file")->required();
    cmd->add_option("goal", prove_args.goal, "Goal name")->required();
    cmd->add_option("--emit-proof", prove_args.emit, "Write the proof tree to this file ('-' for stdout)");
    cmd->add_option("--max-depth", prove_args.max_depth, "Symbolic steps along one branch");
    cmd->add_option("--max-branches", prove_args.max_branches, "Case splits over the whole search");
    cmd->add_option("--bound", prove_args.bound, "Replace the goal's variant");
    add_solver_flags(cmd, prove_args.solver);
    return cmd;
  };
  auto* prove_cmd = add_prove("prove", "Prove a goal; goals with a bound are proved through the extension");
  auto* total_cmd = add_prove("prove-total", "Prove a goal with a bound for total correctness");

  std::string check_theory, check_proof_file;
  SolverFlags check_solver;
  auto* check_cmd = app.add_subcommand("check", "Check a proof file");
  check_cmd->add_option("theory", check_theory, "Theory file")->required();
  check_cmd->add_option("proof", check_proof_file, "Proof file")->required();
  add_solver_flags(check_cmd, check_solver);

  std::string oracle_theory, oracle_goals, oracle_goal, oracle_mode = "partial";
  std::size_t oracle_budget = OracleOptions{}.budget;
  auto* oracle_cmd = app.add_subcommand("oracle", "Test a goal on its ground instances by execution");
  oracle_cmd->add_option("theory", oracle_theory, "Theory file")->required();
  oracle_cmd->add_option("goals", oracle_goals, "Goal file")->required();
  oracle_cmd->add_option("goal", oracle_goal, "Goal name")->required();
  oracle_cmd->add_option("--mode", oracle_mode, "partial or total")->check(CLI::IsMember({"partial", "total"}));
  oracle_cmd->add_option("--budget", oracle_budget, "Longest path explored");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (transform_cmd->parsed()) return cmd_transform(transform_theory, transform_out);
    if (prove_cmd->parsed()) return cmd_prove(prove_args, false);
    if (total_cmd->parsed()) return cmd_prove(prove_args, true);
    if (check_cmd->parsed()) return cmd_check(check_theory, check_proof_file, check_solver);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_theory, oracle_goals, oracle_goal, oracle_mode, oracle_budget);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
