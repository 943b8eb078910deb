#include "rl/semantics.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace rl {

namespace {

// Matching for execution: a Nat variable also accepts a non-negative Int
// literal, since arithmetic results do not always carry the Nat sort.
bool match_config(const Term& pat, const Term& subject, Substitution& sigma) {
  switch (pat.kind()) {
    case Term::Kind::Var: {
      Variable v = pat.variable();
      if (const Term* b = sigma.find(v)) return *b == subject;
      if (v.sort.builtin == BuiltinSort::Nat && subject.kind() == Term::Kind::Int) {
        if (subject.int_value() < 0) return false;
        sigma.bind(v, Term::integer(subject.int_value(), nat_sort()));
        return true;
      }
      if (!sort_accepts(v.sort, subject.sort())) return false;
      sigma.bind(v, subject);
      return true;
    }
    case Term::Kind::App:
      if (!subject.is_app() || !pat.symbol().same_as(subject.symbol())) return false;
      for (std::size_t i = 0; i < pat.args().size(); ++i) {
        if (!match_config(pat.arg(i), subject.arg(i), sigma)) return false;
      }
      return true;
    default:
      return pat == subject;
  }
}

std::optional<Term> eval_or_nothing(const Term& t) {
  try {
    return evaluate_ground(t);
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::DivisionByZero || e.kind() == Error::Kind::NatUnderflow ||
        e.kind() == Error::Kind::Overflow) {
      return std::nullopt;
    }
    throw;
  }
}

void require_bound(const ReachabilityRule& rule, const Substitution& sigma) {
  VarSet rhs = free_vars(rule.rhs.structure);
  for (const auto& v : free_vars(rule.rhs.constraint)) rhs.insert(v);
  for (const auto& v : rule.rhs.existentials) rhs.insert(v);
  for (const auto& v : rhs) {
    if (!sigma.contains(v)) {
      throw Error(Error::Kind::RhsVariableUnbound,
                  "rule " + rule.label + ": variable " + v.name + " is not bound by the left-hand side");
    }
  }
}

}  // namespace

std::vector<Term> successors(const Term& gamma, const ReachabilitySystem& sys) {
  if (!gamma.is_ground()) throw Error(Error::Kind::NotGround, "configuration is not ground");
  std::vector<Term> out;
  for (const auto& rule : sys.rules) {
    Substitution sigma;
    if (!match_config(rule.lhs.structure, gamma, sigma)) continue;
    require_bound(rule, sigma);
    if (!satisfies(gamma, sigma, rule.lhs.constraint)) continue;
    if (!satisfies(gamma, sigma, rule.rhs.constraint)) continue;
    auto next = eval_or_nothing(apply_substitution(sigma, rule.rhs.structure));
    if (!next) continue;
    if (std::find(out.begin(), out.end(), *next) == out.end()) out.push_back(*next);
  }
  return out;
}

ExecutionResult execute(const Term& start, const ReachabilitySystem& sys, std::size_t max_steps,
                        bool detect_cycles) {
  ExecutionResult r;
  std::unordered_map<Term, std::size_t, TermHash> seen;
  Term cur = evaluate_ground(start);
  r.trace.push_back(cur);
  if (detect_cycles) seen.emplace(cur, 0);
  while (true) {
    auto next = successors(cur, sys);
    if (next.empty()) {
      r.status = ExecStatus::Complete;
      return r;
    }
    if (r.steps() >= max_steps) {
      r.status = ExecStatus::Truncated;
      r.budget = max_steps;
      return r;
    }
    if (next.size() > 1) r.branched = true;
    cur = next.front();
    r.trace.push_back(cur);
    if (detect_cycles) {
      auto [it, fresh] = seen.emplace(cur, r.trace.size() - 1);
      if (!fresh) {
        r.status = ExecStatus::CycleDetected;
        r.cycle_index = it->second;
        return r;
      }
    }
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "Holds";
    case Verdict::CounterexampleTrace:
      return "CounterexampleTrace";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

std::string to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::Complete:
      return "Complete";
    case ExecStatus::Truncated:
      return "Truncated";
    case ExecStatus::CycleDetected:
      return "CycleDetected";
  }
  return "?";
}

namespace {

struct Node {
  Term cfg;
  std::size_t parent;
  std::size_t depth;
};

constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

std::vector<Term> path_to(const std::vector<Node>& nodes, std::size_t i) {
  std::vector<Term> path;
  for (; i != kRoot; i = nodes[i].parent) path.push_back(nodes[i].cfg);
  std::reverse(path.begin(), path.end());
  return path;
}

bool on_path(const std::vector<Node>& nodes, std::size_t parent, const Term& cfg) {
  for (std::size_t i = parent; i != kRoot; i = nodes[i].parent) {
    if (nodes[i].cfg.hash() == cfg.hash() && nodes[i].cfg == cfg) return true;
  }
  return false;
}

enum class PathOutcome { Holds, Counterexample, Inconclusive };

// Breadth-first over all paths from one start configuration.
PathOutcome explore(const ReachabilitySystem& sys, const Term& start, const GroundValuation& rho,
                    const Pattern& rhs, bool total, const OracleOptions& opt,
                    std::vector<Term>& trace, std::string& detail) {
  std::vector<Node> nodes{{start, kRoot, 0}};
  std::deque<std::size_t> queue{0};
  bool inconclusive = false;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    const Term cfg = nodes[i].cfg;
    if (satisfies(cfg, rho, rhs, opt.sat)) continue;
    auto next = successors(cfg, sys);
    if (next.empty()) {
      trace = path_to(nodes, i);
      detail = "complete path ends without reaching the target";
      return PathOutcome::Counterexample;
    }
    if (nodes[i].depth >= opt.budget) {
      inconclusive = true;
      detail = "path truncated at " + std::to_string(opt.budget) + " steps";
      continue;
    }
    for (const auto& n : next) {
      if (on_path(nodes, i, n)) {
        if (total) {
          trace = path_to(nodes, i);
          trace.push_back(n);
          detail = "configuration repeats before reaching the target";
          return PathOutcome::Counterexample;
        }
        continue;  // an infinite path never violates partial correctness
      }
      if (nodes.size() >= opt.max_nodes) {
        detail = "explored " + std::to_string(opt.max_nodes) + " configurations";
        return PathOutcome::Inconclusive;
      }
      nodes.push_back({n, i, nodes[i].depth + 1});
      queue.push_back(nodes.size() - 1);
    }
  }
  return inconclusive ? PathOutcome::Inconclusive : PathOutcome::Holds;
}

OracleResult run_oracle(const ReachabilitySystem& sys, const ConstrainedPattern& lhs,
                        const Pattern& rhs, const std::vector<GroundValuation>& instances,
                        const OracleOptions& opt, bool total) {
  OracleResult result;
  SatContext sat = opt.sat;
  if (!sat.sig) sat.sig = &sys.sig;
  OracleOptions options = opt;
  options.sat = sat;
  for (const auto& rho : instances) {
    auto start = eval_or_nothing(apply_substitution(rho, lhs.structure));
    if (!start) {
      ++result.instances_vacuous;
      continue;
    }
    if (!start->is_ground()) {
      throw Error(Error::Kind::NotGround, "instance does not ground " + to_string(lhs.structure));
    }
    if (!satisfies(*start, rho, lhs.constraint, sat)) {
      ++result.instances_vacuous;
      continue;
    }
    ++result.instances_checked;
    std::vector<Term> trace;
    std::string detail;
    switch (explore(sys, *start, rho, rhs, total, options, trace, detail)) {
      case PathOutcome::Holds:
        break;
      case PathOutcome::Counterexample:
        result.verdict = Verdict::CounterexampleTrace;
        result.trace = std::move(trace);
        result.instance = rho;
        result.detail = detail;
        return result;
      case PathOutcome::Inconclusive:
        if (result.verdict == Verdict::Holds) {
          result.verdict = Verdict::Inconclusive;
          result.instance = rho;
          result.detail = detail;
        }
        break;
    }
  }
  return result;
}

}  // namespace

OracleResult oracle_partial(const ReachabilitySystem& sys, const ConstrainedPattern& lhs,
                            const Pattern& rhs, const std::vector<GroundValuation>& instances,
                            const OracleOptions& options) {
  return run_oracle(sys, lhs, rhs, instances, options, false);
}

OracleResult oracle_total(const ReachabilitySystem& sys, const ConstrainedPattern& lhs,
                          const Pattern& rhs, const std::vector<GroundValuation>& instances,
                          const OracleOptions& options) {
  return run_oracle(sys, lhs, rhs, instances, options, true);
}

WellDefinedness check_weak_well_definedness(const ReachabilityRule& rule) {
  WellDefinedness w;
  if (!rule.rhs.constraint.is_true()) {
    w.pass = false;
    w.reason = "right-hand side has a constraint";
    return w;
  }
  VarSet lhs = free_vars(rule.lhs);
  for (const auto& v : free_vars(rule.rhs.structure)) {
    if (!lhs.count(v)) {
      w.pass = false;
      w.reason = "right-hand side introduces " + v.name;
      return w;
    }
  }
  return w;
}

}  // namespace rl
