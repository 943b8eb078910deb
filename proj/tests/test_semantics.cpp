#include <fstream>
#include <random>
#include <sstream>

#include "rl/semantics.hpp"
#include "rl/syntax.hpp"
#include "support.hpp"

using namespace rl;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(RL_BUNDLE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CounterLang {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  GoalFile goals = parse_goal_file(slurp("counter.goals"));

  Term cfg(std::int64_t s, std::int64_t i) const {
    return parse_term("[" + std::to_string(s) + ", " + std::to_string(i) + "]", sys.sig);
  }
  Goal goal(const std::string& name) const {
    return elaborate_goal(goals, *goals.find(name), sys.sig, sys.sig, sys.macros);
  }
};

}  // namespace

TEST_CASE("counter successors") {
  CounterLang c;
  CHECK(successors(c.cfg(0, 2), c.sys) == std::vector<Term>{c.cfg(2, 1)});
  CHECK(successors(c.cfg(3, 0), c.sys).empty());
}

TEST_CASE("counter execution from [0, 3]") {
  CounterLang c;
  ExecutionResult r = execute(c.cfg(0, 3), c.sys, 10, true);
  CHECK(r.status == ExecStatus::Complete);
  CHECK(r.trace == std::vector<Term>{c.cfg(0, 3), c.cfg(3, 2), c.cfg(5, 1), c.cfg(6, 0)});
  CHECK_FALSE(r.branched);
}

TEST_CASE("counter closed form: [0, n] completes in n steps at [n(n+1)/2, 0]") {
  CounterLang c;
  for (std::int64_t n = 0; n <= 50; ++n) {
    ExecutionResult r = execute(c.cfg(0, n), c.sys, 1000, true);
    REQUIRE(r.status == ExecStatus::Complete);
    CHECK(r.steps() == static_cast<std::size_t>(n));
    CHECK(r.trace.back() == c.cfg(n * (n + 1) / 2, 0));
    CHECK(successors(r.trace.back(), c.sys).empty());
  }
}

TEST_CASE("truncation reports the budget") {
  CounterLang c;
  ExecutionResult r = execute(c.cfg(0, 10), c.sys, 4, false);
  CHECK(r.status == ExecStatus::Truncated);
  CHECK(r.budget == 4);
  CHECK(r.steps() == 4);
  CHECK(r.trace.back() == c.cfg(10 + 9 + 8 + 7, 6));
}

TEST_CASE("execution is deterministic for the counter language") {
  CounterLang c;
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-20, 20);
  for (int k = 0; k < 200; ++k) {
    Term g = c.cfg(d(rng), d(rng));
    for (int step = 0; step < 25; ++step) {
      auto next = successors(g, c.sys);
      REQUIRE(next.size() <= 1);
      if (next.empty()) break;
      g = next.front();
    }
  }
}

TEST_CASE("partial oracle on the counter goal") {
  CounterLang c;
  Goal g = c.goal("sum_partial");
  auto lhs = normalize(g.claim.lhs);
  REQUIRE(lhs.size() == 1);
  std::vector<GroundValuation> inst;
  for (std::int64_t n = 0; n <= 10; ++n) inst.push_back({{g.vars[0], Term::integer(n, nat_sort())}});
  OracleResult r = oracle_partial(c.sys, lhs[0], g.claim.rhs, inst);
  CHECK(r.verdict == Verdict::Holds);
  CHECK(r.instances_checked == 11);

  // A wrong postcondition is refuted with the full path.
  Scope scope;
  scope.declare(g.vars[0]);
  Pattern wrong = parse_pattern("[n * n, 0]", c.sys.sig, scope);
  r = oracle_partial(c.sys, lhs[0], wrong, inst);
  CHECK(r.verdict == Verdict::CounterexampleTrace);
  REQUIRE(!r.trace.empty());
  CHECK(successors(r.trace.back(), c.sys).empty());

  // Too small a budget cannot conclude.
  OracleOptions small;
  small.budget = 3;
  r = oracle_partial(c.sys, lhs[0], g.claim.rhs, inst, small);
  CHECK(r.verdict == Verdict::Inconclusive);
}

TEST_CASE("reflexive claims hold") {
  CounterLang c;
  Scope scope;
  Variable s{"s", int_sort()}, i{"i", int_sort()};
  scope.declare(s);
  scope.declare(i);
  Pattern phi = parse_pattern("[s, i] /\\ i >= 0", c.sys.sig, scope);
  auto cp = normalize(phi);
  std::vector<GroundValuation> inst;
  for (std::int64_t a = -3; a <= 3; ++a) {
    for (std::int64_t b = -3; b <= 3; ++b) inst.push_back({{s, Term::integer(a)}, {i, Term::integer(b)}});
  }
  CHECK(oracle_partial(c.sys, cp[0], phi, inst).verdict == Verdict::Holds);
  CHECK(oracle_total(c.sys, cp[0], phi, inst).verdict == Verdict::Holds);
}

TEST_CASE("total oracle refutes a looping system") {
  ReachabilitySystem sys = parse_theory(
      "theory loop\nsorts Cfg\nconfig Cfg\nsymbol c : Int -> Cfg\nvars x : Int\n"
      "rule flip : c(x) /\\ x > 0 => c(0 - x)\n"
      "rule flop : c(x) /\\ x < 0 => c(0 - x)\n");
  Variable x{"x", int_sort()};
  Scope scope;
  scope.declare(x);
  auto lhs = normalize(parse_pattern("c(x)", sys.sig, scope));
  Pattern target = parse_pattern("c(0)", sys.sig, scope);
  std::vector<GroundValuation> inst{{{x, Term::integer(0)}}, {{x, Term::integer(2)}}};
  OracleResult partial = oracle_partial(sys, lhs[0], target, inst);
  CHECK(partial.verdict == Verdict::Holds);
  OracleResult total = oracle_total(sys, lhs[0], target, inst);
  CHECK(total.verdict == Verdict::CounterexampleTrace);
  CHECK(total.trace.size() == 3);
  CHECK(total.trace.front() == total.trace.back());

  ExecutionResult r = execute(parse_term("c(5)", sys.sig), sys, 50, true);
  CHECK(r.status == ExecStatus::CycleDetected);
  CHECK(r.cycle_index == 0);
}

TEST_CASE("branching systems are explored on every path") {
  ReachabilitySystem sys = parse_theory(
      "theory coin\nsorts Cfg\nconfig Cfg\nsymbol c : Int -> Cfg\nvars x : Int\n"
      "rule up : c(x) /\\ x < 3 => c(x + 1)\n"
      "rule down : c(x) /\\ x < 3 => c(x + 10)\n");
  Variable x{"x", int_sort()};
  Scope scope;
  scope.declare(x);
  auto lhs = normalize(parse_pattern("c(x)", sys.sig, scope));
  std::vector<GroundValuation> inst{{{x, Term::integer(0)}}};
  CHECK(execute(parse_term("c(0)", sys.sig), sys, 50, true).branched);
  CHECK(oracle_partial(sys, lhs[0], parse_pattern("c(3)", sys.sig, scope), inst).verdict ==
        Verdict::CounterexampleTrace);
  Pattern done = parse_pattern("exists y : Int . c(y) /\\ y >= 3", sys.sig, scope);
  CHECK(oracle_total(sys, lhs[0], done, inst).verdict == Verdict::Holds);
}

TEST_CASE("weak well-definedness") {
  CounterLang c;
  CHECK(check_weak_well_definedness(c.sys.rules[0]).pass);
  ReachabilitySystem sys = parse_theory(
      "theory fresh\nsorts Cfg\nconfig Cfg\nsymbol c : Int -> Cfg\nvars x y : Int\n"
      "rule r : c(x) => c(y)\n");
  WellDefinedness w = check_weak_well_definedness(sys.rules[0]);
  CHECK_FALSE(w.pass);
  CHECK(w.reason.find("y") != std::string::npos);
  CHECK_THROWS_AS(successors(parse_term("c(1)", sys.sig), sys), Error);
}
