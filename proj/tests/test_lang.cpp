#include <random>

#include "imp_gen.hpp"
#include "rl/lang.hpp"
#include "rl/prover.hpp"
#include "rl/semantics.hpp"
#include "rl/syntax.hpp"
#include "rl/theta.hpp"
#include "support.hpp"

using namespace rl;
using rl::testing::ImpGen;

namespace {

const ReachabilitySystem& imp() {
  static const ReachabilitySystem sys = imp_system();
  return sys;
}

Term imp_term(const std::string& text) { return parse_term(text, imp().sig); }

std::int64_t lookup_in(const Term& config, const std::string& x) {
  const Term& env = config.arg(1);
  Term q = Term::app(imp().sig.find_builtin(Builtin::Lookup), {Term::atom(x, imp().sig.sort("Id")), env});
  return evaluate_ground(q).int_value();
}

bool at_final_skip(const Term& config) {
  return config.arg(0) == imp_term("cons(stmt(skip), nil)");
}

ExecutionResult run_sum(std::int64_t m, std::size_t budget = 100000) {
  Term p = parse_imp(bundled_file("sum.imp"), imp().sig);
  return execute(initial_config(p, imp_env({{"m", m}}, imp().sig), imp().sig), imp(), budget, true);
}

std::size_t steps_to_final_skip(const ExecutionResult& r) {
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (at_final_skip(r.trace[i])) return i;
  }
  return r.trace.size();
}

const char* kSumTerm =
    "seq(assign(s, int(0)), while(not(eq(int(0), id(m))), "
    "seq(assign(s, plus(id(s), id(m))), assign(m, plus(id(m), int(-1))))))";

}  // namespace

TEST_CASE("the bundled theories load") {
  CHECK(imp().rules.size() == 29);
  for (const auto& r : imp().rules) CHECK_MESSAGE(check_weak_well_definedness(r).pass, r.label);
  CHECK(counter_system().rules.size() == 1);
  CHECK(imp_goals().find("sum_total"));
  CHECK(counter_goals().find("sum_total"));
  CHECK_THROWS_AS(bundled_file("nothing.here"), Error);
  // Every bundled goal elaborates.
  for (const auto& g : imp_goals().goals) CHECK_NOTHROW(prepare_goal(imp(), imp_goals(), g.name));
  for (const auto& g : counter_goals().goals) {
    if (g.name != "sum_ext") CHECK_NOTHROW(prepare_goal(counter_system(), counter_goals(), g.name));
  }
}

TEST_CASE("IMP concrete syntax") {
  CHECK(parse_imp("s := 0", imp().sig) == imp_term("assign(s, int(0))"));
  CHECK(parse_imp(bundled_file("sum.imp"), imp().sig) == imp_term(kSumTerm));
  CHECK(parse_imp("x := 1; y := 2; z := 3", imp().sig) ==
        imp_term("seq(assign(x, int(1)), seq(assign(y, int(2)), assign(z, int(3))))"));
  CHECK(parse_imp("x := 1\n\n# note\ny := 2\n", imp().sig) ==
        imp_term("seq(assign(x, int(1)), assign(y, int(2)))"));
  CHECK(parse_imp("(x := 1; y := 2); z := 3", imp().sig) ==
        imp_term("seq(seq(assign(x, int(1)), assign(y, int(2))), assign(z, int(3)))"));
  CHECK(parse_imp("if x < 2 then skip else x := x + -1 - 2", imp().sig) ==
        imp_term("ite(lt(id(x), int(2)), skip, assign(x, plus(plus(id(x), int(-1)), int(-2))))"));
  CHECK(parse_imp("while not not (x + 1 = (y)) do skip", imp().sig) ==
        imp_term("while(not(not(eq(plus(id(x), int(1)), id(y)))), skip)"));
  CHECK(parse_imp("x := (1 + 2) + (3 + 4)", imp().sig) ==
        imp_term("assign(x, plus(plus(int(1), int(2)), plus(int(3), int(4))))"));

  for (const char* bad : {"while do", "x := a - b", "x := ", "if true then skip", "x := 1;", "skip skip",
                          "while := 1", "(skip", "x := 1 $", "not := 2", ""}) {
    CHECK_THROWS_AS(parse_imp(bad, imp().sig), Error);
  }
  try {
    parse_imp("x := 1\ny := + 2", imp().sig);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Parse);
    CHECK(std::string(e.what()).find("line 2, column 6") != std::string::npos);
  }
}

TEST_CASE("printing IMP parses back to the same term") {
  Term sum = parse_imp(bundled_file("sum.imp"), imp().sig);
  CHECK(print_imp(sum) == "s := 0; while not (0 = m) do s := s + m; m := m - 1");
  CHECK(parse_imp(print_imp(sum), imp().sig) == sum);
  ImpGen gen(imp().sig, 7);
  for (int i = 0; i < 500; ++i) {
    Term p = gen.stmt(4);
    std::string text = print_imp(p);
    CHECK_MESSAGE(parse_imp(text, imp().sig) == p, text);
  }
  CHECK_THROWS_AS(print_imp(imp_term("assign(x, int(lookup(x, env0)))")), Error);
}

TEST_CASE("initial configurations") {
  CHECK(initial_config(imp_term("skip"), imp_term("env0"), imp().sig) ==
        imp_term("cfg(cons(stmt(skip), nil), env0)"));
  Term preset = initial_config(imp_term("skip"), imp_env({{"m", 5}}, imp().sig), imp().sig);
  CHECK(lookup_in(preset, "m") == 5);
}

TEST_CASE("IMP execution") {
  ExecutionResult two = execute(imp_term("cfg(cons(stmt(seq(skip, skip)), nil), env0)"), imp(), 100, true);
  CHECK(two.status == ExecStatus::Complete);
  REQUIRE(two.steps() == 3);
  CHECK(two.trace[1] == imp_term("cfg(cons(stmt(skip), cons(stmt(skip), nil)), env0)"));
  CHECK(two.trace[3] == imp_term("cfg(nil, env0)"));

  ExecutionResult spin = execute(imp_term("cfg(cons(stmt(while(bool(true), skip)), nil), env0)"), imp(), 1000, true);
  CHECK(spin.status == ExecStatus::CycleDetected);

  Term branch = parse_imp("if not (0 = 0) then s := 1 else s := 2", imp().sig);
  ExecutionResult b = execute(initial_config(branch, imp_term("env0"), imp().sig), imp(), 1000, true);
  CHECK(b.status == ExecStatus::Complete);
  CHECK(lookup_in(b.trace.back(), "s") == 2);

  ExecutionResult three = run_sum(3);
  CHECK(three.status == ExecStatus::Complete);
  CHECK(lookup_in(three.trace.back(), "s") == 6);
}

TEST_CASE("SUM computes triangular numbers within its bound") {
  for (std::int64_t m = 0; m <= 20; ++m) {
    ExecutionResult r = run_sum(m);
    REQUIRE(r.status == ExecStatus::Complete);
    CHECK(!r.branched);
    CHECK(lookup_in(r.trace.back(), "s") == m * (m + 1) / 2);
    std::size_t to_skip = steps_to_final_skip(r);
    CHECK(to_skip == static_cast<std::size_t>(30 * m + 13));
    CHECK(to_skip <= static_cast<std::size_t>(200 * m + 200));
    CHECK(r.steps() == to_skip + 1);
  }
  // A negative m counts down forever.
  ExecutionResult down = run_sum(-1, 10000);
  CHECK(down.status == ExecStatus::Truncated);
  CHECK(steps_to_final_skip(down) == down.trace.size());
}

TEST_CASE("every reachable IMP configuration has exactly one successor") {
  for (const auto& g : rl::testing::reachable_imp_configs(imp(), 2000, 3)) {
    auto next = successors(g, imp());
    if (g.arg(0) == imp_term("nil")) {
      CHECK(next.empty());
    } else {
      CHECK_MESSAGE(next.size() == 1, to_string(g));
    }
  }
}

TEST_CASE("step simulation and well-foundedness on IMP") {
  ExtendedSignature ext = ext_signature(imp().sig);
  ReachabilitySystem es = ext_system(imp());
  std::mt19937 rng(5);
  for (const auto& g : rl::testing::reachable_imp_configs(imp(), 500, 9)) {
    std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, 40)(rng);
    auto base = successors(g, imp());
    auto lifted = successors(ext.make_pair(g, Term::integer(k, nat_sort())), es);
    if (k == 0) {
      CHECK(lifted.empty());
    } else {
      REQUIRE(lifted.size() == base.size());
      for (std::size_t j = 0; j < base.size(); ++j) {
        CHECK(lifted[j] == ext.make_pair(base[j], Term::integer(k - 1, nat_sort())));
      }
    }
    ExecutionResult r = execute(ext.make_pair(g, Term::integer(k, nat_sort())), es, 1000, false);
    CHECK(r.status == ExecStatus::Complete);
    CHECK(r.steps() <= static_cast<std::size_t>(k));
  }
}

TEST_CASE("symbolic steps in IMP and in the extended counter") {
  Solver solver(SolverOptions{""});
  Scope scope;
  scope.declare(Variable{"T", imp().sig.sort("Stack")});
  scope.declare(Variable{"env", imp().sig.sort("Env")});
  auto cp = normalize(parse_pattern("cfg(cons(stmt(skip), T), env)", imp().sig, scope));
  REQUIRE(cp.size() == 1);
  SymbolicStep s = symbolic_step(cp[0], imp(), solver);
  REQUIRE(s.successors.size() == 1);
  CHECK(s.rules == std::vector<std::string>{"skip"});
  CHECK(to_string(s.successors[0].to_pattern()) == "cfg(T, env)");
  CHECK(s.covered);

  ReachabilitySystem counter = counter_system();
  ReachabilitySystem ec = ext_system(counter);
  Scope cs;
  cs.declare(Variable{"x", int_sort()});
  cs.declare(Variable{"k", nat_sort()});
  auto stuck = normalize(parse_pattern("([x, 0], k) /\\ k >= 1", ec.sig, cs));
  SymbolicStep none = symbolic_step(stuck[0], ec, solver);
  CHECK(none.successors.empty());
  CHECK(!none.covered);
}

TEST_CASE("SUM goals with the builtin solver") {
  Solver solver(SolverOptions{""});
  GoalFile goals = imp_goals();

  PreparedGoal total = prepare_goal(imp(), goals, "sum_total");
  REQUIRE(total.total);
  std::vector<LabeledClaim> hints;
  for (const auto& c : total.goal.circularities) hints.push_back({c.label, c.claim});
  ProveResult r = prove(total.system, Sequent{{}, {}, total.goal.claim}, hints, solver);
  CHECK_MESSAGE(r.proved, r.reason);
  CHECK(check_proof(parse_proof(print_proof(r.tree, total.system.name), total.system),
                    ProofContext{&total.system, &solver})
            .ok);

  PreparedGoal partial = prepare_goal(imp(), goals, "sum_partial");
  hints.clear();
  for (const auto& c : partial.goal.circularities) hints.push_back({c.label, c.claim});
  CHECK(prove(partial.system, Sequent{{}, {}, partial.goal.claim}, hints, solver).proved);

  PreparedGoal unbounded = prepare_goal(imp(), goals, "sum_total_unbounded");
  hints.clear();
  for (const auto& c : unbounded.goal.circularities) hints.push_back({c.label, c.claim});
  CHECK(!prove(unbounded.system, Sequent{{}, {}, unbounded.goal.claim}, hints, solver).proved);

  PreparedGoal tight = prepare_goal(imp(), goals, "sum_total", "1");
  hints.clear();
  for (const auto& c : tight.goal.circularities) hints.push_back({c.label, c.claim});
  CHECK(!prove(tight.system, Sequent{{}, {}, tight.goal.claim}, hints, solver).proved);
  CHECK(solver.stats().external_calls == 0);
}

TEST_CASE("oracles agree with the SUM goals") {
  GoalFile goals = imp_goals();
  PreparedGoal total = prepare_goal(imp(), goals, "sum_total");
  auto lhs = normalize(total.stated.claim.lhs);
  REQUIRE(lhs.size() == 1);
  auto instances = total.stated.instances.expand();
  REQUIRE(instances.size() == 11);
  CHECK(oracle_total(imp(), lhs[0], total.stated.claim.rhs, instances).verdict == Verdict::Holds);

  PreparedGoal unbounded = prepare_goal(imp(), goals, "sum_total_unbounded");
  auto ulhs = normalize(unbounded.stated.claim.lhs);
  OracleOptions small;
  small.budget = 2000;
  OracleResult u = oracle_total(imp(), ulhs[0], unbounded.stated.claim.rhs, unbounded.stated.instances.expand(), small);
  CHECK(u.verdict != Verdict::Holds);
}
