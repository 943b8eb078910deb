#include <fstream>
#include <sstream>

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

}  // namespace

TEST_CASE("expressions respect precedence") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  Scope scope;
  scope.declare({"x", int_sort()});
  scope.declare({"y", int_sort()});
  CHECK(to_string(parse_term("x + y * 2", sys.sig, scope)) == "x + y * 2");
  CHECK(to_string(parse_term("(x + y) * 2", sys.sig, scope)) == "(x + y) * 2");
  CHECK(to_string(parse_term("x - (y - 1)", sys.sig, scope)) == "x - (y - 1)");
  CHECK(to_string(parse_term("x - y - 1", sys.sig, scope)) == "x - y - 1");
  CHECK(to_string(parse_term("-3 + x", sys.sig, scope)) == "-3 + x");
  CHECK(to_string(parse_term("x < y && !(y < x) || x = 0", sys.sig, scope)) ==
        "x < y && !(y < x) || x = 0");
  Pattern p = parse_pattern("exists z : Int . [x, z] /\\ z > 0 \\/ [y, 1]", sys.sig, scope);
  CHECK(p.kind() == Pattern::Kind::Exists);
}

TEST_CASE("counter theory loads") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  CHECK(sys.name == "counter");
  REQUIRE(sys.rules.size() == 1);
  CHECK(sys.rules[0].label == "step");
  CHECK(to_string(sys.rules[0]) == "step : [s, i] /\\ i > 0 => [s + i, i - 1]");
  CHECK(sys.sig.cfg_sort().name == "Cfg");
}

TEST_CASE("theory round-trip is a fixed point") {
  ReachabilitySystem a = parse_theory(slurp("counter.theory"));
  std::string text = print_theory(a);
  ReachabilitySystem b = parse_theory(text);
  CHECK(same_system(a, b));
  CHECK(print_theory(b) == text);
}

TEST_CASE("goal files elaborate and round-trip") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  GoalFile file = parse_goal_file(slurp("counter.goals"));
  const RawGoal* raw = file.find("sum_partial");
  REQUIRE(raw);
  Goal g = elaborate_goal(file, *raw, sys.sig, sys.sig, sys.macros);
  CHECK(g.vars.size() == 1);
  CHECK(!g.bound);
  CHECK(g.circularities.size() == 1);
  CHECK(g.instances.expand().size() == 26);
  // SUM(1, n) is expanded at elaboration time.
  CHECK(to_string(g.claim.rhs) == "[n * (n + 1) / 2 - (1 - 1) * 1 / 2, 0]");

  // Macro expansion may pick Nat overloads on the second read, so the
  // fixed point is reached after one emit/load cycle.
  std::string printed = print_goal(g);
  GoalFile again = parse_goal_file(printed);
  REQUIRE(again.goals.size() == 1);
  Goal h = elaborate_goal(again, again.goals[0], sys.sig, sys.sig, sys.macros);
  GoalFile third = parse_goal_file(print_goal(h));
  CHECK(h == elaborate_goal(third, third.goals[0], sys.sig, sys.sig, sys.macros));
  CHECK(print_goal(h) == printed);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_theory("theory t\nsorts Cfg\nrule r : => x\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Parse);
    CHECK(std::string(e.what()).rfind("3:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_theory("theory t\nsorts Cfg\nconfig Cfg\nsymbol f : Int -> Cfg\nrule r : f(true) => f(1)\n"),
                  Error);
}

TEST_CASE("s-expressions round-trip") {
  std::string src = "(node \"Axiom\" (claim \"a \\\"b\\\" c\") (children))\n(x y)";
  auto es = parse_sexprs(src);
  REQUIRE(es.size() == 2);
  CHECK(es[0].is_list("node"));
  CHECK(es[0].items[2].items[1].text == "a \"b\" c");
  for (const auto& e : es) {
    auto back = parse_sexprs(print_sexpr(e));
    REQUIRE(back.size() == 1);
    CHECK(print_sexpr(back[0]) == print_sexpr(e));
  }
  CHECK_THROWS_AS(parse_sexprs("(a (b)"), Error);
}
