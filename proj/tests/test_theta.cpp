#include <fstream>
#include <random>
#include <sstream>

#include "rl/semantics.hpp"
#include "rl/syntax.hpp"
#include "rl/theta.hpp"
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

std::size_t count_basic(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return 1;
    case Pattern::Kind::Predicate:
      return 0;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      return count_basic(p.left()) + count_basic(p.right());
    default:
      return count_basic(p.body());
  }
}

bool all_pairs_with(const Pattern& p, const Term& n) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return p.term().is_app() && p.term().symbol().builtin == Builtin::Pair && p.term().arg(1) == n;
    case Pattern::Kind::Predicate:
      return true;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      return all_pairs_with(p.left(), n) && all_pairs_with(p.right(), n);
    default:
      return all_pairs_with(p.body(), n);
  }
}

Term nat(std::int64_t v) { return Term::integer(v, nat_sort()); }

}  // namespace

TEST_CASE("the counter rule gains a decreasing variant") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ReachabilitySystem ext = ext_system(sys);
  REQUIRE(ext.rules.size() == 1);
  CHECK(to_string(ext.rules[0]) ==
        "step.theta : ([s, i], n) /\\ i > 0 /\\ n >= 1 => ([s + i, i - 1], n - 1)");
  CHECK(ext.sig.cfg_sort().name == "Cfg'");
}

TEST_CASE("the extended counter theory matches its golden file") {
  ReachabilitySystem ext = ext_system(parse_theory(slurp("counter.theory")));
  std::string golden = slurp("counter.theta.theory");
  CHECK(print_theory(ext) == golden);
  CHECK(same_system(parse_theory(golden), ext));
}

TEST_CASE("extending twice is rejected") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ExtendedSignature once = ext_signature(sys.sig);
  CHECK_THROWS_AS(ext_signature(once.sig), Error);
  try {
    ext_system(ext_system(sys));
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::NameCollision);
  }
}

TEST_CASE("the fresh variant avoids rule variables") {
  ReachabilitySystem sys = parse_theory(
      "theory t\nsorts Cfg\nconfig Cfg\nsymbol c : Int Int -> Cfg\nvars n n0 : Int\n"
      "rule r : c(n, n0) => c(n0, n)\n");
  ReachabilitySystem ext = ext_system(sys);
  CHECK(to_string(ext.rules[0]) == "r.theta : (c(n, n0), n1) /\\ n1 >= 1 => (c(n0, n), n1 - 1)");
}

TEST_CASE("an empty system stays empty") {
  ReachabilitySystem sys = parse_theory("theory t\nsorts Cfg\nconfig Cfg\nsymbol c : Int -> Cfg\n");
  CHECK(ext_system(sys).rules.empty());
}

TEST_CASE("ext on patterns") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ExtendedSignature ext = ext_signature(sys.sig);
  Scope scope;
  Variable z{"z", int_sort()}, n{"n", nat_sort()}, e{"e", int_sort()};
  scope.declare(z);
  scope.declare(n);
  scope.declare(e);
  Term nv = Term::var(n);

  Pattern c = parse_pattern("z >= 0", sys.sig, scope);
  CHECK(ext_pattern(c, nv, ext) == c);

  Pattern pc = parse_pattern("[z, 1] /\\ z >= 0", sys.sig, scope);
  CHECK(to_string(ext_pattern(pc, nv, ext)) == "([z, 1], n) /\\ z >= 0");

  Pattern ex = parse_pattern("exists e : Int . [e, z] /\\ e > z", sys.sig, scope);
  CHECK(to_string(ext_pattern(ex, nv, ext)) == "exists e : Int . ([e, z], n) /\\ e > z");

  // The bound variable is renamed rather than capturing the variant.
  Pattern cap = parse_pattern("exists n : Nat . [n, z]", sys.sig, scope);
  Pattern out = ext_pattern(cap, nv, ext);
  CHECK(out.kind() == Pattern::Kind::Exists);
  CHECK(out.var().name != "n");
  CHECK(free_vars(out).count(n) == 1);

  Term bound = parse_term("200 * abs(z) + 200", ext.sig, scope, &nat_sort());
  Pattern basic = parse_pattern("[0, z]", sys.sig, scope);
  CHECK(to_string(ext_pattern(basic, bound, ext)) == "([0, z], 200 * abs(z) + 200)");

  Pattern mixed = parse_pattern("([z, 0] \\/ [0, z]) /\\ !(z = 3)", sys.sig, scope);
  Pattern m2 = ext_pattern(mixed, nv, ext);
  CHECK(count_basic(m2) == 2);
  CHECK(all_pairs_with(m2, nv));
  CHECK(is_structureless(m2) == is_structureless(mixed));
}

TEST_CASE("total goals are restated over the extension") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ExtendedSignature ext = ext_signature(sys.sig);
  GoalFile file = parse_goal_file(slurp("counter.goals"));
  Goal g = elaborate_goal(file, *file.find("sum_total"), sys.sig, ext.sig, sys.macros);
  REQUIRE(g.bound);
  Goal t = make_total_goal(g, ext);
  CHECK(to_string(t.claim.lhs) == "([0, n], n)");
  CHECK(to_string(t.claim.rhs) == "exists m : Nat . ([n * (n + 1) / 2 - (1 - 1) * 1 / 2, 0], m)");
  CHECK(!t.bound);

  // The hand-written extended goal states the same claim.
  Goal direct = elaborate_goal(file, *file.find("sum_ext"), ext.sig, ext.sig, sys.macros);
  CHECK(direct.claim == t.claim);

  // Without a preferred name the variant is called M.
  Claim c = make_total_goal(TotalGoal{g.claim.lhs, g.claim.rhs, nat(0), ""}, ext);
  CHECK(to_string(c.lhs) == "([0, n], 0)");
  CHECK(c.rhs.var().name == "M");
}

TEST_CASE("step simulation and well-foundedness on the counter language") {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ExtendedSignature ext = ext_signature(sys.sig);
  ReachabilitySystem es = ext_system(sys);
  auto cfg = [&](std::int64_t s, std::int64_t i) {
    return parse_term("[" + std::to_string(s) + ", " + std::to_string(i) + "]", sys.sig);
  };
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::int64_t> d(-10, 30);
  for (int trial = 0; trial < 200; ++trial) {
    Term g = cfg(d(rng), d(rng));
    std::int64_t k = trial % 8;
    auto base = successors(g, sys);
    auto lifted = successors(ext.make_pair(g, nat(k)), es);
    if (k == 0) {
      CHECK(lifted.empty());
      continue;
    }
    REQUIRE(lifted.size() == base.size());
    for (std::size_t j = 0; j < base.size(); ++j) CHECK(lifted[j] == ext.make_pair(base[j], nat(k - 1)));
  }
  for (std::int64_t k = 0; k <= 50; ++k) {
    for (std::int64_t i = 0; i <= 50; i += 7) {
      ExecutionResult r = execute(ext.make_pair(cfg(0, i), nat(k)), es, 1000, true);
      CHECK(r.status == ExecStatus::Complete);
      CHECK(r.steps() <= static_cast<std::size_t>(k));
      CHECK(r.steps() == static_cast<std::size_t>(std::min(i, k)));
    }
  }
}
