#include "pattern_gen.hpp"
#include "support.hpp"

#include <random>

using namespace rl;
using rl::testing::Counter;
using rl::testing::PatternGen;
using rl::testing::small_domain;

TEST_CASE("satisfies evaluates basic patterns and predicates") {
  Counter c;
  Term s = c.ivar("s"), i = c.ivar("i");
  GroundValuation rho{{s.variable(), c.num(0)}, {i.variable(), c.num(3)}};
  Pattern phi = Pattern::conj(Pattern::basic(c.conf(s, i)), c.gt(i, c.num(0)));
  CHECK(satisfies(c.conf(c.num(0), c.num(3)), rho, phi));
  CHECK_FALSE(satisfies(c.conf(c.num(0), c.num(0)), rho, phi));
  CHECK_FALSE(satisfies(c.conf(c.num(0), c.num(3)), rho, Pattern::neg(phi)));
  // Basic patterns are compared after evaluation.
  Pattern shifted = Pattern::basic(c.conf(c.add(s, c.num(1)), i));
  CHECK(satisfies(c.conf(c.num(1), c.num(3)), rho, shifted));
}

TEST_CASE("satisfies quantifiers") {
  Counter c;
  Term x = c.ivar("x"), m = c.nvar("m");
  Term gamma = c.conf(c.num(7), c.num(2));
  Pattern p = Pattern::exists(x.variable(), Pattern::basic(c.conf(x, c.num(2))));
  CHECK(satisfies(gamma, {}, p));
  Pattern q = Pattern::exists(x.variable(), Pattern::basic(c.conf(x, c.num(3))));
  CHECK_FALSE(satisfies(gamma, {}, q));
  // A witness outside the search range is found through matching.
  Term big = c.conf(c.num(1000), c.num(1000));
  CHECK(satisfies(big, {}, Pattern::exists(m.variable(), Pattern::basic(c.conf(m, m)))));
  // Nat quantifiers never pick negative values.
  CHECK_FALSE(satisfies(c.conf(c.num(-4), c.num(-4)), {},
                        Pattern::exists(m.variable(), Pattern::basic(c.conf(m, m)))));
  // Structureless bodies without a decider fall back to the range.
  CHECK(satisfies(gamma, {}, Pattern::exists(x.variable(), c.gt(x, c.num(5)))));
  CHECK_THROWS_AS(satisfies(gamma, {}, Pattern::exists(x.variable(), c.gt(x, c.num(500)))), Error);
  CHECK_FALSE(satisfies(gamma, {}, Pattern::forall(x.variable(), c.gt(x, c.num(5)))));

  SatContext ctx;
  ctx.decide = [](const Pattern&) -> std::optional<bool> { return true; };
  CHECK(satisfies(gamma, {}, Pattern::exists(x.variable(), c.gt(x, c.num(500))), ctx));
}

TEST_CASE("Bool and enumerable sorts are expanded") {
  Counter c;
  Sort color{"Color"};
  c.sig.add_sort(color);
  auto red = c.sig.add_symbol({"red", {}, color});
  c.sig.add_symbol({"blue", {}, color});
  Variable k{"k", color};
  auto dom = enumerate_sort(color, &c.sig);
  REQUIRE(dom);
  CHECK(dom->size() == 2);
  Variable b{"b", bool_sort()};
  Pattern taut = Pattern::forall(b, Pattern::disj(Pattern::predicate(Term::var(b)),
                                                  Pattern::neg(Pattern::predicate(Term::var(b)))));
  SatContext ctx;
  ctx.sig = &c.sig;
  CHECK(satisfies(Term::app(c.halt, {}), {}, taut, ctx));
  CHECK_FALSE(enumerate_sort(c.cfg, &c.sig));  // cfg has a non-constant constructor
  (void)red;
  (void)k;
}

TEST_CASE("to_fol replaces basic patterns only") {
  Counter c;
  Term s = c.ivar("s"), i = c.ivar("i");
  Pattern phi = Pattern::conj(Pattern::basic(c.conf(s, i)), c.gt(i, c.num(0)));
  CHECK(to_string(to_fol(phi, c.cfg)) == "(□ == cfg(s, i) /\\ i > 0)");
  CHECK(to_string(to_fol(c.gt(i, c.num(0)), c.cfg)) == "i > 0");

  // ∃m.(cfg(x,0), m) style: equivalence checked over m in 0..10.
  Term m = c.nvar("m"), x = c.ivar("x");
  Pattern ex = Pattern::exists(m.variable(), Pattern::basic(c.conf(x, m)));
  FolFormula f = to_fol(ex, c.cfg);
  CHECK(to_string(f) == "(exists m : Nat . □ == cfg(x, m))");
  auto domain = [](const Sort& s) {
    std::vector<Term> out;
    for (int k = 0; k <= 10; ++k) out.push_back(Term::integer(k, s.builtin == BuiltinSort::Nat ? nat_sort() : int_sort()));
    return out;
  };
  for (int g = -2; g <= 10; ++g) {
    Term gamma = c.conf(c.num(1), c.num(g));
    GroundValuation rho{{x.variable(), c.num(1)}};
    GroundValuation rho_box = rho;
    rho_box.bind(box_variable(c.cfg), gamma);
    CHECK(satisfies(gamma, rho, ex) == fol_holds(rho_box, f, domain));
  }
}

TEST_CASE("normalize") {
  Counter c;
  Term s = c.ivar("s"), i = c.ivar("i");
  Pattern a = c.gt(i, c.num(0)), b = c.eq(i, c.num(0));
  Pattern pi = Pattern::basic(c.conf(s, i)), pi2 = Pattern::basic(Term::app(c.halt, {}));
  auto cps = normalize(Pattern::disj(Pattern::conj(pi, a), Pattern::conj(pi2, b)));
  REQUIRE(cps.size() == 2);
  CHECK(cps[0].structure == c.conf(s, i));
  CHECK(cps[0].constraint == a);
  CHECK(cps[1].structure == Term::app(c.halt, {}));
  CHECK(cps[1].constraint == b);

  Term n1 = c.nvar("n'"), n = c.nvar("n");
  auto ex = normalize(Pattern::exists(n1.variable(), Pattern::conj(Pattern::basic(c.conf(n, n1)),
                                                                   c.ge(n1, c.num(0)))));
  REQUIRE(ex.size() == 1);
  CHECK(ex[0].existentials == std::vector<Variable>{n1.variable()});
  CHECK(ex[0].constraint == c.ge(n1, c.num(0)));

  CHECK_THROWS_AS(normalize(a), Error);
  CHECK_THROWS_AS(normalize(Pattern::neg(pi)), Error);
  CHECK_THROWS_AS(normalize(Pattern::conj(pi, pi2)), Error);
}

TEST_CASE("normalize renames existentials captured by an outer constraint") {
  Counter c;
  Term x = c.ivar("x");
  // (∃x. cfg(x, 0)) ∧ x > 0 : the outer x is free.
  Pattern p = Pattern::conj(Pattern::exists(x.variable(), Pattern::basic(c.conf(x, c.num(0)))),
                            c.gt(x, c.num(0)));
  auto cps = normalize(p);
  REQUIRE(cps.size() == 1);
  REQUIRE(cps[0].existentials.size() == 1);
  CHECK(cps[0].existentials[0].name != "x");
  CHECK(free_vars(cps[0]) == VarSet{x.variable()});
}

TEST_CASE("is_structureless") {
  Counter c;
  Term z = c.ivar("z"), i = c.ivar("i");
  CHECK(is_structureless(c.ge(z, c.num(0))));
  CHECK_FALSE(is_structureless(Pattern::basic(Term::app(c.halt, {}))));
  CHECK(is_structureless(Pattern::conj(Pattern::neg(c.gt(i, c.num(0))), c.eq(i, c.num(0)))));
}

TEST_CASE("capture-avoiding substitution") {
  Counter c;
  Term x = c.ivar("x"), y = c.ivar("y");
  Pattern p = Pattern::exists(x.variable(), c.gt(x, y));
  Pattern q = apply_substitution(Substitution{{y.variable(), x}}, p);
  REQUIRE(q.kind() == Pattern::Kind::Exists);
  CHECK(q.var().name != "x");
  CHECK(free_vars(q) == VarSet{x.variable()});
}

// --- properties -----------------------------------------------------------


TEST_CASE("property: satisfaction agrees with the first-order translation") {
  Counter c;
  PatternGen g{c, std::mt19937(17)};
  SatContext ctx;
  ctx.bound = 3;
  int decided = 0;
  for (int k = 0; k < 600; ++k) {
    Pattern phi = g.gen(3, g.free, true);
    Term gamma = c.conf(c.num(g.pick(7) - 3), c.num(g.pick(7) - 3));
    GroundValuation rho{{g.free[0], c.num(g.pick(7) - 3)}, {g.free[1], c.num(g.pick(7) - 3)}};
    bool sat = false;
    try {
      sat = satisfies(gamma, rho, phi, ctx);
    } catch (const Error& e) {
      REQUIRE(e.kind() == Error::Kind::NonEnumerableQuantifier);
      continue;
    }
    ++decided;
    GroundValuation rho_box = rho;
    rho_box.bind(box_variable(c.cfg), gamma);
    INFO(to_string(phi));
    CHECK(sat == fol_holds(rho_box, to_fol(phi, c.cfg), small_domain));
  }
  CHECK(decided > 300);
}

TEST_CASE("property: normalize preserves satisfaction") {
  Counter c;
  PatternGen g{c, std::mt19937(23)};
  int checked = 0;
  for (int k = 0; k < 600; ++k) {
    // Build shapes inside the supported fragment.
    Pattern phi = Pattern::basic(c.conf(g.value(g.free), g.value(g.free)));
    int parts = 1 + g.pick(3);
    for (int j = 0; j < parts; ++j) {
      Variable v{"e" + std::to_string(j), int_sort()};
      auto scope = g.free;
      scope.push_back(v);
      Pattern piece = Pattern::conj(Pattern::basic(c.conf(Term::var(v), g.value(scope))),
                                    g.gen(2, scope, false));
      phi = Pattern::disj(phi, g.pick(2) ? Pattern::exists(v, piece) : piece);
    }
    if (g.pick(2)) phi = Pattern::conj(phi, g.gen(1, g.free, false));
    auto cps = normalize(phi);
    Pattern back = Pattern::disj_all([&] {
      std::vector<Pattern> ps;
      for (const auto& cp : cps) ps.push_back(cp.to_pattern());
      return ps;
    }());
    for (int t = 0; t < 5; ++t) {
      Term gamma = c.conf(c.num(g.pick(7) - 3), c.num(g.pick(7) - 3));
      GroundValuation rho{{g.free[0], c.num(g.pick(7) - 3)}, {g.free[1], c.num(g.pick(7) - 3)}};
      for (int j = 0; j < 3; ++j) rho.bind(Variable{"e" + std::to_string(j), int_sort()}, c.num(g.pick(7) - 3));
      try {
        bool a = satisfies(gamma, rho, phi);
        bool b = satisfies(gamma, rho, back);
        INFO(to_string(phi));
        CHECK(a == b);
        ++checked;
      } catch (const Error& e) {
        REQUIRE(e.kind() == Error::Kind::NonEnumerableQuantifier);
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("property: forall is the dual of exists") {
  Counter c;
  PatternGen g{c, std::mt19937(29)};
  SatContext ctx;
  ctx.bound = 3;
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    Variable v{"w", g.pick(2) ? nat_sort() : int_sort()};
    auto scope = g.free;
    scope.push_back(v);
    Pattern body = g.gen(2, scope, true);
    Term gamma = c.conf(c.num(g.pick(7) - 3), c.num(g.pick(7) - 3));
    GroundValuation rho{{g.free[0], c.num(g.pick(7) - 3)}, {g.free[1], c.num(g.pick(7) - 3)}};
    try {
      bool lhs = satisfies(gamma, rho, Pattern::forall(v, body), ctx);
      bool rhs = !satisfies(gamma, rho, Pattern::exists(v, Pattern::neg(body)), ctx);
      CHECK(lhs == rhs);
      ++checked;
    } catch (const Error& e) {
      REQUIRE(e.kind() == Error::Kind::NonEnumerableQuantifier);
    }
  }
  CHECK(checked > 100);
}
