#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "rl/prover.hpp"
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

struct CounterFixture {
  ReachabilitySystem sys = parse_theory(slurp("counter.theory"));
  ReachabilitySystem ext = ext_system(sys);
  GoalFile goals = parse_goal_file(slurp("counter.goals"));
  Solver solver{SolverOptions{""}};

  ProofContext ctx(const ReachabilitySystem& s) { return {&s, &solver}; }
  Goal goal(const std::string& name, const ReachabilitySystem& s) {
    return elaborate_goal(goals, *goals.find(name), s.sig, s.sig, sys.macros);
  }
};

std::vector<LabeledClaim> hints_of(const Goal& g) {
  std::vector<LabeledClaim> out;
  for (const auto& c : g.circularities) out.push_back({c.label, c.claim});
  return out;
}

// Preorder paths of every node, as check_proof reports them.
void paths(const ProofTree& t, const std::string& at, std::vector<std::string>& out) {
  out.push_back(at.empty() ? "/" : at);
  for (std::size_t i = 0; i < t.premises.size(); ++i) paths(t.premises[i], at + "/" + std::to_string(i), out);
}

ProofTree& node_at(ProofTree& t, const std::string& path) {
  ProofTree* n = &t;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) n = &n->premises.at(std::stoul(part));
  }
  return *n;
}

constexpr ProofRule kRules[] = {ProofRule::Step,        ProofRule::Axiom,       ProofRule::Transitivity,
                                ProofRule::CaseAnalysis, ProofRule::Circularity, ProofRule::Abstraction,
                                ProofRule::Reflexivity, ProofRule::Consequence};

}  // namespace

TEST_CASE("the hand-written counter derivation checks") {
  CounterFixture f;
  ProofTree t = parse_proof(slurp("counter-total.proof"), f.ext);
  CHECK(t.size() == 14);
  CheckResult r = check_proof(t, f.ctx(f.ext));
  CHECK_MESSAGE(r.ok, r.path << ": " << r.reason);
  CHECK(!is_progressive(t.premises[0]));
  CHECK(is_progressive(node_at(t, "/1/0/0/0")));
  CHECK(!is_progressive(node_at(t, "/1/0/0/1")));

  // It proves the total-correctness goal derived from the original claim.
  ExtendedSignature es = ext_signature(f.sys.sig);
  Goal raw = elaborate_goal(f.goals, *f.goals.find("sum_total"), f.sys.sig, es.sig, f.sys.macros);
  Goal total = make_total_goal(raw, es);
  CHECK(to_string(t.conclusion.claim.lhs) == to_string(total.claim.lhs));
  CHECK(to_string(t.conclusion.claim.rhs) == to_string(total.claim.rhs));
}

TEST_CASE("every single-node mutation of the counter derivation is rejected at that node") {
  CounterFixture f;
  const ProofTree golden = parse_proof(slurp("counter-total.proof"), f.ext);
  std::vector<std::string> all;
  paths(golden, "", all);
  REQUIRE(all.size() == 14);
  std::size_t mutations = 0;
  auto expect_rejected = [&](const ProofTree& t, const std::string& path, const std::string& what) {
    ++mutations;
    CheckResult r = check_proof(t, f.ctx(f.ext));
    CHECK_MESSAGE(!r.ok, what << " at " << path);
    CHECK_MESSAGE(r.path == path, what << " at " << path << " rejected at " << r.path << ": " << r.reason);
  };
  for (const auto& path : all) {
    // Wrong rule name.
    for (ProofRule other : kRules) {
      ProofTree t = golden;
      ProofTree& n = node_at(t, path);
      if (n.rule == other) continue;
      n.rule = other;
      expect_rejected(t, path, to_string(other));
    }
    // Flipped implication.
    {
      ProofTree t = golden;
      ProofTree& n = node_at(t, path);
      if (n.rule != ProofRule::Reflexivity) {
        std::swap(n.conclusion.claim.lhs, n.conclusion.claim.rhs);
        expect_rejected(t, path, "flipped");
      }
    }
    // Dropped premise.
    for (std::size_t i = 0; i < node_at(const_cast<ProofTree&>(golden), path).premises.size(); ++i) {
      ProofTree t = golden;
      ProofTree& n = node_at(t, path);
      n.premises.erase(n.premises.begin() + static_cast<std::ptrdiff_t>(i));
      expect_rejected(t, path, "dropped premise " + std::to_string(i));
    }
  }
  CHECK(mutations >= 14);
}

TEST_CASE("the derivation survives printing and reading back") {
  CounterFixture f;
  ProofTree t = parse_proof(slurp("counter-total.proof"), f.ext);
  std::string printed = print_proof(t, f.ext.name);
  ProofTree back = parse_proof(printed, f.ext);
  CHECK(print_proof(back, f.ext.name) == printed);
  CHECK(check_proof(back, f.ctx(f.ext)).ok);
  CHECK_THROWS_AS(parse_proof(printed, f.sys), Error);
  CHECK_THROWS_AS(parse_proof("(proof counter.theta (node Magic (vars) (lhs \"[0, 0]\") (rhs \"[0, 0]\") (axioms) (circularities)))", f.ext), Error);
}

TEST_CASE("single-rule derivations") {
  CounterFixture f;
  Scope scope;
  scope.declare({"n", nat_sort()});
  auto claim = [&](const char* lhs, const char* rhs) {
    return Claim{parse_pattern(lhs, f.sys.sig, scope), parse_pattern(rhs, f.sys.sig, scope)};
  };
  ProofTree refl;
  refl.rule = ProofRule::Reflexivity;
  refl.conclusion.claim = claim("[0, n]", "[0, n]");
  CHECK(check_proof(refl, f.ctx(f.sys)).ok);
  refl.conclusion.claim = claim("[0, n]", "[1, n]");
  CHECK(!check_proof(refl, f.ctx(f.sys)).ok);

  ProofTree step;
  step.rule = ProofRule::Step;
  step.conclusion.claim = claim("[0, n] /\\ n > 0", "[n, n - 1]");
  CHECK(check_proof(step, f.ctx(f.sys)).ok);
  // Without the guard some instances are stuck, so Step does not apply.
  step.conclusion.claim = claim("[0, n]", "[n, n - 1]");
  CheckResult r = check_proof(step, f.ctx(f.sys));
  CHECK(!r.ok);
  CHECK(r.reason.find("cover") != std::string::npos);
  // A wrong successor.
  step.conclusion.claim = claim("[0, n] /\\ n > 0", "[n + 1, n - 1]");
  CHECK(!check_proof(step, f.ctx(f.sys)).ok);
}

TEST_CASE("transitivity must not carry circularities into its second premise") {
  CounterFixture f;
  Scope scope;
  scope.declare({"n", nat_sort()});
  auto P = [&](const char* s) { return parse_pattern(s, f.sys.sig, scope); };
  LabeledClaim c{"c", Claim{P("[0, n] /\\ n > 0"), P("[n, n - 1]")}};

  ProofTree step;
  step.rule = ProofRule::Step;
  step.conclusion = Sequent{{}, {c}, Claim{P("[0, n] /\\ n > 0"), P("[n, n - 1]")}};
  ProofTree refl;
  refl.rule = ProofRule::Reflexivity;
  refl.conclusion = Sequent{{c}, {}, Claim{P("[n, n - 1]"), P("[n, n - 1]")}};
  ProofTree trans;
  trans.rule = ProofRule::Transitivity;
  trans.conclusion = Sequent{{}, {c}, Claim{P("[0, n] /\\ n > 0"), P("[n, n - 1]")}};
  trans.premises = {step, refl};
  CHECK(check_node(trans, f.ctx(f.sys)).ok);

  trans.premises[1].conclusion.circularities = {c};
  CheckResult r = check_node(trans, f.ctx(f.sys));
  CHECK(!r.ok);
  CHECK(r.reason.find("second premise") != std::string::npos);
}

TEST_CASE("a circularity cannot be used before a step") {
  CounterFixture f;
  Scope scope;
  scope.declare({"n", nat_sort()});
  auto P = [&](const char* s) { return parse_pattern(s, f.sys.sig, scope); };
  Claim bogus{P("[0, n]"), P("[7, 7]")};
  LabeledClaim c{"c", bogus};

  // Circularity(c) from Transitivity(Reflexivity, Axiom c): every node is
  // locally fine, but the axiom is cited without progress.
  ProofTree refl;
  refl.rule = ProofRule::Reflexivity;
  refl.conclusion = Sequent{{}, {c}, Claim{bogus.lhs, bogus.lhs}};
  ProofTree ax;
  ax.rule = ProofRule::Axiom;
  ax.label = "c";
  ax.conclusion = Sequent{{c}, {}, bogus};
  ProofTree trans;
  trans.rule = ProofRule::Transitivity;
  trans.conclusion = Sequent{{}, {c}, bogus};
  trans.premises = {refl, ax};
  ProofTree circ;
  circ.rule = ProofRule::Circularity;
  circ.label = "c";
  circ.conclusion = Sequent{{}, {}, bogus};
  circ.premises = {trans};

  CHECK(check_node(circ, f.ctx(f.sys)).ok);
  CHECK(check_node(trans, f.ctx(f.sys)).ok);
  CHECK(check_node(ax, f.ctx(f.sys)).ok);
  CheckResult r = check_proof(circ, f.ctx(f.sys));
  CHECK(!r.ok);
  CHECK(r.path == "/0/1");
  CHECK(!is_progressive(trans));
}

TEST_CASE("symbolic steps on the counter language") {
  CounterFixture f;
  Scope scope;
  scope.declare({"s", int_sort()});
  scope.declare({"i", int_sort()});
  auto cp = [&](const char* text) { return normalize(parse_pattern(text, f.sys.sig, scope)).at(0); };

  SymbolicStep a = symbolic_step(cp("[s, i] /\\ i > 0"), f.sys, f.solver);
  REQUIRE(a.successors.size() == 1);
  CHECK(a.covered);
  CHECK(a.rules == std::vector<std::string>{"step"});
  CHECK(to_string(a.successors[0].structure) == "[s + i, i - 1]");
  CHECK(a.successors[0].existentials.empty());

  SymbolicStep b = symbolic_step(cp("[s, i]"), f.sys, f.solver);
  REQUIRE(b.successors.size() == 1);
  CHECK(!b.covered);
  CHECK(to_string(b.guards) == "i > 0");

  SymbolicStep c = symbolic_step(cp("[s, 0]"), f.sys, f.solver);
  CHECK(c.successors.empty());
  CHECK(!c.covered);

  SymbolicStep d = symbolic_step(cp("[s, 3]"), f.sys, f.solver);
  REQUIRE(d.successors.size() == 1);
  CHECK(d.covered);
  CHECK(to_string(d.successors[0].structure) == "[s + 3, 2]");

  // Existentials of the input are kept on the successor.
  SymbolicStep e = symbolic_step(cp("exists k : Int . [k, i] /\\ i > 5"), f.sys, f.solver);
  REQUIRE(e.successors.size() == 1);
  CHECK(e.covered);
  CHECK(e.successors[0].existentials.size() == 1);
}

TEST_CASE("pattern implication instantiates existentials by unification") {
  CounterFixture f;
  Scope scope;
  scope.declare({"n", nat_sort()});
  scope.declare({"x", int_sort()});
  auto P = [&](const char* s) { return parse_pattern(s, f.sys.sig, scope); };
  auto valid = [&](const char* a, const char* b) {
    return pattern_implies(P(a), P(b), f.solver).kind == SolverVerdict::Kind::Valid;
  };
  CHECK(valid("[0, n]", "exists k : Int . [0, k] /\\ k >= 0"));
  CHECK(!valid("[0, x]", "exists k : Int . [0, k] /\\ k >= 0"));
  CHECK(valid("[0, x] /\\ x > 3", "exists k : Int . [0, k] /\\ k >= 0"));
  CHECK(valid("[x, x]", "exists a : Int . exists b : Int . [a, b] /\\ a = b"));
  CHECK(!valid("[x, 1]", "[x, 2]"));
  CHECK(valid("[x, 1] \\/ [x, 2]", "exists k : Int . [x, k] /\\ k > 0"));
  CHECK(!valid("[x, 1] \\/ [x, 0]", "exists k : Int . [x, k] /\\ k > 0"));
  CHECK(valid("[x, 1] /\\ x < 0 /\\ x > 0", "[5, 5]"));
  CHECK(valid("x > 3", "x > 2"));
  CHECK(!valid("x > 3", "[x, x]"));
  CHECK(valid("[0, x]", "[0, x] \\/ [1, x]"));
}

TEST_CASE("claims compare up to renaming") {
  CounterFixture f;
  Scope scope;
  scope.declare({"n", nat_sort()});
  scope.declare({"k", nat_sort()});
  auto P = [&](const char* s) { return parse_pattern(s, f.sys.sig, scope); };
  CHECK(same_claim_up_to_renaming({P("[0, n]"), P("exists m : Int . [m, 0]")},
                                  {P("[0, k]"), P("exists z : Int . [z, 0]")}));
  CHECK(!same_claim_up_to_renaming({P("[0, n]"), P("[n, 0]")}, {P("[0, k]"), P("[n, 0]")}));
  CHECK(same_claim_up_to_renaming({P("[0, n]"), P("[n, 0]")}, {P("[0, k]"), P("[k, 0]")}));
}

TEST_CASE("the counter total goal is proved automatically with the builtin solver") {
  CounterFixture f;
  ExtendedSignature es = ext_signature(f.sys.sig);
  GoalFile& goals = f.goals;
  Goal raw = elaborate_goal(goals, *goals.find("sum_total"), f.sys.sig, es.sig, f.sys.macros);
  Goal total = make_total_goal(raw, es);
  ProveResult r = prove(f.ext, Sequent{{}, {}, total.claim}, hints_of(total), f.solver);
  REQUIRE_MESSAGE(r.proved, r.reason);
  CHECK(r.steps >= 1);
  CHECK(check_proof(r.tree, f.ctx(f.ext)).ok);
  ProofTree back = parse_proof(print_proof(r.tree, f.ext.name), f.ext);
  CheckResult again = check_proof(back, f.ctx(f.ext));
  CHECK_MESSAGE(again.ok, again.path << ": " << again.reason);
  CHECK(f.solver.stats().external_calls == 0);
}

TEST_CASE("partial correctness of the counter is proved and wrong claims are not") {
  CounterFixture f;
  Goal g = f.goal("sum_partial", f.sys);
  ProveResult r = prove(f.sys, Sequent{{}, {}, g.claim}, hints_of(g), f.solver);
  REQUIRE_MESSAGE(r.proved, r.reason);

  Scope scope;
  scope.declare({"n", nat_sort()});
  Claim wrong{g.claim.lhs, parse_pattern("[n * (n + 1) / 2 + 1, 0]", f.sys.sig, scope)};
  ProverConfig small;
  small.max_depth = 40;
  small.max_branches = 16;
  ProveResult w = prove(f.sys, Sequent{{}, {}, wrong}, hints_of(g), f.solver, small);
  CHECK(!w.proved);
  CHECK(!w.frontier.empty());
  CHECK(!w.reason.empty());

  // Without an invariant the symbolic unrolling never closes.
  ProveResult nohint = prove(f.sys, Sequent{{}, {}, g.claim}, {}, f.solver, small);
  CHECK(!nohint.proved);
}

TEST_CASE("proved ground claims hold in the oracle") {
  CounterFixture f;
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> start(-5, 5), count(-2, 6), slip(-1, 1);
  for (int trial = 0; trial < 60; ++trial) {
    int s = start(rng), i = count(rng);
    int fs = s + (i > 0 ? i * (i + 1) / 2 : 0);
    int fi = i > 0 ? 0 : i;
    int ds = trial % 3 == 0 ? slip(rng) : 0;
    std::string lhs = "[" + std::to_string(s) + ", " + std::to_string(i) + "]";
    std::string rhs = "[" + std::to_string(fs + ds) + ", " + std::to_string(fi) + "]";
    Claim c{parse_pattern(lhs, f.sys.sig), parse_pattern(rhs, f.sys.sig)};
    ProveResult r = prove(f.sys, Sequent{{}, {}, c}, {}, f.solver);
    OracleResult o = oracle_partial(f.sys, normalize(c.lhs).at(0), c.rhs, {GroundValuation{}});
    CHECK_MESSAGE(r.proved == (o.verdict == Verdict::Holds), lhs << " => " << rhs << ": " << r.reason);
    if (r.proved) CHECK(check_proof(r.tree, f.ctx(f.sys)).ok);
  }
}
