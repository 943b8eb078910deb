#include <algorithm>

#include "prover_internal.hpp"

namespace rl {

using namespace detail;

namespace {

ProofTree make_node(ProofRule rule, Sequent seq, std::vector<ProofTree> premises = {},
                    std::string label = {}) {
  ProofTree t;
  t.rule = rule;
  t.conclusion = std::move(seq);
  t.premises = std::move(premises);
  t.label = std::move(label);
  return t;
}

Sequent with_claim(const Sequent& s, Pattern lhs, Pattern rhs) {
  return Sequent{s.axioms, s.circularities, Claim{std::move(lhs), std::move(rhs)}};
}

bool has_label(const std::vector<LabeledClaim>& set, const std::string& label) {
  return std::any_of(set.begin(), set.end(), [&](const LabeledClaim& c) { return c.label == label; });
}

class Search {
 public:
  Search(const ReachabilitySystem& sys, const std::vector<LabeledClaim>& hints, Solver& solver,
         const ProverConfig& config)
      : sys_(sys), hints_(hints), solver_(solver), config_(config) {
    for (const auto& h : hints) {
      for (const auto& n : all_var_names(h.claim.lhs)) reserved_.insert(n);
      for (const auto& n : all_var_names(h.claim.rhs)) reserved_.insert(n);
    }
  }

  std::optional<ProofTree> solve(const Sequent& seq, const std::set<std::string>& citable,
                                 std::size_t depth) {
    const Pattern& phi = seq.claim.lhs;
    const Pattern& target = seq.claim.rhs;
    if (depth > config_.max_depth) return fail(seq, "step limit reached");

    if (phi.is_false()) {
      // Vacuous: bottom implies anything.
      return consequence_of_reflexivity(seq);
    }
    if (phi.kind() == Pattern::Kind::Or) {
      if (++branches_ > config_.max_branches) return fail(seq, "case split limit reached");
      auto left = solve(with_claim(seq, phi.left(), target), citable, depth);
      if (!left) return unwind(seq);
      auto right = solve(with_claim(seq, phi.right(), target), citable, depth);
      if (!right) return unwind(seq);
      return make_node(ProofRule::CaseAnalysis, seq, {std::move(*left), std::move(*right)});
    }
    if (alpha_equal(phi, target)) return make_node(ProofRule::Reflexivity, seq);
    if (implies(phi, target)) return consequence_of_reflexivity(seq);
    if (phi.kind() == Pattern::Kind::Exists) return abstract(seq, citable, depth);

    for (const auto& a : seq.axioms) {
      if (!citable.count(a.label)) continue;
      if (implies(phi, a.claim.lhs) && implies(a.claim.rhs, target)) {
        ProofTree ax = make_node(ProofRule::Axiom, with_claim(seq, a.claim.lhs, a.claim.rhs), {}, a.label);
        return wrap(seq, std::move(ax));
      }
    }

    for (const auto& h : hints_) {
      if (has_label(seq.axioms, h.label) || has_label(seq.circularities, h.label)) continue;
      if (!implies(phi, h.claim.lhs) || !implies(h.claim.rhs, target)) continue;
      if (auto t = register_hint(seq, h, citable, depth)) return t;
    }

    return step(seq, citable, depth);
  }

  std::size_t steps() const { return steps_; }
  const std::vector<std::string>& frontier() const { return frontier_; }
  const std::string& reason() const { return reason_; }

 private:
  bool implies(const Pattern& a, const Pattern& b) {
    return pattern_implies(a, b, solver_).kind == SolverVerdict::Kind::Valid;
  }

  std::optional<ProofTree> fail(const Sequent& seq, const std::string& why) {
    frontier_ = {to_string(seq.claim)};
    reason_ = why;
    return std::nullopt;
  }

  std::optional<ProofTree> unwind(const Sequent& seq) {
    frontier_.insert(frontier_.begin(), to_string(seq.claim));
    return std::nullopt;
  }

  // φ ⇒ φ' from φ ⇒ φ, given φ → φ'.
  ProofTree consequence_of_reflexivity(const Sequent& seq) {
    const Pattern& phi = seq.claim.lhs;
    ProofTree refl = make_node(ProofRule::Reflexivity, with_claim(seq, phi, phi));
    return make_node(ProofRule::Consequence, seq, {std::move(refl)});
  }

  // Concludes `seq` from a proof of a claim whose sides are implied by and
  // imply those of `seq`.
  ProofTree wrap(const Sequent& seq, ProofTree inner) {
    const Claim& c = inner.conclusion.claim;
    if (alpha_equal(c.lhs, seq.claim.lhs) && alpha_equal(c.rhs, seq.claim.rhs)) return inner;
    return make_node(ProofRule::Consequence, seq, {std::move(inner)});
  }

  std::optional<ProofTree> abstract(const Sequent& seq, const std::set<std::string>& citable,
                                    std::size_t depth) {
    const Pattern& target = seq.claim.rhs;
    VarSet target_free = free_vars(target);
    std::set<std::string> avoid = reserved_;
    for (const auto& n : all_var_names(seq.claim.lhs)) avoid.insert(n);
    for (const auto& n : all_var_names(target)) avoid.insert(n);

    std::vector<Variable> xs;
    Pattern body = seq.claim.lhs;
    bool renamed = false;
    while (body.kind() == Pattern::Kind::Exists) {
      Variable x = body.var();
      Pattern inner = body.body();
      if (target_free.count(x) || reserved_.count(x.name)) {
        Variable fresh = fresh_variable(x.name, x.sort, avoid);
        avoid.insert(fresh.name);
        inner = apply_substitution(Substitution{{x, Term::var(fresh)}}, inner);
        x = fresh;
        renamed = true;
      }
      xs.push_back(x);
      body = inner;
    }
    Pattern lhs = renamed ? Pattern::exists_all(xs, body) : seq.claim.lhs;
    Sequent inner_seq = with_claim(seq, body, target);
    auto sub = solve(inner_seq, citable, depth);
    if (!sub) return unwind(seq);
    ProofTree abs = make_node(ProofRule::Abstraction, with_claim(seq, lhs, target), {std::move(*sub)});
    abs.abstracted = xs;
    return renamed ? make_node(ProofRule::Consequence, seq, {std::move(abs)}) : abs;
  }

  std::optional<ProofTree> register_hint(const Sequent& seq, const LabeledClaim& h,
                                         const std::set<std::string>& citable, std::size_t depth) {
    std::vector<LabeledClaim> axioms = seq.axioms;
    for (const auto& c : seq.circularities) {
      if (!has_label(axioms, c.label)) axioms.push_back(c);
    }
    Sequent circ_seq{axioms, {}, h.claim};
    Sequent body_seq{axioms, {h}, h.claim};
    auto body = solve(body_seq, citable, depth);
    if (!body) return unwind(seq);

    ProofTree circ = make_node(ProofRule::Circularity, circ_seq, {std::move(*body)}, h.label);
    Sequent p1_seq{axioms, {}, Claim{h.claim.lhs, seq.claim.rhs}};
    ProofTree p1 = wrap(p1_seq, std::move(circ));

    Sequent p0_seq = with_claim(seq, seq.claim.lhs, h.claim.lhs);
    ProofTree p0 = alpha_equal(seq.claim.lhs, h.claim.lhs) ? make_node(ProofRule::Reflexivity, p0_seq)
                                                          : consequence_of_reflexivity(p0_seq);
    return make_node(ProofRule::Transitivity, seq, {std::move(p0), std::move(p1)});
  }

  std::optional<ProofTree> step(const Sequent& seq, const std::set<std::string>& citable,
                                std::size_t depth) {
    const Pattern& phi = seq.claim.lhs;
    std::vector<ConstrainedPattern> parts;
    try {
      parts = normalize(phi);
    } catch (const Error& e) {
      if (e.kind() != Error::Kind::UnsupportedFragment) throw;
      return fail(seq, e.what());
    }
    if (parts.size() != 1) return fail(seq, "expected a single constrained pattern");
    SymbolicStep s = symbolic_step(parts[0], sys_, solver_);
    if (!s.blocked.empty()) return fail(seq, s.blocked);
    if (s.successors.empty()) {
      if (solver_.check_sat(parts[0].constraint).kind == SolverVerdict::Kind::Unsat) {
        return consequence_of_reflexivity(seq);
      }
      return fail(seq, "no rule applies and the target is not implied");
    }
    if (!s.covered) return split(seq, s.guards, citable, depth);

    std::vector<Pattern> succ;
    for (const auto& c : s.successors) succ.push_back(c.to_pattern());
    Pattern next = Pattern::disj_all(succ);
    ++steps_;
    ProofTree st = make_node(ProofRule::Step, with_claim(seq, phi, next));

    std::vector<LabeledClaim> axioms = seq.axioms;
    std::set<std::string> now_citable = citable;
    for (const auto& c : seq.circularities) {
      if (!has_label(axioms, c.label)) axioms.push_back(c);
      now_citable.insert(c.label);
    }
    auto rest = solve(Sequent{axioms, {}, Claim{next, seq.claim.rhs}}, now_citable, depth + 1);
    if (!rest) return unwind(seq);
    return make_node(ProofRule::Transitivity, seq, {std::move(st), std::move(*rest)});
  }

  // φ ⇒ φ' by cases on whether some rule guard holds.
  std::optional<ProofTree> split(const Sequent& seq, const Pattern& guards,
                                 const std::set<std::string>& citable, std::size_t depth) {
    if (++branches_ > config_.max_branches) return fail(seq, "case split limit reached");
    if (!free_vars(guards).empty() && guards.kind() == Pattern::Kind::Exists) {
      return fail(seq, "rule guards are not quantifier-free: " + to_string(guards));
    }
    std::vector<ConstrainedPattern> parts = normalize(seq.claim.lhs);
    const ConstrainedPattern& cp = parts[0];
    auto restrict = [&](const Pattern& g) {
      ConstrainedPattern out = cp;
      out.constraint = compact({cp.constraint, g});
      return out.to_pattern();
    };
    Pattern yes = restrict(guards);
    Pattern no = restrict(simplify(Pattern::neg(guards)));
    Pattern cases = Pattern::disj(yes, no);
    auto sub = solve(with_claim(seq, cases, seq.claim.rhs), citable, depth);
    if (!sub) return unwind(seq);
    return make_node(ProofRule::Consequence, seq, {std::move(*sub)});
  }

  const ReachabilitySystem& sys_;
  const std::vector<LabeledClaim>& hints_;
  Solver& solver_;
  ProverConfig config_;
  std::set<std::string> reserved_;
  std::size_t steps_ = 0;
  std::size_t branches_ = 0;
  std::vector<std::string> frontier_;
  std::string reason_;
};

}  // namespace

ProveResult prove(const ReachabilitySystem& sys, const Sequent& goal,
                  const std::vector<LabeledClaim>& hints, Solver& solver, const ProverConfig& config) {
  Search search(sys, hints, solver, config);
  std::set<std::string> citable;
  for (const auto& a : goal.axioms) citable.insert(a.label);
  ProveResult out;
  auto tree = search.solve(goal, citable, 0);
  out.steps = search.steps();
  if (!tree) {
    out.frontier = search.frontier();
    out.reason = search.reason();
    return out;
  }
  CheckResult check = check_proof(*tree, ProofContext{&sys, &solver});
  out.tree = std::move(*tree);
  if (!check.ok) {
    out.reason = "derivation rejected by the checker at " + check.path + ": " + check.reason;
    return out;
  }
  out.proved = true;
  return out;
}

}  // namespace rl
