#include <algorithm>
#include <array>
#include <map>

#include "prover_internal.hpp"

namespace rl {

using namespace detail;

namespace {

constexpr std::array<std::pair<ProofRule, const char*>, 8> kRuleNames{{
    {ProofRule::Step, "Step"},
    {ProofRule::Axiom, "Axiom"},
    {ProofRule::Transitivity, "Transitivity"},
    {ProofRule::CaseAnalysis, "CaseAnalysis"},
    {ProofRule::Circularity, "Circularity"},
    {ProofRule::Abstraction, "Abstraction"},
    {ProofRule::Reflexivity, "Reflexivity"},
    {ProofRule::Consequence, "Consequence"},
}};

}  // namespace

std::string to_string(ProofRule r) {
  for (const auto& [rule, name] : kRuleNames) {
    if (rule == r) return name;
  }
  return "?";
}

std::optional<ProofRule> proof_rule_from_string(const std::string& s) {
  for (const auto& [rule, name] : kRuleNames) {
    if (s == name) return rule;
  }
  return std::nullopt;
}

std::size_t ProofTree::size() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

bool same_claim_up_to_renaming(const Claim& a, const Claim& b) {
  return alpha_equal(Pattern::conj(a.lhs, a.rhs), Pattern::conj(b.lhs, b.rhs), true);
}

namespace {

bool same_claim(const Claim& a, const Claim& b) {
  return alpha_equal(a.lhs, b.lhs) && alpha_equal(a.rhs, b.rhs);
}

bool contains(const std::vector<LabeledClaim>& set, const LabeledClaim& c) {
  return std::any_of(set.begin(), set.end(), [&](const LabeledClaim& x) {
    return x.label == c.label && same_claim(x.claim, c.claim);
  });
}

bool same_set(const std::vector<LabeledClaim>& a, const std::vector<LabeledClaim>& b) {
  return std::all_of(a.begin(), a.end(), [&](const auto& c) { return contains(b, c); }) &&
         std::all_of(b.begin(), b.end(), [&](const auto& c) { return contains(a, c); });
}

std::vector<LabeledClaim> set_union(std::vector<LabeledClaim> a, const std::vector<LabeledClaim>& b) {
  for (const auto& c : b) {
    if (!contains(a, c)) a.push_back(c);
  }
  return a;
}

CheckResult ok() { return {}; }

CheckResult premises(const ProofTree& node, std::size_t n) {
  if (node.premises.size() == n) return ok();
  return CheckResult::reject(to_string(node.rule) + " takes " + std::to_string(n) + " premise" +
                             (n == 1 ? "" : "s") + ", got " + std::to_string(node.premises.size()));
}

CheckResult same_contexts(const Sequent& a, const Sequent& b) {
  if (!same_set(a.axioms, b.axioms)) return CheckResult::reject("premise changes the axioms");
  if (!same_set(a.circularities, b.circularities)) {
    return CheckResult::reject("premise changes the circularities");
  }
  return ok();
}

CheckResult implied(const Pattern& a, const Pattern& b, Solver& solver, const char* what) {
  SolverVerdict v = pattern_implies(a, b, solver);
  if (v.kind == SolverVerdict::Kind::Valid) return ok();
  std::string msg = std::string(what) + ": " + to_string(a) + " -> " + to_string(b) + " is " +
                    (v.kind == SolverVerdict::Kind::Unknown ? "not decided" : "not valid");
  if (!v.reason.empty()) msg += " (" + v.reason + ")";
  return CheckResult::reject(msg);
}

CheckResult check_step(const Claim& claim, const ProofContext& ctx) {
  std::vector<ConstrainedPattern> parts;
  try {
    parts = normalize(claim.lhs);
  } catch (const Error& e) {
    if (e.kind() != Error::Kind::UnsupportedFragment) throw;
    return CheckResult::reject(std::string("Step lhs outside the supported fragment: ") + e.what());
  }
  for (const auto& cp : parts) {
    SymbolicStep s = symbolic_step(cp, *ctx.sys, *ctx.solver);
    if (!s.blocked.empty()) return CheckResult::reject("Step: " + s.blocked);
    if (s.successors.empty()) {
      SolverVerdict v = ctx.solver->check_sat(cp.constraint);
      if (v.kind == SolverVerdict::Kind::Unsat) continue;
      return CheckResult::reject("Step: no rule applies to " + to_string(cp));
    }
    if (!s.covered) {
      return CheckResult::reject("Step: the rule guards " + to_string(s.guards) + " do not cover " +
                                 to_string(cp));
    }
    for (std::size_t i = 0; i < s.successors.size(); ++i) {
      CheckResult r = implied(s.successors[i].to_pattern(), claim.rhs, *ctx.solver,
                              ("Step via " + s.rules[i]).c_str());
      if (!r.ok) return r;
    }
  }
  return ok();
}

}  // namespace

CheckResult check_node(const ProofTree& node, const ProofContext& ctx) {
  const Sequent& seq = node.conclusion;
  const Claim& claim = seq.claim;
  switch (node.rule) {
    case ProofRule::Reflexivity: {
      if (auto r = premises(node, 0); !r.ok) return r;
      if (!alpha_equal(claim.lhs, claim.rhs)) return CheckResult::reject("Reflexivity: sides differ");
      return ok();
    }
    case ProofRule::Axiom: {
      if (auto r = premises(node, 0); !r.ok) return r;
      for (const auto& a : seq.axioms) {
        if (a.label == node.label && same_claim_up_to_renaming(a.claim, claim)) return ok();
      }
      return CheckResult::reject("Axiom: no axiom " + node.label + " states " + to_string(claim));
    }
    case ProofRule::Step: {
      if (auto r = premises(node, 0); !r.ok) return r;
      return check_step(claim, ctx);
    }
    case ProofRule::Transitivity: {
      if (auto r = premises(node, 2); !r.ok) return r;
      const Sequent& p0 = node.premises[0].conclusion;
      const Sequent& p1 = node.premises[1].conclusion;
      if (auto r = same_contexts(seq, p0); !r.ok) return r;
      if (!p1.circularities.empty()) {
        return CheckResult::reject("Transitivity: second premise must have no circularities");
      }
      if (!same_set(p1.axioms, set_union(seq.axioms, seq.circularities))) {
        return CheckResult::reject("Transitivity: second premise axioms must be A with C added");
      }
      if (!alpha_equal(p0.claim.lhs, claim.lhs)) return CheckResult::reject("Transitivity: lhs differs");
      if (!alpha_equal(p1.claim.rhs, claim.rhs)) return CheckResult::reject("Transitivity: rhs differs");
      if (!alpha_equal(p0.claim.rhs, p1.claim.lhs)) {
        return CheckResult::reject("Transitivity: premises do not meet");
      }
      return ok();
    }
    case ProofRule::CaseAnalysis: {
      if (auto r = premises(node, 2); !r.ok) return r;
      if (claim.lhs.kind() != Pattern::Kind::Or) return CheckResult::reject("CaseAnalysis: lhs is not a disjunction");
      for (std::size_t i = 0; i < 2; ++i) {
        const Sequent& p = node.premises[i].conclusion;
        if (auto r = same_contexts(seq, p); !r.ok) return r;
        const Pattern& side = i == 0 ? claim.lhs.left() : claim.lhs.right();
        if (!alpha_equal(p.claim.lhs, side)) return CheckResult::reject("CaseAnalysis: premise lhs differs");
        if (!alpha_equal(p.claim.rhs, claim.rhs)) return CheckResult::reject("CaseAnalysis: rhs differs");
      }
      return ok();
    }
    case ProofRule::Circularity: {
      if (auto r = premises(node, 1); !r.ok) return r;
      const Sequent& p = node.premises[0].conclusion;
      if (!same_set(p.axioms, seq.axioms)) return CheckResult::reject("Circularity: premise changes the axioms");
      auto expected = set_union(seq.circularities, {LabeledClaim{node.label, claim}});
      if (!same_set(p.circularities, expected)) {
        return CheckResult::reject("Circularity: premise circularities must add " + node.label);
      }
      if (!same_claim(p.claim, claim)) return CheckResult::reject("Circularity: premise claim differs");
      return ok();
    }
    case ProofRule::Abstraction: {
      if (auto r = premises(node, 1); !r.ok) return r;
      const Sequent& p = node.premises[0].conclusion;
      if (auto r = same_contexts(seq, p); !r.ok) return r;
      Pattern body = claim.lhs;
      for (const auto& x : node.abstracted) {
        if (body.kind() != Pattern::Kind::Exists || !(body.var() == x)) {
          return CheckResult::reject("Abstraction: lhs does not bind " + to_string(x));
        }
        body = body.body();
      }
      if (node.abstracted.empty()) return CheckResult::reject("Abstraction: no variables");
      if (!alpha_equal(body, p.claim.lhs)) return CheckResult::reject("Abstraction: premise lhs differs");
      if (!alpha_equal(p.claim.rhs, claim.rhs)) return CheckResult::reject("Abstraction: rhs differs");
      VarSet rhs_free = free_vars(claim.rhs);
      for (const auto& x : node.abstracted) {
        if (rhs_free.count(x)) return CheckResult::reject("Abstraction: " + to_string(x) + " is free in the rhs");
      }
      return ok();
    }
    case ProofRule::Consequence: {
      if (auto r = premises(node, 1); !r.ok) return r;
      const Sequent& p = node.premises[0].conclusion;
      if (auto r = same_contexts(seq, p); !r.ok) return r;
      if (!alpha_equal(claim.lhs, p.claim.lhs)) {
        if (auto r = implied(claim.lhs, p.claim.lhs, *ctx.solver, "Consequence lhs"); !r.ok) return r;
      }
      if (!alpha_equal(p.claim.rhs, claim.rhs)) {
        if (auto r = implied(p.claim.rhs, claim.rhs, *ctx.solver, "Consequence rhs"); !r.ok) return r;
      }
      return ok();
    }
  }
  return CheckResult::reject("unknown rule");
}

bool is_progressive(const ProofTree& tree) {
  switch (tree.rule) {
    case ProofRule::Step:
      return true;
    case ProofRule::Reflexivity:
    case ProofRule::Axiom:
      return false;
    case ProofRule::Transitivity:
      return tree.premises.size() == 2 && (is_progressive(tree.premises[0]) || is_progressive(tree.premises[1]));
    case ProofRule::CaseAnalysis:
      return !tree.premises.empty() &&
             std::all_of(tree.premises.begin(), tree.premises.end(), [](const ProofTree& p) { return is_progressive(p); });
    default:
      return tree.premises.size() == 1 && is_progressive(tree.premises[0]);
  }
}

namespace {

// Labels of axioms that entered A from C without an intervening Step.
using Unguarded = std::map<std::string, bool>;

CheckResult walk(const ProofTree& node, const ProofContext& ctx, const Unguarded& unguarded,
                 const std::string& path) {
  const std::string here = path.empty() ? "/" : path;
  // Premises first, so a bad node is reported where it is rather than at
  // the parent that consumes its conclusion.
  for (std::size_t i = 0; i < node.premises.size(); ++i) {
    Unguarded next = unguarded;
    if (node.rule == ProofRule::Transitivity && i == 1) {
      bool progressed = is_progressive(node.premises[0]);
      for (const auto& c : node.conclusion.circularities) {
        const auto& axioms = node.conclusion.axioms;
        bool in_axioms = std::any_of(axioms.begin(), axioms.end(),
                                     [&](const LabeledClaim& a) { return a.label == c.label; });
        auto it = next.find(c.label);
        bool trusted = in_axioms && (it == next.end() || !it->second);
        next[c.label] = !progressed && !trusted;
      }
    }
    CheckResult sub = walk(node.premises[i], ctx, next, path + "/" + std::to_string(i));
    if (!sub.ok) return sub;
  }
  CheckResult r = check_node(node, ctx);
  if (!r.ok) {
    r.path = here;
    return r;
  }
  if (node.rule == ProofRule::Axiom) {
    auto it = unguarded.find(node.label);
    if (it != unguarded.end() && it->second) {
      return {false, here, "Axiom: circularity " + node.label + " is cited before any Step"};
    }
  }
  return ok();
}

}  // namespace

CheckResult check_proof(const ProofTree& tree, const ProofContext& ctx) {
  if (!ctx.sys || !ctx.solver) throw Error(Error::Kind::Input, "proof context needs a system and a solver");
  return walk(tree, ctx, {}, "");
}

}  // namespace rl
