#include "rl/theta.hpp"

namespace rl {

Term ExtendedSignature::make_pair(const Term& cfg, const Term& n) const {
  return Term::app(pair, {cfg, n});
}

ExtendedSignature ext_signature(const Signature& sig) {
  if (!sig.has_cfg_sort()) throw Error(Error::Kind::Input, "signature has no configuration sort");
  if (sig.find_builtin(Builtin::Pair)) {
    throw Error(Error::Kind::NameCollision, "signature already has a pairing constructor");
  }
  ExtendedSignature ext{sig, sig.cfg_sort(), Sort{sig.cfg_sort().name + "'"}, nullptr};
  if (sig.has_sort(ext.cfg_prime.name)) {
    throw Error(Error::Kind::NameCollision, "sort " + ext.cfg_prime.name + " is already declared");
  }
  ext.sig.add_sort(ext.cfg_prime);
  ext.pair = ext.sig.add_symbol({"pair", {ext.base_cfg, nat_sort()}, ext.cfg_prime, Builtin::Pair, {}});
  ext.sig.set_cfg_sort(ext.cfg_prime.name);
  return ext;
}

Pattern ext_pattern(const Pattern& phi, const Term& n, const ExtendedSignature& ext) {
  if (is_structureless(phi)) return phi;
  switch (phi.kind()) {
    case Pattern::Kind::Basic:
      return Pattern::basic(ext.make_pair(phi.term(), n));
    case Pattern::Kind::Predicate:
      return phi;
    case Pattern::Kind::And:
      return Pattern::conj(ext_pattern(phi.left(), n, ext), ext_pattern(phi.right(), n, ext));
    case Pattern::Kind::Or:
      return Pattern::disj(ext_pattern(phi.left(), n, ext), ext_pattern(phi.right(), n, ext));
    case Pattern::Kind::Not:
      return Pattern::neg(ext_pattern(phi.body(), n, ext));
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      Variable v = phi.var();
      Pattern body = phi.body();
      if (occurs(v, n)) {
        std::set<std::string> avoid = all_var_names(phi);
        for (const auto& name : names_of(free_vars(n))) avoid.insert(name);
        Variable renamed = fresh_variable(v.name, v.sort, avoid);
        body = apply_substitution(Substitution{{v, Term::var(renamed)}}, body);
        v = renamed;
      }
      Pattern inner = ext_pattern(body, n, ext);
      return phi.kind() == Pattern::Kind::Exists ? Pattern::exists(v, inner) : Pattern::forall(v, inner);
    }
  }
  return phi;
}

ConstrainedPattern ext_pattern(const ConstrainedPattern& phi, const Term& n,
                               const ExtendedSignature& ext) {
  ConstrainedPattern out = phi;
  for (auto& v : out.existentials) {
    if (!occurs(v, n)) continue;
    std::set<std::string> avoid = all_var_names(phi.to_pattern());
    for (const auto& name : names_of(free_vars(n))) avoid.insert(name);
    Variable renamed = fresh_variable(v.name, v.sort, avoid);
    Substitution s{{v, Term::var(renamed)}};
    out.structure = apply_substitution(s, out.structure);
    out.constraint = apply_substitution(s, out.constraint);
    v = renamed;
  }
  out.structure = ext.make_pair(out.structure, n);
  return out;
}

ReachabilityRule ext_rule(const ReachabilityRule& rule, const ExtendedSignature& ext) {
  std::set<std::string> avoid = all_var_names(rule.lhs.to_pattern());
  for (const auto& name : all_var_names(rule.rhs.to_pattern())) avoid.insert(name);
  Term n = Term::var(fresh_variable("n", nat_sort(), avoid));
  const Term one = Term::integer(1, nat_sort());

  ReachabilityRule out;
  out.label = rule.label + ".theta";
  out.lhs = ext_pattern(rule.lhs, n, ext);
  SymbolPtr ge = ext.sig.resolve(">=", std::vector<Sort>{nat_sort(), nat_sort()});
  Pattern guard = Pattern::predicate(Term::app(ge, {n, one}));
  out.lhs.constraint = rule.lhs.constraint.is_true() ? guard : Pattern::conj(rule.lhs.constraint, guard);
  Term pred = Term::app(ext.sig.arithmetic(Builtin::Sub, nat_sort(), nat_sort()), {n, one});
  out.rhs = ext_pattern(rule.rhs, pred, ext);
  return out;
}

ReachabilitySystem ext_system(const ReachabilitySystem& sys) {
  ExtendedSignature ext = ext_signature(sys.sig);
  ReachabilitySystem out;
  out.name = sys.name + ".theta";
  out.sig = ext.sig;
  out.macros = sys.macros;
  out.rules.reserve(sys.rules.size());
  for (const auto& r : sys.rules) out.rules.push_back(ext_rule(r, ext));
  return out;
}

Claim make_total_goal(const TotalGoal& goal, const ExtendedSignature& ext) {
  if (!sort_accepts(nat_sort(), goal.bound.sort())) {
    throw Error(Error::Kind::IllSorted, "variant must have sort Nat, not " + goal.bound.sort().name);
  }
  std::set<std::string> avoid = all_var_names(goal.lhs);
  for (const auto& name : all_var_names(goal.rhs)) avoid.insert(name);
  for (const auto& name : names_of(free_vars(goal.bound))) avoid.insert(name);
  Variable m = fresh_variable(goal.result_name.empty() ? "M" : goal.result_name, nat_sort(), avoid);
  Claim c;
  c.lhs = ext_pattern(goal.lhs, goal.bound, ext);
  c.rhs = Pattern::exists(m, ext_pattern(goal.rhs, Term::var(m), ext));
  return c;
}

Goal make_total_goal(const Goal& goal, const ExtendedSignature& ext) {
  if (!goal.bound) throw Error(Error::Kind::Input, "goal " + goal.name + " has no variant");
  Goal out = goal;
  out.claim = make_total_goal(TotalGoal{goal.claim.lhs, goal.claim.rhs, *goal.bound, goal.result_name}, ext);
  out.bound.reset();
  out.result_name.clear();
  return out;
}

}  // namespace rl
