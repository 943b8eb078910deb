#include <algorithm>
#include <map>

#include "prover_internal.hpp"

namespace rl::detail {

const Signature& builtin_signature() {
  static const Signature sig;
  return sig;
}

Term make_eq(const Term& a, const Term& b) {
  SymbolPtr f = builtin_signature().resolve("=", std::vector<Sort>{a.sort(), b.sort()});
  if (!f) throw Error(Error::Kind::IllSorted, "cannot compare " + to_string(a) + " and " + to_string(b));
  return Term::app(f, {a, b});
}

Term make_ge(const Term& a, const Term& b) {
  SymbolPtr f = builtin_signature().resolve(">=", std::vector<Sort>{a.sort(), b.sort()});
  return Term::app(f, {a, b});
}

std::vector<Pattern> conjuncts(const Pattern& p) {
  std::vector<Pattern> out;
  std::vector<Pattern> todo{p};
  while (!todo.empty()) {
    Pattern c = todo.back();
    todo.pop_back();
    if (c.kind() == Pattern::Kind::And) {
      todo.push_back(c.right());
      todo.push_back(c.left());
    } else {
      out.push_back(c);
    }
  }
  return out;
}

namespace {

bool is_lit(const Term& t) { return t.kind() == Term::Kind::Int; }

// Reads `e >= c` (or an equivalent strict/flipped form) as a lower bound
// c' on a base expression, with e = base + offset.
struct LowerBound {
  Term base = Term::boolean(true);
  std::int64_t bound = 0;
};

std::optional<LowerBound> lower_bound(const Pattern& p) {
  if (p.kind() != Pattern::Kind::Predicate || !p.term().is_app()) return std::nullopt;
  const Term& t = p.term();
  if (t.args().size() != 2) return std::nullopt;
  Term e = t.arg(0), c = t.arg(1);
  std::int64_t strict = 0;
  switch (t.symbol().builtin) {
    case Builtin::Ge:
      break;
    case Builtin::Gt:
      strict = 1;
      break;
    case Builtin::Le:
      std::swap(e, c);
      break;
    case Builtin::Lt:
      std::swap(e, c);
      strict = 1;
      break;
    default:
      return std::nullopt;
  }
  if (!is_lit(c) || is_lit(e)) return std::nullopt;
  std::int64_t offset = 0;
  if (e.is_app() && e.args().size() == 2 && is_lit(e.arg(1)) &&
      (e.symbol().builtin == Builtin::Add || e.symbol().builtin == Builtin::Sub)) {
    offset = e.symbol().builtin == Builtin::Add ? e.arg(1).int_value() : -e.arg(1).int_value();
    e = e.arg(0);
  }
  if (std::abs(offset) > (1LL << 40) || std::abs(c.int_value()) > (1LL << 40)) return std::nullopt;
  return LowerBound{e, c.int_value() + strict - offset};
}

}  // namespace

Pattern compact(const std::vector<Pattern>& input) {
  std::vector<Pattern> flat;
  for (const auto& p : input) {
    for (const auto& c : conjuncts(simplify(p))) {
      if (c.is_false()) return Pattern::bottom();
      if (c.is_true()) continue;
      if (std::find(flat.begin(), flat.end(), c) == flat.end()) flat.push_back(c);
    }
  }
  std::vector<bool> keep(flat.size(), true);
  std::map<Term, std::pair<std::int64_t, std::size_t>> strongest;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto lb = lower_bound(flat[i]);
    if (!lb) continue;
    auto [it, fresh] = strongest.try_emplace(lb->base, lb->bound, i);
    if (fresh) continue;
    if (lb->bound > it->second.first) {
      keep[it->second.second] = false;
      it->second = {lb->bound, i};
    } else {
      keep[i] = false;
    }
  }
  std::vector<Pattern> out;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (keep[i]) out.push_back(flat[i]);
  }
  return Pattern::conj_all(out);
}

namespace {

void definedness(const Term& t, bool covered, std::vector<Pattern>& out) {
  if (!t.is_app()) return;
  const bool nat_sub = t.symbol().builtin == Builtin::Sub && t.sort().builtin == BuiltinSort::Nat;
  if (nat_sub && !covered) out.push_back(Pattern::predicate(make_ge(t.arg(0), t.arg(1))));
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    // (a - c1) - c2 is defined only if a - c1 is, when c2 >= 0.
    bool inner = nat_sub && i == 0 && is_lit(t.arg(1)) && t.arg(1).int_value() >= 0;
    definedness(t.arg(i), inner, out);
  }
}

}  // namespace

void nat_definedness(const Term& t, std::vector<Pattern>& out) { definedness(t, false, out); }

// ---------------------------------------------------------------------------

namespace {

void vars_in_order(const Term& t, std::vector<Variable>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.push_back(t.variable());
    return;
  }
  for (const auto& a : t.args()) vars_in_order(a, out);
}

class Canon {
 public:
  explicit Canon(bool rename_free) : rename_free_(rename_free) {}

  Pattern walk(const Pattern& p, const std::map<Variable, Variable>& bound) {
    switch (p.kind()) {
      case Pattern::Kind::Basic:
        return Pattern::basic(term(p.term(), bound));
      case Pattern::Kind::Predicate:
        return Pattern::predicate(term(p.term(), bound));
      case Pattern::Kind::And:
        return Pattern::conj(walk(p.left(), bound), walk(p.right(), bound));
      case Pattern::Kind::Or:
        return Pattern::disj(walk(p.left(), bound), walk(p.right(), bound));
      case Pattern::Kind::Not:
        return Pattern::neg(walk(p.body(), bound));
      case Pattern::Kind::Exists:
      case Pattern::Kind::Forall: {
        auto inner = bound;
        Variable v{"_b" + std::to_string(next_bound_++), p.var().sort};
        inner.insert_or_assign(p.var(), v);
        Pattern b = walk(p.body(), inner);
        return p.kind() == Pattern::Kind::Exists ? Pattern::exists(v, b) : Pattern::forall(v, b);
      }
    }
    return p;
  }

 private:
  Term term(const Term& t, const std::map<Variable, Variable>& bound) {
    std::vector<Variable> order;
    vars_in_order(t, order);
    Substitution s;
    for (const auto& v : order) {
      if (s.contains(v)) continue;
      if (auto it = bound.find(v); it != bound.end()) {
        s.bind(v, Term::var(it->second));
      } else if (rename_free_) {
        auto [f, fresh] = free_.try_emplace(v, Variable{"_f" + std::to_string(free_.size()), v.sort});
        s.bind(v, Term::var(f->second));
      }
    }
    return apply_substitution(s, t);
  }

  bool rename_free_;
  std::size_t next_bound_ = 0;
  std::map<Variable, Variable> free_;
};

}  // namespace

bool alpha_equal(const Pattern& a, const Pattern& b, bool rename_free) {
  if (a == b) return true;
  Canon ca(rename_free), cb(rename_free);
  return ca.walk(a, {}) == cb.walk(b, {});
}

ConstrainedPattern open_existentials(const ConstrainedPattern& cp, std::set<std::string>& avoid) {
  if (cp.existentials.empty()) return cp;
  Substitution s;
  for (const auto& v : cp.existentials) {
    Variable fresh = fresh_variable(v.name, v.sort, avoid);
    avoid.insert(fresh.name);
    s.bind(v, Term::var(fresh));
  }
  ConstrainedPattern out;
  out.structure = apply_substitution(s, cp.structure);
  out.constraint = apply_substitution(s, cp.constraint);
  return out;
}

namespace {

using Bindable = std::function<bool(const Variable&)>;

// Residual equations y = t with y bindable become bindings; a Nat variable
// bound this way records t >= 0. The rest stay as equality constraints.
void solve_residuals(Unifier& u, const Bindable& bindable, std::vector<Pattern>& constraints) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < u.residual.size(); ++i) {
      Term a = apply_substitution(u.mgu, u.residual[i].first);
      Term b = apply_substitution(u.mgu, u.residual[i].second);
      for (int side = 0; side < 2 && !changed; ++side) {
        const Term& v = side == 0 ? b : a;
        const Term& t = side == 0 ? a : b;
        if (!v.is_var() || !bindable(v.variable()) || u.mgu.contains(v.variable())) continue;
        if (occurs(v.variable(), t) || !sort_accepts(v.sort(), t.sort())) continue;
        Substitution single;
        single.bind(v.variable(), t);
        Substitution next;
        for (const auto& [w, image] : u.mgu) next.bind(w, apply_substitution(single, image));
        next.bind(v.variable(), t);
        u.mgu = std::move(next);
        if (v.sort().builtin == BuiltinSort::Nat && !t.is_var() && !is_lit(t)) {
          constraints.push_back(Pattern::predicate(make_ge(t, Term::integer(0))));
        }
        u.residual.erase(u.residual.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      }
      if (changed) break;
    }
  }
  for (auto& [a, b] : u.residual) {
    Term x = apply_substitution(u.mgu, a), y = apply_substitution(u.mgu, b);
    if (x != y) constraints.push_back(Pattern::predicate(make_eq(x, y)));
  }
  for (auto& c : constraints) c = apply_substitution(u.mgu, c);
}

std::set<std::string> names_in(const Pattern& p) { return all_var_names(p); }

// Hypothesis equalities v = t eliminate the universal variable v.
void eliminate_equalities(std::vector<Pattern>& hyp, Pattern& concl) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < hyp.size() && !changed; ++i) {
      const Pattern& h = hyp[i];
      if (h.kind() != Pattern::Kind::Predicate || !h.term().is_app() ||
          h.term().symbol().builtin != Builtin::Eq) {
        continue;
      }
      for (int side = 0; side < 2 && !changed; ++side) {
        const Term& v = h.term().arg(side);
        const Term& t = h.term().arg(1 - side);
        if (!v.is_var() || occurs(v.variable(), t) || !sort_accepts(v.sort(), t.sort())) continue;
        Substitution s;
        s.bind(v.variable(), t);
        std::vector<Pattern> rest;
        for (std::size_t j = 0; j < hyp.size(); ++j) {
          if (j != i) rest.push_back(simplify(apply_substitution(s, hyp[j])));
        }
        if (v.sort().builtin == BuiltinSort::Nat) rest.push_back(Pattern::predicate(make_ge(t, Term::integer(0))));
        concl = simplify(apply_substitution(s, concl));
        hyp = std::move(rest);
        changed = true;
      }
    }
  }
}

// Reads a literal bound on a variable from `v op c`, `c op v` or a negation.
struct VarBound {
  Variable var;
  std::optional<std::int64_t> lo, hi;
};

std::optional<VarBound> var_bound(const Pattern& h) {
  bool negated = false;
  Term t = Term::boolean(true);
  if (h.kind() == Pattern::Kind::Not && h.body().kind() == Pattern::Kind::Predicate) {
    negated = true;
    t = h.body().term();
  } else if (h.kind() == Pattern::Kind::Predicate) {
    t = h.term();
  } else {
    return std::nullopt;
  }
  if (t.is_app() && t.symbol().builtin == Builtin::Not) {
    negated = !negated;
    t = t.arg(0);
  }
  if (!t.is_app() || t.args().size() != 2) return std::nullopt;
  Builtin op = t.symbol().builtin;
  Term a = t.arg(0), b = t.arg(1);
  if (a.is_var() && is_lit(b)) {
  } else if (b.is_var() && is_lit(a)) {
    std::swap(a, b);
    switch (op) {
      case Builtin::Lt: op = Builtin::Gt; break;
      case Builtin::Le: op = Builtin::Ge; break;
      case Builtin::Gt: op = Builtin::Lt; break;
      case Builtin::Ge: op = Builtin::Le; break;
      default: break;
    }
  } else {
    return std::nullopt;
  }
  if (negated) {
    switch (op) {
      case Builtin::Lt: op = Builtin::Ge; break;
      case Builtin::Le: op = Builtin::Gt; break;
      case Builtin::Gt: op = Builtin::Le; break;
      case Builtin::Ge: op = Builtin::Lt; break;
      case Builtin::Eq: op = Builtin::Ne; break;
      case Builtin::Ne: op = Builtin::Eq; break;
      default: return std::nullopt;
    }
  }
  const std::int64_t c = b.int_value();
  VarBound out{a.variable(), {}, {}};
  switch (op) {
    case Builtin::Lt: out.hi = c - 1; break;
    case Builtin::Le: out.hi = c; break;
    case Builtin::Gt: out.lo = c + 1; break;
    case Builtin::Ge: out.lo = c; break;
    case Builtin::Eq: out.lo = out.hi = c; break;
    default: return std::nullopt;
  }
  return out;
}

// Environment lookups are opaque integers to the backend. Naming each one by
// a fresh universal variable lets equality elimination and pinning see
// through them; a valid generalization has the original as an instance.
Term replace_terms(const Term& t, const std::map<Term, Term>& names) {
  auto it = names.find(t);
  if (it != names.end()) return it->second;
  if (!t.is_app()) return t;
  std::vector<Term> args;
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(replace_terms(a, names));
    changed = changed || args.back() != a;
  }
  return changed ? Term::app(t.symbol_ptr(), std::move(args)) : t;
}

Pattern replace_terms(const Pattern& p, const std::map<Term, Term>& names) {
  switch (p.kind()) {
    case Pattern::Kind::Basic: return Pattern::basic(replace_terms(p.term(), names));
    case Pattern::Kind::Predicate: return Pattern::predicate(replace_terms(p.term(), names));
    case Pattern::Kind::And: return Pattern::conj(replace_terms(p.left(), names), replace_terms(p.right(), names));
    case Pattern::Kind::Or: return Pattern::disj(replace_terms(p.left(), names), replace_terms(p.right(), names));
    case Pattern::Kind::Not: return Pattern::neg(replace_terms(p.body(), names));
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      std::map<Term, Term> inner;
      for (const auto& [t, v] : names) {
        if (!occurs(p.var(), t)) inner.emplace(t, v);
      }
      Pattern body = replace_terms(p.body(), inner);
      return p.kind() == Pattern::Kind::Exists ? Pattern::exists(p.var(), body) : Pattern::forall(p.var(), body);
    }
  }
  return p;
}

void collect_lookups(const Term& t, const VarSet& bound, std::vector<Term>& out) {
  if (!t.is_app()) return;
  if (t.symbol().builtin == Builtin::Lookup) {
    bool closed = true;
    for (const auto& v : free_vars(t)) closed = closed && !bound.count(v);
    if (closed && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return;
  }
  for (const auto& a : t.args()) collect_lookups(a, bound, out);
}

void collect_lookups(const Pattern& p, const VarSet& bound, std::vector<Term>& out) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
    case Pattern::Kind::Predicate: collect_lookups(p.term(), bound, out); return;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      collect_lookups(p.left(), bound, out);
      collect_lookups(p.right(), bound, out);
      return;
    case Pattern::Kind::Not: collect_lookups(p.body(), bound, out); return;
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      VarSet inner = bound;
      inner.insert(p.var());
      collect_lookups(p.body(), inner, out);
      return;
    }
  }
}

void name_lookups(std::vector<Pattern>& hyp, Pattern& concl) {
  std::vector<Term> found;
  for (const auto& h : hyp) collect_lookups(h, {}, found);
  collect_lookups(concl, {}, found);
  if (found.empty()) return;
  std::set<std::string> avoid = all_var_names(concl);
  for (const auto& h : hyp) {
    for (const auto& n : all_var_names(h)) avoid.insert(n);
  }
  std::map<Term, Term> names;
  for (const auto& t : found) {
    Variable v = fresh_variable("_l", t.sort(), avoid);
    avoid.insert(v.name);
    names.emplace(t, Term::var(v));
  }
  for (auto& h : hyp) h = replace_terms(h, names);
  concl = replace_terms(concl, names);
}

// A variable whose literal bounds meet is replaced by its only value.
bool pin_variables(std::vector<Pattern>& hyp, Pattern& concl) {
  std::map<Variable, std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>> range;
  for (const auto& h : hyp) {
    for (const auto& v : free_vars(h)) {
      if (v.sort.builtin == BuiltinSort::Nat) range[v].first = 0;
    }
  }
  for (const auto& h : hyp) {
    auto b = var_bound(h);
    if (!b) continue;
    auto& [lo, hi] = range[b->var];
    if (b->lo && (!lo || *b->lo > *lo)) lo = b->lo;
    if (b->hi && (!hi || *b->hi < *hi)) hi = b->hi;
  }
  Substitution s;
  for (const auto& [v, r] : range) {
    if (r.first && r.second && *r.first == *r.second && v.sort.is_numeric()) {
      s.bind(v, Term::integer(*r.first, v.sort.builtin == BuiltinSort::Nat && *r.first >= 0 ? nat_sort() : int_sort()));
    }
  }
  if (s.empty()) return false;
  for (auto& h : hyp) h = simplify(apply_substitution(s, h));
  for (const auto& [v, value] : s) hyp.push_back(Pattern::predicate(make_eq(Term::var(v), value)));
  concl = simplify(apply_substitution(s, concl));
  // Drop the now ground conjuncts that hold.
  std::vector<Pattern> kept;
  for (const auto& h : hyp) {
    if (!h.is_true()) kept.push_back(h);
  }
  hyp = std::move(kept);
  return true;
}

}  // namespace

std::vector<StepCase> step_cases(const ConstrainedPattern& cp, const ReachabilitySystem& sys,
                                 const std::set<std::string>& avoid, std::string& blocked) {
  std::vector<StepCase> out;
  std::set<std::string> used = avoid;
  for (const auto& n : all_var_names(cp.to_pattern())) used.insert(n);
  for (const auto& rule : sys.rules) {
    VarSet rule_vars = free_vars(rule.lhs);
    for (const auto& v : free_vars(rule.rhs)) rule_vars.insert(v);
    for (const auto& v : rule.rhs.existentials) rule_vars.insert(v);
    Substitution ren;
    std::set<std::string> local = used;
    VarSet renamed;
    for (const auto& v : rule_vars) {
      Variable f = fresh_variable(v.name, v.sort, local);
      local.insert(f.name);
      ren.bind(v, Term::var(f));
      renamed.insert(f);
    }
    ConstrainedPattern lhs = apply_substitution(ren, rule.lhs);
    ConstrainedPattern rhs{apply_substitution(ren, rule.rhs.structure),
                           apply_substitution(ren, rule.rhs.constraint), {}};
    for (const auto& v : rule.rhs.existentials) rhs.existentials.push_back(ren.find(v)->variable());

    Bindable bindable = [&](const Variable& v) { return renamed.count(v) != 0; };
    auto u = unify(cp.structure, lhs.structure, bindable);
    if (!u) {
      if (unify(cp.structure, lhs.structure)) {
        blocked = "rule " + rule.label + " applies to only some instances of " + to_string(cp.structure);
      }
      continue;
    }
    std::vector<Pattern> guard;
    solve_residuals(*u, bindable, guard);
    for (const auto& c : conjuncts(apply_substitution(u->mgu, lhs.constraint))) guard.push_back(c);

    StepCase sc;
    sc.rule = rule.label;
    Term next = simplify(apply_substitution(u->mgu, rhs.structure));
    std::vector<Pattern> constraint = conjuncts(cp.constraint);
    constraint.insert(constraint.end(), guard.begin(), guard.end());
    for (const auto& c : conjuncts(apply_substitution(u->mgu, rhs.constraint))) constraint.push_back(c);
    nat_definedness(next, constraint);
    sc.successor.structure = next;
    sc.successor.constraint = compact(constraint);

    Pattern g = compact(guard);
    VarSet local_vars;
    for (const auto& v : free_vars(g)) {
      if (renamed.count(v)) local_vars.insert(v);
    }
    sc.guard = Pattern::exists_all(std::vector<Variable>(local_vars.begin(), local_vars.end()), g);

    VarSet succ_vars = free_vars(sc.successor);
    for (const auto& v : succ_vars) {
      if (renamed.count(v)) sc.successor.existentials.push_back(v);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace rl::detail

namespace rl {

using namespace detail;

SolverVerdict pattern_implies(const Pattern& phi, const Pattern& psi, Solver& solver) {
  if (psi.is_true()) return {SolverVerdict::Kind::Valid, {}, "target is true"};
  if (alpha_equal(phi, psi)) return {SolverVerdict::Kind::Valid, {}, "identical patterns"};
  const bool plain_target = is_structureless(psi);
  if (is_structureless(phi)) {
    if (plain_target) return solver.implies(phi, psi);
    if (solver.check_sat(phi).kind == SolverVerdict::Kind::Unsat) return {SolverVerdict::Kind::Valid, {}, {}};
    return SolverVerdict::unknown("a constraint alone does not imply " + to_string(psi));
  }
  std::vector<ConstrainedPattern> lefts, rights;
  try {
    lefts = normalize(phi);
    if (!plain_target) rights = normalize(psi);
  } catch (const Error& e) {
    if (e.kind() != Error::Kind::UnsupportedFragment) throw;
    return SolverVerdict::unknown(e.what());
  }

  std::set<std::string> avoid = names_in(phi);
  for (const auto& n : names_in(psi)) avoid.insert(n);

  for (const auto& left : lefts) {
    ConstrainedPattern l = open_existentials(left, avoid);
    std::vector<Pattern> hyp = conjuncts(l.constraint);
    nat_definedness(l.structure, hyp);

    std::vector<Pattern> options;
    if (plain_target) options.push_back(psi);
    for (const auto& right : rights) {
      std::set<std::string> local = avoid;
      ConstrainedPattern r = open_existentials(right, local);
      // The opened existentials are exactly the variables not free in psi.
      VarSet ys;
      VarSet psi_free = free_vars(right);
      for (const auto& v : free_vars(r)) {
        if (!psi_free.count(v)) ys.insert(v);
      }
      Bindable bindable = [&](const Variable& v) { return ys.count(v) != 0; };
      auto u = unify(l.structure, r.structure, bindable);
      if (!u) continue;
      std::vector<Pattern> body;
      solve_residuals(*u, bindable, body);
      for (const auto& c : conjuncts(apply_substitution(u->mgu, r.constraint))) body.push_back(c);
      nat_definedness(apply_substitution(u->mgu, r.structure), body);
      Pattern b = compact(body);
      std::vector<Variable> left_over;
      for (const auto& v : free_vars(b)) {
        if (ys.count(v)) left_over.push_back(v);
      }
      options.push_back(Pattern::exists_all(left_over, b));
    }

    Pattern hypothesis = compact(hyp);
    if (hypothesis.is_false()) continue;
    Pattern concl = simplify(Pattern::disj_all(options));
    if (concl.is_true()) continue;

    // Every conclusion conjunct already assumed.
    bool trivial = false;
    std::vector<Pattern> hs = conjuncts(hypothesis);
    for (const auto& o : options) {
      if (!free_vars(o).empty() && o.kind() == Pattern::Kind::Exists) continue;
      auto cs = conjuncts(o);
      if (std::all_of(cs.begin(), cs.end(), [&](const Pattern& c) {
            return c.is_true() || std::find(hs.begin(), hs.end(), c) != hs.end();
          })) {
        trivial = true;
        break;
      }
    }
    if (trivial) continue;

    name_lookups(hs, concl);
    eliminate_equalities(hs, concl);
    if (pin_variables(hs, concl)) eliminate_equalities(hs, concl);
    SolverVerdict v = solver.implies(Pattern::conj_all(hs), concl);
    if (v.kind != SolverVerdict::Kind::Valid) {
      if (v.reason.empty()) v.reason = "cannot show " + to_string(l.to_pattern()) + " -> " + to_string(psi);
      return v;
    }
  }
  return {SolverVerdict::Kind::Valid, {}, {}};
}

SymbolicStep symbolic_step(const ConstrainedPattern& cp, const ReachabilitySystem& sys, Solver& solver) {
  SymbolicStep out;
  std::set<std::string> avoid = all_var_names(cp.to_pattern());
  ConstrainedPattern opened = open_existentials(cp, avoid);
  std::vector<Variable> reopened;
  for (const auto& v : free_vars(opened)) {
    if (!free_vars(cp).count(v)) reopened.push_back(v);
  }
  auto cases = step_cases(opened, sys, avoid, out.blocked);
  std::vector<Pattern> guards;
  for (auto& c : cases) {
    if (!c.guard.is_true()) {
      SolverVerdict s = solver.check_sat(Pattern::conj(opened.constraint, c.guard));
      if (s.kind == SolverVerdict::Kind::Unsat) continue;
    }
    ConstrainedPattern succ = c.successor;
    succ.existentials.insert(succ.existentials.begin(), reopened.begin(), reopened.end());
    out.successors.push_back(std::move(succ));
    out.rules.push_back(c.rule);
    guards.push_back(c.guard);
  }
  out.guards = simplify(Pattern::disj_all(guards));
  if (!out.successors.empty() && out.blocked.empty()) {
    out.covered = out.guards.is_true() ||
                  solver.implies(opened.constraint, out.guards).kind == SolverVerdict::Kind::Valid;
  }
  return out;
}

}  // namespace rl
