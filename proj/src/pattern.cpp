#include "rl/pattern.hpp"

#include <algorithm>
#include <sstream>

namespace rl {

Pattern Pattern::basic(Term term) {
  if (term.sort().is_builtin()) {
    throw Error(Error::Kind::IllSorted, "basic pattern of builtin sort " + term.sort().name);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Basic;
  n->term = std::move(term);
  return Pattern(std::move(n));
}

Pattern Pattern::predicate(Term term) {
  if (term.sort().builtin != BuiltinSort::Bool) {
    throw Error(Error::Kind::IllSorted, "predicate of sort " + term.sort().name);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Predicate;
  n->term = std::move(term);
  return Pattern(std::move(n));
}

Pattern Pattern::conj(Pattern a, Pattern b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = {std::move(a), std::move(b)};
  return Pattern(std::move(n));
}

Pattern Pattern::disj(Pattern a, Pattern b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = {std::move(a), std::move(b)};
  return Pattern(std::move(n));
}

Pattern Pattern::neg(Pattern p) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children = {std::move(p)};
  return Pattern(std::move(n));
}

Pattern Pattern::exists(Variable v, Pattern body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->var = std::move(v);
  n->children = {std::move(body)};
  return Pattern(std::move(n));
}

Pattern Pattern::forall(Variable v, Pattern body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->var = std::move(v);
  n->children = {std::move(body)};
  return Pattern(std::move(n));
}

Pattern Pattern::conj_all(const std::vector<Pattern>& ps) {
  if (ps.empty()) return top();
  Pattern out = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) out = conj(out, ps[i]);
  return out;
}

Pattern Pattern::disj_all(const std::vector<Pattern>& ps) {
  if (ps.empty()) return bottom();
  Pattern out = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) out = disj(out, ps[i]);
  return out;
}

Pattern Pattern::exists_all(const std::vector<Variable>& vs, Pattern body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}

bool Pattern::is_true() const {
  return kind() == Kind::Predicate && term().kind() == Term::Kind::Bool && term().bool_value();
}

bool Pattern::is_false() const {
  return kind() == Kind::Predicate && term().kind() == Term::Kind::Bool && !term().bool_value();
}

bool operator==(const Pattern& a, const Pattern& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Pattern::Kind::Basic:
    case Pattern::Kind::Predicate:
      return a.term() == b.term();
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall:
      return a.var() == b.var() && a.body() == b.body();
    default:
      return a.node_->children == b.node_->children;
  }
}

Pattern ConstrainedPattern::to_pattern() const {
  // Conjuncts are chained onto the structure so the printed form reads
  // back into the same constraint.
  Pattern core = Pattern::basic(structure);
  std::vector<Pattern> conjuncts;
  std::vector<Pattern> todo{constraint};
  while (!todo.empty()) {
    Pattern c = todo.back();
    todo.pop_back();
    if (c.kind() == Pattern::Kind::And) {
      todo.push_back(c.right());
      todo.push_back(c.left());
    } else if (!c.is_true()) {
      conjuncts.push_back(c);
    }
  }
  for (const auto& c : conjuncts) core = Pattern::conj(core, c);
  return Pattern::exists_all(existentials, core);
}

// ---------------------------------------------------------------------------

bool is_structureless(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Basic: return false;
    case Pattern::Kind::Predicate: return true;
    case Pattern::Kind::And:
    case Pattern::Kind::Or: return is_structureless(p.left()) && is_structureless(p.right());
    default: return is_structureless(p.body());
  }
}

namespace {

void collect_free(const Pattern& p, VarSet& out) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
    case Pattern::Kind::Predicate:
      collect_vars(p.term(), out);
      return;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      collect_free(p.left(), out);
      collect_free(p.right(), out);
      return;
    case Pattern::Kind::Not:
      collect_free(p.body(), out);
      return;
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      VarSet inner;
      collect_free(p.body(), inner);
      inner.erase(p.var());
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

void collect_names(const Pattern& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
    case Pattern::Kind::Predicate:
      for (const auto& v : free_vars(p.term())) out.insert(v.name);
      return;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      collect_names(p.left(), out);
      collect_names(p.right(), out);
      return;
    case Pattern::Kind::Not:
      collect_names(p.body(), out);
      return;
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall:
      out.insert(p.var().name);
      collect_names(p.body(), out);
      return;
  }
}

}  // namespace

VarSet free_vars(const Pattern& p) {
  VarSet out;
  collect_free(p, out);
  return out;
}

VarSet free_vars(const ConstrainedPattern& cp) { return free_vars(cp.to_pattern()); }

std::set<std::string> all_var_names(const Pattern& p) {
  std::set<std::string> out;
  collect_names(p, out);
  return out;
}

Pattern apply_substitution(const Substitution& sigma, const Pattern& p) {
  if (sigma.empty()) return p;
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return Pattern::basic(apply_substitution(sigma, p.term()));
    case Pattern::Kind::Predicate:
      return Pattern::predicate(apply_substitution(sigma, p.term()));
    case Pattern::Kind::And:
      return Pattern::conj(apply_substitution(sigma, p.left()), apply_substitution(sigma, p.right()));
    case Pattern::Kind::Or:
      return Pattern::disj(apply_substitution(sigma, p.left()), apply_substitution(sigma, p.right()));
    case Pattern::Kind::Not:
      return Pattern::neg(apply_substitution(sigma, p.body()));
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      Substitution inner;
      VarSet body_free = free_vars(p.body());
      bool captured = false;
      std::set<std::string> avoid = all_var_names(p.body());
      for (const auto& [v, t] : sigma) {
        if (v == p.var() || !body_free.count(v)) continue;
        inner.bind(v, t);
        for (const auto& w : free_vars(t)) {
          avoid.insert(w.name);
          if (w == p.var()) captured = true;
        }
      }
      Variable bound = p.var();
      if (captured) {
        for (const auto& [v, t] : inner) avoid.insert(v.name);
        bound = fresh_variable(p.var().name, p.var().sort, avoid);
        inner.bind(p.var(), Term::var(bound));
      }
      Pattern body = apply_substitution(inner, p.body());
      return p.kind() == Pattern::Kind::Exists ? Pattern::exists(bound, body)
                                               : Pattern::forall(bound, body);
    }
  }
  return p;
}

ConstrainedPattern apply_substitution(const Substitution& sigma, const ConstrainedPattern& cp) {
  // Go through the pattern form so the existentials are handled as binders.
  Pattern p = apply_substitution(sigma, cp.to_pattern());
  std::vector<Variable> existentials;
  while (p.kind() == Pattern::Kind::Exists) {
    existentials.push_back(p.var());
    p = p.body();
  }
  std::vector<Pattern> conjuncts;
  while (p.kind() == Pattern::Kind::And) {
    conjuncts.push_back(p.right());
    p = p.left();
  }
  Pattern constraint = Pattern::top();
  for (auto it = conjuncts.rbegin(); it != conjuncts.rend(); ++it) {
    constraint = constraint.is_true() ? *it : Pattern::conj(constraint, *it);
  }
  return {p.term(), constraint, std::move(existentials)};
}

Pattern simplify(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return Pattern::basic(simplify(p.term()));
    case Pattern::Kind::Predicate:
      return Pattern::predicate(simplify(p.term()));
    case Pattern::Kind::And: {
      Pattern a = simplify(p.left()), b = simplify(p.right());
      if (a.is_false() || b.is_false()) return Pattern::bottom();
      if (a.is_true()) return b;
      if (b.is_true()) return a;
      return Pattern::conj(a, b);
    }
    case Pattern::Kind::Or: {
      Pattern a = simplify(p.left()), b = simplify(p.right());
      if (a.is_true() || b.is_true()) return Pattern::top();
      if (a.is_false()) return b;
      if (b.is_false()) return a;
      return Pattern::disj(a, b);
    }
    case Pattern::Kind::Not: {
      Pattern a = simplify(p.body());
      if (a.is_true()) return Pattern::bottom();
      if (a.is_false()) return Pattern::top();
      if (a.kind() == Pattern::Kind::Not) return a.body();
      return Pattern::neg(a);
    }
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      Pattern b = simplify(p.body());
      if (!free_vars(b).count(p.var()) && is_structureless(b)) return b;
      return p.kind() == Pattern::Kind::Exists ? Pattern::exists(p.var(), b)
                                               : Pattern::forall(p.var(), b);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

[[noreturn]] void unsupported(const std::string& why, const Pattern& p) {
  throw Error(Error::Kind::UnsupportedFragment, why + ": " + to_string(p));
}

// Conjoins a structureless constraint, renaming existentials it would capture.
ConstrainedPattern add_constraint(ConstrainedPattern cp, const Pattern& c) {
  VarSet outside = free_vars(c);
  std::set<std::string> avoid = names_of(outside);
  for (const auto& n : all_var_names(cp.to_pattern())) avoid.insert(n);
  Substitution rename;
  for (auto& v : cp.existentials) {
    if (!outside.count(v)) continue;
    Variable fresh = fresh_variable(v.name, v.sort, avoid);
    avoid.insert(fresh.name);
    rename.bind(v, Term::var(fresh));
    v = fresh;
  }
  cp.structure = apply_substitution(rename, cp.structure);
  Pattern base = apply_substitution(rename, cp.constraint);
  cp.constraint = base.is_true() ? c : Pattern::conj(base, c);
  return cp;
}

}  // namespace

std::vector<ConstrainedPattern> normalize(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return {ConstrainedPattern{p.term(), Pattern::top(), {}}};
    case Pattern::Kind::Predicate:
      unsupported("pattern has no configuration term", p);
    case Pattern::Kind::Or: {
      auto out = normalize(p.left());
      auto rest = normalize(p.right());
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
    case Pattern::Kind::And: {
      const bool left_plain = is_structureless(p.left());
      const bool right_plain = is_structureless(p.right());
      if (left_plain && right_plain) unsupported("pattern has no configuration term", p);
      if (!left_plain && !right_plain) unsupported("conjunction of configuration patterns", p);
      const Pattern& structured = left_plain ? p.right() : p.left();
      const Pattern& constraint = left_plain ? p.left() : p.right();
      std::vector<ConstrainedPattern> out;
      for (auto& cp : normalize(structured)) out.push_back(add_constraint(std::move(cp), constraint));
      return out;
    }
    case Pattern::Kind::Exists: {
      std::vector<ConstrainedPattern> out;
      for (auto& cp : normalize(p.body())) {
        bool shadowed = std::find(cp.existentials.begin(), cp.existentials.end(), p.var()) !=
                        cp.existentials.end();
        if (!shadowed && free_vars(cp).count(p.var())) {
          cp.existentials.insert(cp.existentials.begin(), p.var());
        }
        out.push_back(std::move(cp));
      }
      return out;
    }
    case Pattern::Kind::Not:
      if (is_structureless(p)) unsupported("pattern has no configuration term", p);
      unsupported("negated configuration pattern", p);
    case Pattern::Kind::Forall:
      if (is_structureless(p)) unsupported("pattern has no configuration term", p);
      unsupported("universal over a configuration pattern", p);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int prec(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Or: return 1;
    case Pattern::Kind::And: return 2;
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: return 0;  // the body extends to the right
    default: return 4;
  }
}

void print(std::ostream& os, const Pattern& p);

void print_child(std::ostream& os, const Pattern& c, int parent, bool last) {
  // Binary connectives associate to the left; a trailing binder may run to
  // the end without parentheses.
  int cp = prec(c);
  bool parens = cp == 0 ? !last : cp < parent || (cp == parent && last);
  if (parens) os << '(';
  print(os, c);
  if (parens) os << ')';
}

void print(std::ostream& os, const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
    case Pattern::Kind::Predicate:
      os << to_string(p.term());
      return;
    case Pattern::Kind::And:
    case Pattern::Kind::Or:
      print_child(os, p.left(), prec(p), false);
      os << (p.kind() == Pattern::Kind::And ? " /\\ " : " \\/ ");
      print_child(os, p.right(), prec(p), true);
      return;
    case Pattern::Kind::Not: {
      os << '~';
      bool parens = p.body().kind() != Pattern::Kind::Basic &&
                    p.body().kind() != Pattern::Kind::Predicate &&
                    p.body().kind() != Pattern::Kind::Not;
      if (parens) os << '(';
      print(os, p.body());
      if (parens) os << ')';
      return;
    }
    case Pattern::Kind::Exists:
    case Pattern::Kind::Forall: {
      os << (p.kind() == Pattern::Kind::Exists ? "exists " : "forall ");
      const Pattern* cur = &p;
      bool first = true;
      while (cur->kind() == p.kind()) {
        if (!first) os << ", ";
        first = false;
        os << cur->var().name << " : " << cur->var().sort.name;
        cur = &cur->body();
      }
      os << " . ";
      print(os, *cur);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Pattern& p) {
  std::ostringstream os;
  print(os, p);
  return os.str();
}

std::string to_string(const ConstrainedPattern& cp) { return to_string(cp.to_pattern()); }

// ---------------------------------------------------------------------------
// Satisfaction

std::optional<std::vector<Term>> enumerate_sort(const Sort& sort, const Signature* sig) {
  if (sort.builtin == BuiltinSort::Bool) return std::vector<Term>{Term::boolean(false), Term::boolean(true)};
  if (sort.is_builtin() || sort.open || !sig) return std::nullopt;
  std::vector<Term> out;
  for (const auto& f : sig->symbols()) {
    if (!(f->result == sort)) continue;
    if (!f->arg_sorts.empty()) return std::nullopt;
    out.push_back(Term::app(f, {}));
  }
  return out;
}

namespace {

// Evaluation failures (division by zero, Nat underflow) make the term denote
// nothing, so the atom containing it does not hold.
std::optional<Term> try_eval(const Term& t) {
  try {
    return evaluate_ground(t);
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::DivisionByZero || e.kind() == Error::Kind::NatUnderflow ||
        e.kind() == Error::Kind::Overflow) {
      return std::nullopt;
    }
    throw;
  }
}

Term ground_under(const GroundValuation& rho, const Term& t) {
  Term g = apply_substitution(rho, t);
  if (!g.is_ground()) {
    throw Error(Error::Kind::NotGround, "valuation does not cover " + to_string(t));
  }
  return g;
}

Term as_sort(const Term& value, const Sort& sort) {
  if (value.kind() == Term::Kind::Int && sort.builtin == BuiltinSort::Nat) {
    return Term::integer(value.int_value(), nat_sort());
  }
  return value;
}

// Syntactic matching that skips interpreted subterms of the pattern.
bool lenient_match(const Term& pat, const Term& subject, Substitution& sigma) {
  switch (pat.kind()) {
    case Term::Kind::Var: {
      Variable v = pat.variable();
      if (const Term* b = sigma.find(v)) return *b == subject;
      if (v.sort.builtin == BuiltinSort::Nat && subject.kind() == Term::Kind::Int) {
        if (subject.int_value() < 0) return false;
        sigma.bind(v, Term::integer(subject.int_value(), nat_sort()));
        return true;
      }
      if (!sort_accepts(v.sort, subject.sort())) return false;
      sigma.bind(v, subject);
      return true;
    }
    case Term::Kind::App:
      if (pat.symbol().interpreted()) return true;
      if (!subject.is_app() || !pat.symbol().same_as(subject.symbol())) return false;
      for (std::size_t i = 0; i < pat.args().size(); ++i) {
        if (!lenient_match(pat.arg(i), subject.arg(i), sigma)) return false;
      }
      return true;
    default:
      return pat == subject;
  }
}

class Evaluator {
 public:
  Evaluator(const Term& gamma, const SatContext& ctx) : gamma_(gamma), ctx_(ctx) {}

  bool holds(const GroundValuation& rho, const Pattern& p) {
    switch (p.kind()) {
      case Pattern::Kind::Basic: {
        auto v = try_eval(ground_under(rho, p.term()));
        return v && *v == gamma_;
      }
      case Pattern::Kind::Predicate: {
        auto v = try_eval(ground_under(rho, p.term()));
        return v && v->kind() == Term::Kind::Bool && v->bool_value();
      }
      case Pattern::Kind::And:
        return holds(rho, p.left()) && holds(rho, p.right());
      case Pattern::Kind::Or:
        return holds(rho, p.left()) || holds(rho, p.right());
      case Pattern::Kind::Not:
        return !holds(rho, p.body());
      case Pattern::Kind::Exists:
        return quantifier(rho, p, true);
      case Pattern::Kind::Forall:
        return quantifier(rho, p, false);
    }
    return false;
  }

 private:
  // Exists looks for a value making the body true; Forall for one making it
  // false.
  bool quantifier(const GroundValuation& rho, const Pattern& p, bool existential) {
    const Variable& v = p.var();
    auto with = [&](const Term& value) {
      GroundValuation r = rho;
      r.bind(v, as_sort(value, v.sort));
      return holds(r, p.body());
    };
    auto found = [&](const Term& value) { return with(value) == existential; };

    if (auto domain = enumerate_sort(v.sort, ctx_.sig)) {
      for (const auto& value : *domain) {
        if (found(value)) return existential;
      }
      return !existential;
    }

    if (v.sort.is_numeric() && is_structureless(p.body()) && ctx_.decide) {
      GroundValuation outer = rho;
      outer.erase(v);
      if (auto verdict = ctx_.decide(apply_substitution(outer, p))) return *verdict;
    }

    bool complete = false;
    std::vector<Term> candidates;
    if (existential) complete = structural_candidates(rho, p, candidates);
    for (const auto& value : candidates) {
      if (found(value)) return existential;
    }
    if (complete) return !existential;

    if (v.sort.is_numeric()) {
      std::int64_t lo = v.sort.builtin == BuiltinSort::Nat ? 0 : -ctx_.bound;
      for (std::int64_t k = lo; k <= ctx_.bound; ++k) {
        if (found(Term::integer(k, v.sort))) return existential;
      }
    }
    throw Error(Error::Kind::NonEnumerableQuantifier,
                "cannot decide quantifier over " + v.name + ":" + v.sort.name + " in " + to_string(p));
  }

  // Collects values for the bound variable forced by matching the body's
  // configuration terms against γ. Returns true when those candidates are
  // the only possible witnesses.
  bool structural_candidates(const GroundValuation& rho, const Pattern& p,
                             std::vector<Term>& out) {
    GroundValuation outer = rho;
    outer.erase(p.var());
    std::vector<ConstrainedPattern> cps;
    try {
      cps = normalize(apply_substitution(outer, p.body()));
    } catch (const Error& e) {
      if (e.kind() != Error::Kind::UnsupportedFragment) throw;
      return false;
    }
    bool complete = true;
    for (const auto& cp : cps) {
      Substitution sigma;
      if (!lenient_match(cp.structure, gamma_, sigma)) continue;
      const Term* value = sigma.find(p.var());
      bool shadowed = std::find(cp.existentials.begin(), cp.existentials.end(), p.var()) !=
                      cp.existentials.end();
      if (!value || shadowed) {
        complete = false;
        continue;
      }
      if (std::find(out.begin(), out.end(), *value) == out.end()) out.push_back(*value);
    }
    return complete;
  }

  Term gamma_;
  const SatContext& ctx_;
};

}  // namespace

bool satisfies(const Term& gamma, const GroundValuation& rho, const Pattern& phi,
               const SatContext& ctx) {
  if (!gamma.is_ground()) throw Error(Error::Kind::NotGround, "configuration is not ground");
  Evaluator ev(evaluate_ground(gamma), ctx);
  return ev.holds(rho, phi);
}

// ---------------------------------------------------------------------------
// First-order view

FolFormula FolFormula::atom(Term t) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->lhs = std::move(t);
  return FolFormula(std::move(n));
}

FolFormula FolFormula::equals(Term a, Term b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Equals;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return FolFormula(std::move(n));
}

FolFormula FolFormula::conj(FolFormula a, FolFormula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = {std::move(a), std::move(b)};
  return FolFormula(std::move(n));
}

FolFormula FolFormula::disj(FolFormula a, FolFormula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = {std::move(a), std::move(b)};
  return FolFormula(std::move(n));
}

FolFormula FolFormula::neg(FolFormula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children = {std::move(f)};
  return FolFormula(std::move(n));
}

FolFormula FolFormula::exists(Variable v, FolFormula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->var = std::move(v);
  n->children = {std::move(body)};
  return FolFormula(std::move(n));
}

FolFormula FolFormula::forall(Variable v, FolFormula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->var = std::move(v);
  n->children = {std::move(body)};
  return FolFormula(std::move(n));
}

Variable box_variable(const Sort& cfg) { return Variable{"□", cfg}; }

FolFormula to_fol(const Pattern& p, const Sort& cfg) {
  switch (p.kind()) {
    case Pattern::Kind::Basic:
      return FolFormula::equals(Term::var(box_variable(cfg)), p.term());
    case Pattern::Kind::Predicate:
      return FolFormula::atom(p.term());
    case Pattern::Kind::And:
      return FolFormula::conj(to_fol(p.left(), cfg), to_fol(p.right(), cfg));
    case Pattern::Kind::Or:
      return FolFormula::disj(to_fol(p.left(), cfg), to_fol(p.right(), cfg));
    case Pattern::Kind::Not:
      return FolFormula::neg(to_fol(p.body(), cfg));
    case Pattern::Kind::Exists:
      return FolFormula::exists(p.var(), to_fol(p.body(), cfg));
    case Pattern::Kind::Forall:
      return FolFormula::forall(p.var(), to_fol(p.body(), cfg));
  }
  return FolFormula::atom(Term::boolean(false));
}

bool fol_holds(const GroundValuation& rho, const FolFormula& f,
               const std::function<std::vector<Term>(const Sort&)>& domain) {
  switch (f.kind()) {
    case FolFormula::Kind::Atom: {
      auto v = try_eval(ground_under(rho, f.lhs()));
      return v && *v == Term::boolean(true);
    }
    case FolFormula::Kind::Equals: {
      auto a = try_eval(ground_under(rho, f.lhs()));
      auto b = try_eval(ground_under(rho, f.rhs()));
      return a && b && *a == *b;
    }
    case FolFormula::Kind::And:
      return fol_holds(rho, f.child(0), domain) && fol_holds(rho, f.child(1), domain);
    case FolFormula::Kind::Or:
      return fol_holds(rho, f.child(0), domain) || fol_holds(rho, f.child(1), domain);
    case FolFormula::Kind::Not:
      return !fol_holds(rho, f.child(0), domain);
    case FolFormula::Kind::Exists:
    case FolFormula::Kind::Forall: {
      const bool ex = f.kind() == FolFormula::Kind::Exists;
      for (const auto& value : domain(f.var().sort)) {
        GroundValuation r = rho;
        r.bind(f.var(), as_sort(value, f.var().sort));
        if (fol_holds(r, f.child(0), domain) == ex) return ex;
      }
      return !ex;
    }
  }
  return false;
}

std::string to_string(const FolFormula& f) {
  switch (f.kind()) {
    case FolFormula::Kind::Atom: return to_string(f.lhs());
    case FolFormula::Kind::Equals: return to_string(f.lhs()) + " == " + to_string(f.rhs());
    case FolFormula::Kind::And:
      return "(" + to_string(f.child(0)) + " /\\ " + to_string(f.child(1)) + ")";
    case FolFormula::Kind::Or:
      return "(" + to_string(f.child(0)) + " \\/ " + to_string(f.child(1)) + ")";
    case FolFormula::Kind::Not: return "~" + to_string(f.child(0));
    case FolFormula::Kind::Exists:
    case FolFormula::Kind::Forall:
      return std::string(f.kind() == FolFormula::Kind::Exists ? "(exists " : "(forall ") +
             f.var().name + " : " + f.var().sort.name + " . " + to_string(f.child(0)) + ")";
  }
  return {};
}

}  // namespace rl
