#include "rl/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "lia.hpp"

namespace rl {

namespace {

using lia::Q;
using lia::Row;
using lia::Z;

struct Unsupported {
  std::string reason;
};

// Quantifier-free formula over linear rows, in negation normal form.
struct Formula {
  enum class Kind { True, False, Lit, And, Or };
  Kind kind = Kind::True;
  Row row;
  std::vector<Formula> kids;

  static Formula truth(bool b) { return {b ? Kind::True : Kind::False, {}, {}}; }
  static Formula lit(Row r) { return {Kind::Lit, std::move(r), {}}; }
  static Formula both(std::vector<Formula> ks) { return {Kind::And, {}, std::move(ks)}; }
  static Formula either(std::vector<Formula> ks) { return {Kind::Or, {}, std::move(ks)}; }
};

std::size_t count_literals(const Formula& f) {
  if (f.kind == Formula::Kind::Lit) return 1;
  std::size_t n = 0;
  for (const auto& k : f.kids) n += count_literals(k);
  return n;
}

// Polynomials over atoms: monomial (sorted atom ids, empty for the constant)
// to coefficient.
using Monomial = std::vector<int>;
using Poly = std::map<Monomial, Q>;

Poly constant_poly(const Q& c) {
  Poly p;
  if (c != 0) p[{}] = c;
  return p;
}

void add_into(Poly& acc, const Poly& p, const Q& k) {
  for (const auto& [m, c] : p) {
    Q& slot = acc[m];
    slot += k * c;
    if (slot == 0) acc.erase(m);
  }
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      Q& slot = out[m];
      slot += ca * cb;
      if (slot == 0) out.erase(m);
    }
  }
  return out;
}

bool integral_coefficients(const Poly& p) {
  return std::all_of(p.begin(), p.end(),
                     [](const auto& kv) { return boost::multiprecision::denominator(kv.second) == 1; });
}

// Whether p takes only values divisible by c at integer points. Exact for
// c = 2 on integer polynomials (x^k = x modulo 2); otherwise requires every
// coefficient to be divisible.
bool always_divisible(const Poly& p, const Z& c) {
  if (!integral_coefficients(p)) return false;
  bool all = std::all_of(p.begin(), p.end(),
                         [&](const auto& kv) { return boost::multiprecision::numerator(kv.second) % c == 0; });
  if (all || (c != 2 && c != -2)) return all;
  std::map<Monomial, Z> parity;
  for (const auto& [m, coef] : p) {
    Monomial reduced = m;
    reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
    parity[reduced] += boost::multiprecision::numerator(coef);
  }
  return std::all_of(parity.begin(), parity.end(), [](const auto& kv) { return kv.second % 2 == 0; });
}

class Encoder {
 public:
  explicit Encoder(std::set<std::string> taken) : taken_(std::move(taken)) {}

  Formula encode(const Pattern& p, bool positive) {
    switch (p.kind()) {
      case Pattern::Kind::Basic:
        throw Unsupported{"basic pattern in a side condition"};
      case Pattern::Kind::Predicate:
        return bool_term(p.term(), positive);
      case Pattern::Kind::Not:
        return encode(p.body(), !positive);
      case Pattern::Kind::And:
      case Pattern::Kind::Or: {
        std::vector<Formula> ks{encode(p.left(), positive), encode(p.right(), positive)};
        bool conj = (p.kind() == Pattern::Kind::And) == positive;
        return conj ? Formula::both(std::move(ks)) : Formula::either(std::move(ks));
      }
      case Pattern::Kind::Exists:
      case Pattern::Kind::Forall: {
        bool existential = (p.kind() == Pattern::Kind::Exists) == positive;
        const Variable& v = p.var();
        if (!free_vars(p.body()).count(v)) return encode(p.body(), positive);
        if (existential) {
          // Skolemize with a fresh constant.
          Variable fresh = fresh_variable(v.name, v.sort, taken_);
          taken_.insert(fresh.name);
          Substitution s;
          s.bind(v, Term::var(fresh));
          return encode(apply_substitution(s, p.body()), positive);
        }
        if (v.sort.builtin == BuiltinSort::Bool) {
          std::vector<Formula> ks;
          for (bool b : {false, true}) {
            Substitution s;
            s.bind(v, Term::boolean(b));
            ks.push_back(encode(apply_substitution(s, p.body()), positive));
          }
          return Formula::both(std::move(ks));
        }
        throw Unsupported{"universal quantifier over " + v.sort.name};
      }
    }
    throw Unsupported{"pattern"};
  }

  std::vector<Formula>& side() { return side_; }
  bool exact() const { return exact_; }
  std::size_t atom_count() const { return atoms_.size(); }

  // Values of the variables among the atoms.
  GroundValuation witness(const std::map<int, Z>& model, const VarSet& vars) const {
    GroundValuation w;
    for (const auto& v : vars) {
      auto it = ids_.find(Term::var(v));
      Z value = 0;
      if (it != ids_.end()) {
        auto m = model.find(it->second);
        if (m != model.end()) value = m->second;
      }
      if (v.sort.builtin == BuiltinSort::Bool) {
        w.bind(v, Term::boolean(value != 0));
      } else if (v.sort.is_numeric()) {
        if (value > INT64_MAX || value < INT64_MIN) continue;
        w.bind(v, Term::integer(static_cast<std::int64_t>(value), v.sort));
      }
    }
    return w;
  }

 private:
  int atom(const Term& t, bool boolean) {
    auto it = ids_.find(t);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(atoms_.size());
    atoms_.push_back(t);
    ids_.emplace(t, id);
    if (!t.is_var()) exact_ = false;
    if (boolean) {
      side_.push_back(Formula::lit(row({{{id}, Q(-1)}}, Row::Op::Le)));
      side_.push_back(Formula::lit(row({{{id}, Q(1)}, {{}, Q(-1)}}, Row::Op::Le)));
    } else if (t.sort().builtin == BuiltinSort::Nat) {
      side_.push_back(Formula::lit(row({{{id}, Q(-1)}}, Row::Op::Le)));
    }
    return id;
  }

  int fresh_atom(const Term& key) {
    // Division and absolute value terms are keyed by their own syntax.
    return atom(key, false);
  }

  // Linear row for p (op) 0; products of atoms become atoms of their own.
  Row row(const Poly& p, Row::Op op) {
    Row r;
    r.op = op;
    for (const auto& [m, c] : p) {
      if (m.empty()) {
        r.constant += c;
      } else if (m.size() == 1) {
        r.coef[m[0]] += c;
      } else {
        auto it = monomials_.find(m);
        int id;
        if (it == monomials_.end()) {
          id = kMonomialBase + static_cast<int>(monomials_.size());
          monomials_.emplace(m, id);
          exact_ = false;
        } else {
          id = it->second;
        }
        r.coef[id] += c;
      }
    }
    return r;
  }

  // p <= -1, for integer-valued p: scale to integer coefficients first.
  Formula negative(const Poly& p) {
    Row r = row(p, Row::Op::Le);
    lia::scale_to_integers(r);
    r.constant += 1;
    return Formula::lit(r);
  }

  Formula compare(Builtin op, const Poly& l, const Poly& r, bool positive) {
    Poly d = l;
    add_into(d, r, Q(-1));  // d = l - r
    Poly nd;
    add_into(nd, d, Q(-1));
    if (!positive) {
      switch (op) {
        case Builtin::Lt: op = Builtin::Ge; break;
        case Builtin::Le: op = Builtin::Gt; break;
        case Builtin::Gt: op = Builtin::Le; break;
        case Builtin::Ge: op = Builtin::Lt; break;
        case Builtin::Eq: op = Builtin::Ne; break;
        case Builtin::Ne: op = Builtin::Eq; break;
        default: break;
      }
    }
    switch (op) {
      case Builtin::Lt: return negative(d);
      case Builtin::Gt: return negative(nd);
      case Builtin::Le: return Formula::lit(row(d, Row::Op::Le));
      case Builtin::Ge: return Formula::lit(row(nd, Row::Op::Le));
      case Builtin::Eq: return Formula::lit(row(d, Row::Op::Eq));
      case Builtin::Ne: return Formula::either({negative(d), negative(nd)});
      default: throw Unsupported{"comparison"};
    }
  }

  Formula opaque_bool(const Term& t, bool positive) {
    int id = atom(t, true);
    Poly p{{{id}, Q(1)}};
    if (positive) p[{}] = Q(-1);
    return Formula::lit(row(p, Row::Op::Eq));
  }

  Formula bool_term(const Term& raw, bool positive) {
    Term t = simplify(raw);
    if (t.kind() == Term::Kind::Bool) return Formula::truth(t.bool_value() == positive);
    if (t.is_var()) return opaque_bool(t, positive);
    if (!t.is_app()) throw Unsupported{"boolean term " + to_string(t)};
    const auto& f = t.symbol();
    switch (f.builtin) {
      case Builtin::Not:
        return bool_term(t.arg(0), !positive);
      case Builtin::And:
      case Builtin::Or: {
        std::vector<Formula> ks{bool_term(t.arg(0), positive), bool_term(t.arg(1), positive)};
        bool conj = (f.builtin == Builtin::And) == positive;
        return conj ? Formula::both(std::move(ks)) : Formula::either(std::move(ks));
      }
      case Builtin::Lt:
      case Builtin::Le:
      case Builtin::Gt:
      case Builtin::Ge:
        return compare(f.builtin, poly(t.arg(0)), poly(t.arg(1)), positive);
      case Builtin::Eq:
      case Builtin::Ne: {
        const Sort& s = t.arg(0).sort();
        bool eq = (f.builtin == Builtin::Eq) == positive;
        if (s.is_numeric()) {
          return compare(Builtin::Eq, poly(t.arg(0)), poly(t.arg(1)), eq);
        }
        if (s.builtin == BuiltinSort::Bool) {
          Formula a = bool_term(t.arg(0), true), b = bool_term(t.arg(1), true);
          Formula na = bool_term(t.arg(0), false), nb = bool_term(t.arg(1), false);
          if (eq) {
            return Formula::either({Formula::both({a, b}), Formula::both({na, nb})});
          }
          return Formula::either({Formula::both({a, nb}), Formula::both({na, b})});
        }
        if (auto known = constructor_equality(t.arg(0), t.arg(1))) return Formula::truth(*known == eq);
        FunctionSymbol eq_sym = f;
        eq_sym.builtin = Builtin::Eq;
        return opaque_bool(Term::app(std::make_shared<const FunctionSymbol>(eq_sym), {t.arg(0), t.arg(1)}), eq);
      }
      default:
        return opaque_bool(t, positive);
    }
  }

  // Equality of terms over free constructors and open-sort constants, when
  // it is decided by their syntax alone.
  static std::optional<bool> constructor_equality(const Term& a, const Term& b) {
    if (a == b) return true;
    if (a.kind() == Term::Kind::Atom && b.kind() == Term::Kind::Atom) return false;
    if (a.is_app() && b.is_app() && !a.symbol().interpreted() && !b.symbol().interpreted() &&
        a.symbol().builtin == Builtin::None && b.symbol().builtin == Builtin::None) {
      if (!a.symbol().same_as(b.symbol())) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        auto r = constructor_equality(a.arg(i), b.arg(i));
        if (!r) return std::nullopt;
        if (!*r) return false;
      }
      return true;
    }
    return std::nullopt;
  }

  Poly poly(const Term& raw) {
    Term t = simplify(raw);
    if (t.kind() == Term::Kind::Int) return constant_poly(Q(t.int_value()));
    if (t.is_var()) return Poly{{{atom(t, false)}, Q(1)}};
    if (!t.is_app()) throw Unsupported{"numeric term " + to_string(t)};
    const auto& f = t.symbol();
    switch (f.builtin) {
      case Builtin::Add: {
        Poly p = poly(t.arg(0));
        add_into(p, poly(t.arg(1)), Q(1));
        return p;
      }
      case Builtin::Sub: {
        Poly p = poly(t.arg(0));
        add_into(p, poly(t.arg(1)), Q(-1));
        return p;
      }
      case Builtin::Mul: {
        Poly p = multiply(poly(t.arg(0)), poly(t.arg(1)));
        for (const auto& [m, c] : p) {
          if (m.size() > 4) throw Unsupported{"polynomial degree above 4"};
        }
        return p;
      }
      case Builtin::Div: {
        Poly num = poly(t.arg(0)), den = poly(t.arg(1));
        if (den.size() == 1 && den.count({}) && boost::multiprecision::denominator(den.at({})) == 1) {
          Z c = boost::multiprecision::numerator(den.at({}));
          if (always_divisible(num, c)) {
            Poly p;
            add_into(p, num, Q(1) / Q(c));
            return p;
          }
          return quotient(t, num, c);
        }
        return Poly{{{fresh_atom(t)}, Q(1)}};
      }
      case Builtin::Abs: {
        Poly x = poly(t.arg(0));
        int id = fresh_atom(t);
        Poly a{{{id}, Q(1)}};
        Poly minus_x;
        add_into(minus_x, x, Q(-1));
        side_.push_back(Formula::either({
            Formula::both({compare(Builtin::Ge, x, {}, true), compare(Builtin::Eq, a, x, true)}),
            Formula::both({compare(Builtin::Lt, x, {}, true), compare(Builtin::Eq, a, minus_x, true)}),
        }));
        return a;
      }
      default:
        // lookup(...) and user functions are opaque integers.
        return Poly{{{atom(t, false)}, Q(1)}};
    }
  }

  // t = num / c under truncation toward zero, for a constant c != 0.
  Poly quotient(const Term& t, const Poly& num, const Z& c) {
    if (c == 0) throw Unsupported{"division by zero"};
    int id = fresh_atom(t);
    Z k = c < 0 ? Z(-c) : c;
    Poly q{{{id}, Q(c < 0 ? -1 : 1)}};  // num / c = sign(c) * (num / |c|)
    Poly kq{{{id}, Q(k)}};              // |c| * (num / |c|)
    Poly kq_plus = kq, kq_minus = kq;
    add_into(kq_plus, constant_poly(Q(k - 1)), Q(1));
    add_into(kq_minus, constant_poly(Q(k - 1)), Q(-1));
    side_.push_back(Formula::either({
        Formula::both({compare(Builtin::Ge, num, {}, true), compare(Builtin::Le, kq, num, true),
                       compare(Builtin::Le, num, kq_plus, true)}),
        Formula::both({compare(Builtin::Lt, num, {}, true), compare(Builtin::Ge, kq, num, true),
                       compare(Builtin::Ge, num, kq_minus, true)}),
    }));
    return q;
  }

  static constexpr int kMonomialBase = 1 << 24;

  std::set<std::string> taken_;
  std::vector<Term> atoms_;
  std::map<Term, int> ids_;
  std::map<Monomial, int> monomials_;
  std::vector<Formula> side_;
  bool exact_ = true;
};

struct Search {
  lia::Limits limits;
  std::size_t leaves = 0;
  std::string unknown_reason;

  lia::Outcome run(std::vector<const Formula*> todo, std::vector<Row> lits) {
    while (!todo.empty()) {
      const Formula* f = todo.back();
      todo.pop_back();
      switch (f->kind) {
        case Formula::Kind::True:
          break;
        case Formula::Kind::False:
          return {lia::Outcome::Result::Unsat, {}, {}};
        case Formula::Kind::Lit:
          lits.push_back(f->row);
          break;
        case Formula::Kind::And:
          for (const auto& k : f->kids) todo.push_back(&k);
          break;
        case Formula::Kind::Or: {
          if (lia::rational_feasible(lits, limits) == lia::Outcome::Result::Unsat) {
            return {lia::Outcome::Result::Unsat, {}, {}};
          }
          bool unknown = false;
          for (const auto& k : f->kids) {
            auto next = todo;
            next.push_back(&k);
            lia::Outcome r = run(std::move(next), lits);
            if (r.result == lia::Outcome::Result::Sat) return r;
            if (r.result == lia::Outcome::Result::Unknown) unknown = true;
          }
          return {unknown ? lia::Outcome::Result::Unknown : lia::Outcome::Result::Unsat, {}, {}};
        }
      }
    }
    if (++leaves > 4096) {
      unknown_reason = "too many case splits";
      return {};
    }
    lia::Outcome r = lia::solve_integer(lits, limits);
    if (r.result == lia::Outcome::Result::Unknown) unknown_reason = r.reason;
    return r;
  }
};

// Builtin satisfiability of f: Sat carries a validated witness.
SolverVerdict builtin_decide(const Pattern& f, const SolverOptions& opts) {
  std::set<std::string> taken = all_var_names(f);
  Encoder enc(taken);
  Formula top;
  try {
    top = Formula::both({enc.encode(f, true)});
  } catch (const Unsupported& u) {
    return SolverVerdict::unknown("builtin: " + u.reason);
  } catch (const Error& e) {
    return SolverVerdict::unknown(std::string("builtin: ") + e.what());
  }
  top.kids.insert(top.kids.end(), enc.side().begin(), enc.side().end());
  if (count_literals(top) > opts.max_atoms) {
    return SolverVerdict::unknown("builtin: more than " + std::to_string(opts.max_atoms) + " atoms");
  }
  Search search;
  search.limits.max_vars = opts.max_vars;
  lia::Outcome r = search.run({&top}, {});
  switch (r.result) {
    case lia::Outcome::Result::Unsat:
      return {SolverVerdict::Kind::Unsat, {}, "builtin"};
    case lia::Outcome::Result::Unknown:
      return SolverVerdict::unknown("builtin: " + (search.unknown_reason.empty() ? std::string("limit")
                                                                                  : search.unknown_reason));
    case lia::Outcome::Result::Sat: {
      GroundValuation w = enc.witness(r.model, free_vars(f));
      if (!witness_checks(f, w, true)) {
        return SolverVerdict::unknown("builtin: model of the linear abstraction is not a model");
      }
      return {SolverVerdict::Kind::Sat, w, "builtin"};
    }
  }
  return SolverVerdict::unknown("builtin");
}

}  // namespace

std::string to_string(SolverVerdict::Kind k) {
  switch (k) {
    case SolverVerdict::Kind::Valid: return "Valid";
    case SolverVerdict::Kind::Invalid: return "Invalid";
    case SolverVerdict::Kind::Sat: return "Sat";
    case SolverVerdict::Kind::Unsat: return "Unsat";
    case SolverVerdict::Kind::Unknown: return "Unknown";
  }
  return "?";
}

bool witness_checks(const Pattern& f, const GroundValuation& witness, bool expected) {
  for (const auto& v : free_vars(f)) {
    if (!witness.contains(v)) return false;
  }
  try {
    SatContext ctx;
    return satisfies(Term::boolean(true), witness, f, ctx) == expected;
  } catch (const Error&) {
    return false;
  }
}

SolverQuery make_sat_query(const Pattern& f) {
  SolverQuery q;
  q.assertions = {f};
  q.goal = SolverQuery::Goal::CheckSat;
  for (const auto& v : free_vars(f)) q.declared_vars.push_back(v);
  return q;
}

SolverQuery make_valid_query(const Pattern& f) {
  SolverQuery q;
  q.goal = SolverQuery::Goal::CheckValid;
  q.formula = f;
  for (const auto& v : free_vars(f)) q.declared_vars.push_back(v);
  return q;
}

std::string detect_external_solver(const std::optional<std::string>& flag, bool disabled) {
  if (disabled) return "";
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("RL_SOLVER"); env && *env) return env;
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    for (std::string dir; std::getline(ss, dir, ':');) {
      std::filesystem::path candidate = std::filesystem::path(dir) / "z3";
      std::error_code ec;
      if (std::filesystem::is_regular_file(candidate, ec)) return candidate.string() + " -in";
    }
  }
  return "";
}

Solver::Solver(SolverOptions options) : options_(std::move(options)) {}

SolverVerdict Solver::builtin_sat(const Pattern& f) const { return builtin_decide(simplify(f), options_); }

SolverVerdict Solver::builtin_valid(const Pattern& f) const {
  Pattern g = simplify(f);
  SolverVerdict v = builtin_decide(Pattern::neg(g), options_);
  if (v.kind == SolverVerdict::Kind::Unsat) return {SolverVerdict::Kind::Valid, {}, v.reason};
  if (v.kind == SolverVerdict::Kind::Sat) return {SolverVerdict::Kind::Invalid, v.witness, v.reason};
  return v;
}

SolverVerdict Solver::run(const Pattern& f, bool valid) {
  ++stats_.queries;
  std::string key = (valid ? "valid " : "sat ") + to_string(f);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  SolverVerdict v = valid ? builtin_valid(f) : builtin_sat(f);
  if (v.definite()) {
    ++stats_.builtin_definite;
  } else if (!options_.external.empty()) {
    ++stats_.external_calls;
    SolverVerdict ext = external(valid ? make_valid_query(f) : make_sat_query(f));
    if (ext.definite()) {
      v = ext;
    } else {
      v.reason += "; " + ext.reason;
    }
  }
  if (!v.definite()) ++stats_.unknown;
  cache_.emplace(std::move(key), v);
  return v;
}

SolverVerdict Solver::check_valid(const Pattern& f) { return run(f, true); }
SolverVerdict Solver::check_sat(const Pattern& f) { return run(f, false); }
SolverVerdict Solver::implies(const Pattern& hyp, const Pattern& concl) {
  return run(Pattern::disj(Pattern::neg(hyp), concl), true);
}

}  // namespace rl
