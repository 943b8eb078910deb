#include "rl/terms.hpp"

#include <algorithm>
#include <sstream>

namespace rl {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

Sort make_builtin_sort(const char* name, BuiltinSort kind) {
  Sort s;
  s.name = name;
  s.builtin = kind;
  return s;
}

}  // namespace

const Sort& int_sort() {
  static const Sort s = make_builtin_sort("Int", BuiltinSort::Int);
  return s;
}
const Sort& bool_sort() {
  static const Sort s = make_builtin_sort("Bool", BuiltinSort::Bool);
  return s;
}
const Sort& nat_sort() {
  static const Sort s = make_builtin_sort("Nat", BuiltinSort::Nat);
  return s;
}

bool sort_accepts(const Sort& expected, const Sort& actual) {
  if (expected == actual) return true;
  return expected.builtin == BuiltinSort::Int && actual.builtin == BuiltinSort::Nat;
}

// ---------------------------------------------------------------------------
// Term

Term Term::var(const Variable& v) { return var(v.name, v.sort); }

Term Term::var(std::string name, Sort sort) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Var;
  node->hash = mix(mix(1, std::hash<std::string>{}(name)), std::hash<std::string>{}(sort.name));
  node->name = std::move(name);
  node->sort = std::move(sort);
  node->ground = false;
  return Term(std::move(node));
}

Term Term::app(SymbolPtr symbol, std::vector<Term> args) {
  if (!symbol) throw Error(Error::Kind::IllSorted, "null function symbol");
  if (args.size() != symbol->arg_sorts.size()) {
    throw Error(Error::Kind::IllSorted, "symbol " + symbol->name + " expects " +
                                            std::to_string(symbol->arg_sorts.size()) +
                                            " arguments, got " + std::to_string(args.size()));
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::App;
  std::size_t h = mix(2, std::hash<std::string>{}(symbol->name));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!sort_accepts(symbol->arg_sorts[i], args[i].sort())) {
      throw Error(Error::Kind::IllSorted,
                  "argument " + std::to_string(i + 1) + " of " + symbol->name + " has sort " +
                      args[i].sort().name + ", expected " + symbol->arg_sorts[i].name);
    }
    h = mix(h, args[i].hash());
    node->ground = node->ground && args[i].is_ground();
  }
  node->hash = h;
  node->sort = symbol->result;
  node->symbol = std::move(symbol);
  node->args = std::move(args);
  return Term(std::move(node));
}

Term Term::integer(std::int64_t value, const Sort& sort) {
  if (!sort.is_numeric()) throw Error(Error::Kind::IllSorted, "integer literal of sort " + sort.name);
  if (sort.builtin == BuiltinSort::Nat && value < 0) {
    throw Error(Error::Kind::NatUnderflow, "negative Nat literal " + std::to_string(value));
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Int;
  node->sort = sort;
  node->value = value;
  node->hash = mix(3, std::hash<std::int64_t>{}(value));
  return Term(std::move(node));
}

Term Term::boolean(bool value) {
  static const Term t = [] {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Bool;
    node->sort = bool_sort();
    node->value = 1;
    node->hash = mix(4, 1);
    return Term(std::move(node));
  }();
  static const Term f = [] {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Bool;
    node->sort = bool_sort();
    node->value = 0;
    node->hash = mix(4, 0);
    return Term(std::move(node));
  }();
  return value ? t : f;
}

Term Term::atom(std::string name, Sort sort) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Atom;
  node->hash = mix(5, std::hash<std::string>{}(name));
  node->name = std::move(name);
  node->sort = std::move(sort);
  return Term(std::move(node));
}

const std::string& Term::name() const {
  if (kind() == Kind::App) return node_->symbol->name;
  return node_->name;
}

Variable Term::variable() const {
  if (!is_var()) throw std::logic_error("Term::variable on non-variable " + to_string(*this));
  return Variable{node_->name, node_->sort};
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Int:
    case Kind::Bool:
      if (a.node_->value == b.node_->value) return 0;
      return a.node_->value < b.node_->value ? -1 : 1;
    case Kind::Var:
    case Kind::Atom:
      if (int c = a.node_->name.compare(b.node_->name)) return c < 0 ? -1 : 1;
      if (int c = a.node_->sort.name.compare(b.node_->sort.name)) return c < 0 ? -1 : 1;
      return 0;
    case Kind::App: {
      const auto& fa = *a.node_->symbol;
      const auto& fb = *b.node_->symbol;
      if (int c = fa.name.compare(fb.name)) return c < 0 ? -1 : 1;
      if (fa.arg_sorts != fb.arg_sorts) {
        return std::lexicographical_compare(fa.arg_sorts.begin(), fa.arg_sorts.end(),
                                            fb.arg_sorts.begin(), fb.arg_sorts.end())
                   ? -1
                   : 1;
      }
      for (std::size_t i = 0; i < a.node_->args.size(); ++i) {
        if (int c = compare(a.node_->args[i], b.node_->args[i])) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return Term::compare(a, b) == 0;
}

bool operator<(const Term& a, const Term& b) { return Term::compare(a, b) < 0; }

// ---------------------------------------------------------------------------
// Signature

Signature::Signature() {
  sorts_ = {int_sort(), bool_sort(), nat_sort()};
  auto add = [this](const std::string& name, std::vector<Sort> args, const Sort& result,
                    Builtin b) {
    FunctionSymbol f;
    f.name = name;
    f.arg_sorts = std::move(args);
    f.result = result;
    f.builtin = b;
    symbols_.push_back(std::make_shared<const FunctionSymbol>(std::move(f)));
  };
  const Sort& I = int_sort();
  const Sort& B = bool_sort();
  const Sort& N = nat_sort();
  const std::pair<const char*, Builtin> arith[] = {
      {"+", Builtin::Add}, {"-", Builtin::Sub}, {"*", Builtin::Mul}, {"/", Builtin::Div}};
  for (const auto& [name, b] : arith) {
    add(name, {N, N}, N, b);
    add(name, {I, I}, I, b);
  }
  add("abs", {I}, N, Builtin::Abs);
  const std::pair<const char*, Builtin> cmp[] = {{"<", Builtin::Lt}, {"<=", Builtin::Le},
                                                 {">", Builtin::Gt}, {">=", Builtin::Ge},
                                                 {"=", Builtin::Eq}, {"!=", Builtin::Ne}};
  for (const auto& [name, b] : cmp) add(name, {I, I}, B, b);
  add("=", {B, B}, B, Builtin::Eq);
  add("!=", {B, B}, B, Builtin::Ne);
  add("!", {B}, B, Builtin::Not);
  add("&&", {B, B}, B, Builtin::And);
  add("||", {B, B}, B, Builtin::Or);
  builtin_symbol_count_ = symbols_.size();
}

void Signature::add_sort(Sort sort) {
  if (has_sort(sort.name)) {
    throw Error(Error::Kind::NameCollision, "sort " + sort.name + " already declared");
  }
  sorts_.push_back(std::move(sort));
}

SymbolPtr Signature::add_symbol(FunctionSymbol symbol) {
  for (const auto& s : symbol.arg_sorts) {
    if (!has_sort(s.name)) throw Error(Error::Kind::IllSorted, "unknown sort " + s.name);
  }
  if (!has_sort(symbol.result.name)) {
    throw Error(Error::Kind::IllSorted, "unknown sort " + symbol.result.name);
  }
  for (const auto& existing : symbols_) {
    if (existing->same_as(symbol)) {
      throw Error(Error::Kind::NameCollision, "symbol " + symbol.name + " already declared");
    }
  }
  auto ptr = std::make_shared<const FunctionSymbol>(std::move(symbol));
  symbols_.push_back(ptr);
  return ptr;
}

bool Signature::has_sort(const std::string& name) const {
  return std::any_of(sorts_.begin(), sorts_.end(), [&](const Sort& s) { return s.name == name; });
}

const Sort& Signature::sort(const std::string& name) const {
  for (const auto& s : sorts_) {
    if (s.name == name) return s;
  }
  throw Error(Error::Kind::IllSorted, "unknown sort " + name);
}

std::vector<SymbolPtr> Signature::overloads(const std::string& name) const {
  std::vector<SymbolPtr> out;
  for (const auto& s : symbols_) {
    if (s->name == name) out.push_back(s);
  }
  return out;
}

SymbolPtr Signature::resolve(const std::string& name, std::span<const Sort> arg_sorts) const {
  for (const auto& s : symbols_) {
    if (s->name != name || s->arg_sorts.size() != arg_sorts.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < arg_sorts.size() && ok; ++i) {
      ok = sort_accepts(s->arg_sorts[i], arg_sorts[i]);
    }
    if (ok) return s;
  }
  return nullptr;
}

SymbolPtr Signature::find_builtin(Builtin builtin) const {
  for (const auto& s : symbols_) {
    if (s->builtin == builtin) return s;
  }
  return nullptr;
}

SymbolPtr Signature::arithmetic(Builtin op, const Sort& lhs, const Sort& rhs) const {
  for (const auto& s : symbols_) {
    if (s->builtin != op || s->arg_sorts.size() != 2) continue;
    if (sort_accepts(s->arg_sorts[0], lhs) && sort_accepts(s->arg_sorts[1], rhs)) return s;
  }
  throw Error(Error::Kind::IllSorted, "no builtin operation for " + lhs.name + ", " + rhs.name);
}

std::vector<SymbolPtr> Signature::user_symbols() const {
  return {symbols_.begin() + static_cast<std::ptrdiff_t>(builtin_symbol_count_), symbols_.end()};
}

std::vector<Sort> Signature::user_sorts() const { return {sorts_.begin() + 3, sorts_.end()}; }

void Signature::set_cfg_sort(const std::string& name) {
  if (!has_sort(name)) throw Error(Error::Kind::IllSorted, "unknown configuration sort " + name);
  cfg_sort_ = name;
}

const Sort& Signature::cfg_sort() const {
  if (!cfg_sort_) throw Error(Error::Kind::Input, "signature has no configuration sort");
  return sort(*cfg_sort_);
}

// ---------------------------------------------------------------------------
// Substitution

void Substitution::bind(const Variable& v, const Term& t) {
  if (!sort_accepts(v.sort, t.sort())) {
    throw Error(Error::Kind::IllSorted,
                "cannot bind " + v.name + ":" + v.sort.name + " to a term of sort " + t.sort().name);
  }
  map_.insert_or_assign(v, t);
}

const Term* Substitution::find(const Variable& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Substitution Substitution::compose(const Substitution& other) const {
  Substitution out;
  for (const auto& [v, t] : other.map_) out.map_.insert_or_assign(v, apply_substitution(*this, t));
  for (const auto& [v, t] : map_) {
    if (!other.contains(v)) out.map_.insert_or_assign(v, t);
  }
  return out;
}

Substitution Substitution::normalized() const {
  Substitution cur = *this;
  for (std::size_t round = 0; round <= map_.size() + 1; ++round) {
    bool changed = false;
    Substitution next;
    for (const auto& [v, t] : cur.map_) {
      Term u = apply_substitution(cur, t);
      if (u != t) changed = true;
      next.map_.insert_or_assign(v, u);
    }
    if (!changed) return next;
    cur = std::move(next);
  }
  throw Error(Error::Kind::Input, "cyclic substitution " + to_string(*this));
}

// ---------------------------------------------------------------------------

Sort sort_of(const Term& t, const Signature& sig) {
  if (t.is_app()) {
    const auto& f = t.symbol();
    for (std::size_t i = 0; i < f.arg_sorts.size(); ++i) {
      Sort child = sort_of(t.arg(i), sig);
      if (!sort_accepts(f.arg_sorts[i], child)) {
        throw Error(Error::Kind::IllSorted, "ill-sorted argument in " + to_string(t));
      }
    }
    if (!sig.has_sort(f.result.name)) throw Error(Error::Kind::IllSorted, "unknown sort " + f.result.name);
  }
  return t.sort();
}

Term apply_substitution(const Substitution& sigma, const Term& t) {
  if (sigma.empty() || t.is_ground()) return t;
  switch (t.kind()) {
    case Term::Kind::Var: {
      const Term* image = sigma.find(t.variable());
      return image ? *image : t;
    }
    case Term::Kind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const auto& a : t.args()) {
        args.push_back(apply_substitution(sigma, a));
        changed = changed || args.back() != a;
      }
      return changed ? Term::app(t.symbol_ptr(), std::move(args)) : t;
    }
    default:
      return t;
  }
}

namespace {

bool match_into(const Term& pat, const Term& subject, Substitution& sigma) {
  switch (pat.kind()) {
    case Term::Kind::Var: {
      Variable v = pat.variable();
      if (const Term* bound = sigma.find(v)) return *bound == subject;
      if (!sort_accepts(v.sort, subject.sort())) return false;
      sigma.bind(v, subject);
      return true;
    }
    case Term::Kind::App:
      if (!subject.is_app() || !pat.symbol().same_as(subject.symbol())) return false;
      for (std::size_t i = 0; i < pat.args().size(); ++i) {
        if (!match_into(pat.arg(i), subject.arg(i), sigma)) return false;
      }
      return true;
    default:
      return pat == subject;
  }
}

}  // namespace

std::optional<Substitution> match_term(const Term& lhs, const Term& subject) {
  Substitution sigma;
  if (!match_into(lhs, subject, sigma)) return std::nullopt;
  return sigma;
}

bool occurs(const Variable& v, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return t.variable() == v;
  for (const auto& a : t.args()) {
    if (occurs(v, a)) return true;
  }
  return false;
}

std::optional<Unifier> unify(const Term& t1, const Term& t2,
                             const std::function<bool(const Variable&)>& bindable) {
  auto can_bind = [&](const Term& t) { return t.is_var() && (!bindable || bindable(t.variable())); };
  Unifier result;
  std::vector<std::pair<Term, Term>> work{{t1, t2}};

  auto bind = [&](const Variable& v, const Term& t) {
    Substitution single;
    single.bind(v, t);
    Substitution updated;
    for (const auto& [w, image] : result.mgu) updated.bind(w, apply_substitution(single, image));
    updated.bind(v, t);
    result.mgu = std::move(updated);
  };

  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = apply_substitution(result.mgu, a);
    b = apply_substitution(result.mgu, b);
    if (a == b) continue;

    const bool builtin_a = a.sort().is_builtin();
    const bool builtin_b = b.sort().is_builtin();
    if (builtin_a || builtin_b) {
      const bool bool_a = a.sort().builtin == BuiltinSort::Bool;
      const bool bool_b = b.sort().builtin == BuiltinSort::Bool;
      if (!builtin_a || !builtin_b || bool_a != bool_b) return std::nullopt;
      if (a.is_literal() && b.is_literal()) return std::nullopt;  // distinct values
      // Only variable renamings are solved here; every other builtin-sorted
      // equation is left to the constraint backend.
      if (a.is_var() && b.is_var()) {
        if (can_bind(b) && sort_accepts(b.sort(), a.sort())) {
          bind(b.variable(), a);
          continue;
        }
        if (can_bind(a) && sort_accepts(a.sort(), b.sort())) {
          bind(a.variable(), b);
          continue;
        }
      }
      result.residual.emplace_back(a, b);
      continue;
    }

    if (can_bind(b)) {
      if (occurs(b.variable(), a) || !sort_accepts(b.sort(), a.sort())) return std::nullopt;
      bind(b.variable(), a);
      continue;
    }
    if (can_bind(a)) {
      if (occurs(a.variable(), b) || !sort_accepts(a.sort(), b.sort())) return std::nullopt;
      bind(a.variable(), b);
      continue;
    }
    if (a.is_app() && b.is_app() && a.symbol().same_as(b.symbol())) {
      for (std::size_t i = a.args().size(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
      continue;
    }
    return std::nullopt;
  }

  std::vector<std::pair<Term, Term>> residual;
  for (auto& [a, b] : result.residual) {
    Term x = simplify(apply_substitution(result.mgu, a));
    Term y = simplify(apply_substitution(result.mgu, b));
    if (x == y) continue;
    if (x.is_literal() && y.is_literal()) return std::nullopt;
    residual.emplace_back(std::move(x), std::move(y));
  }
  result.residual = std::move(residual);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

Term make_number(std::int64_t v, const Sort& result) {
  if (result.builtin == BuiltinSort::Nat && v < 0) {
    throw Error(Error::Kind::NatUnderflow, "Nat subtraction below zero (" + std::to_string(v) + ")");
  }
  return Term::integer(v, result);
}

// Applies an interpreted symbol to literal arguments.
std::optional<Term> apply_builtin(const FunctionSymbol& f, std::span<const Term> args) {
  auto all_literal = std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_literal(); });
  switch (f.builtin) {
    case Builtin::Add:
    case Builtin::Sub:
    case Builtin::Mul:
    case Builtin::Div: {
      if (!all_literal) return std::nullopt;
      std::int64_t a = args[0].int_value(), b = args[1].int_value(), r = 0;
      bool overflow = false;
      switch (f.builtin) {
        case Builtin::Add: overflow = __builtin_add_overflow(a, b, &r); break;
        case Builtin::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
        case Builtin::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
        default:
          if (b == 0) throw Error(Error::Kind::DivisionByZero, "division by zero");
          if (a == INT64_MIN && b == -1) overflow = true;
          else r = a / b;  // truncation toward zero
      }
      if (overflow) throw Error(Error::Kind::Overflow, "integer overflow");
      return make_number(r, f.result);
    }
    case Builtin::Abs:
      if (!all_literal) return std::nullopt;
      return Term::integer(args[0].int_value() < 0 ? -args[0].int_value() : args[0].int_value(),
                           nat_sort());
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge: {
      if (!all_literal) return std::nullopt;
      std::int64_t a = args[0].int_value(), b = args[1].int_value();
      bool r = f.builtin == Builtin::Lt   ? a < b
               : f.builtin == Builtin::Le ? a <= b
               : f.builtin == Builtin::Gt ? a > b
                                          : a >= b;
      return Term::boolean(r);
    }
    case Builtin::Eq:
      if (all_literal) return Term::boolean(args[0] == args[1]);
      if (args[0] == args[1]) return Term::boolean(true);
      return std::nullopt;
    case Builtin::Ne:
      if (all_literal) return Term::boolean(args[0] != args[1]);
      if (args[0] == args[1]) return Term::boolean(false);
      return std::nullopt;
    case Builtin::Not:
      if (!all_literal) return std::nullopt;
      return Term::boolean(!args[0].bool_value());
    case Builtin::And:
      if (all_literal) return Term::boolean(args[0].bool_value() && args[1].bool_value());
      return std::nullopt;
    case Builtin::Or:
      if (all_literal) return Term::boolean(args[0].bool_value() || args[1].bool_value());
      return std::nullopt;
    case Builtin::HeadIs:
      if (args[0].is_app()) return Term::boolean(args[0].symbol().name == f.builtin_arg);
      if (args[0].is_var()) return std::nullopt;
      return Term::boolean(false);
    case Builtin::Lookup: {
      const Term& key = args[0];
      Term env = args[1];
      while (true) {
        if (env.is_app() && env.symbol().builtin == Builtin::EmptyEnv) {
          return Term::integer(0, f.result);
        }
        if (!env.is_app() || env.symbol().builtin != Builtin::Update) return std::nullopt;
        const Term& bound = env.arg(0);
        if (bound == key) return env.arg(1);
        if (!bound.is_ground() || !key.is_ground()) return std::nullopt;
        env = env.arg(2);
      }
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

Term evaluate_ground(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      throw Error(Error::Kind::NotGround, "cannot evaluate variable " + t.name());
    case Term::Kind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(evaluate_ground(a));
      const auto& f = t.symbol();
      if (f.interpreted()) {
        if (auto r = apply_builtin(f, args)) return *r;
        throw Error(Error::Kind::Input, "cannot evaluate " + to_string(t));
      }
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    default:
      return t;
  }
}

namespace {

bool is_int_lit(const Term& t) { return t.kind() == Term::Kind::Int; }

Term simplify_app(const Term& t, std::vector<Term> args) {
  const auto& f = t.symbol();
  if (!f.interpreted()) return Term::app(t.symbol_ptr(), std::move(args));
  try {
    if (auto r = apply_builtin(f, args)) return *r;
  } catch (const Error& e) {
    if (e.kind() != Error::Kind::DivisionByZero && e.kind() != Error::Kind::NatUnderflow &&
        e.kind() != Error::Kind::Overflow) {
      throw;
    }
    return Term::app(t.symbol_ptr(), std::move(args));
  }
  const Term& a = args.empty() ? t : args[0];
  switch (f.builtin) {
    case Builtin::Add:
    case Builtin::Sub: {
      const Term& b = args[1];
      if (is_int_lit(b) && b.int_value() == 0) return a;
      if (f.builtin == Builtin::Add && is_int_lit(a) && a.int_value() == 0) return b;
      // (x + c1) + c2 and (x - c1) - c2 fold their literals. Mixed signs are
      // only folded over Int, where no intermediate underflow can be lost.
      const auto inner = a.is_app() ? a.symbol().builtin : Builtin::None;
      if (is_int_lit(b) && (inner == Builtin::Add || inner == Builtin::Sub) &&
          a.symbol().result == f.result && is_int_lit(a.arg(1)) &&
          (inner == f.builtin || f.result.builtin == BuiltinSort::Int)) {
        std::int64_t c1 = inner == Builtin::Add ? a.arg(1).int_value() : -a.arg(1).int_value();
        std::int64_t c2 = f.builtin == Builtin::Add ? b.int_value() : -b.int_value();
        std::int64_t c = 0;
        if (!__builtin_add_overflow(c1, c2, &c) && c != INT64_MIN) {
          const Term& x = a.arg(0);
          if (c == 0) return x;
          const bool add = c > 0;
          const auto& sym = (add == (inner == Builtin::Add)) ? a.symbol_ptr() : t.symbol_ptr();
          if ((sym->builtin == Builtin::Add) == add) {
            return Term::app(sym, {x, Term::integer(add ? c : -c, f.result)});
          }
        }
      }
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    case Builtin::Mul: {
      const Term& b = args[1];
      if (is_int_lit(b) && b.int_value() == 1) return a;
      if (is_int_lit(a) && a.int_value() == 1) return b;
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    case Builtin::Not: {
      if (a.is_app() && a.symbol().builtin == Builtin::Not) return a.arg(0);
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    case Builtin::Eq:
    case Builtin::Ne: {
      // b = true -> b, b = false -> !b on Bool operands.
      if (args[0].sort().builtin == BuiltinSort::Bool) {
        for (int side = 0; side < 2; ++side) {
          const Term& lit = args[side];
          const Term& other = args[1 - side];
          if (lit.kind() != Term::Kind::Bool) continue;
          bool positive = lit.bool_value() == (f.builtin == Builtin::Eq);
          if (positive) return other;
          FunctionSymbol not_f;
          not_f.name = "!";
          not_f.arg_sorts = {bool_sort()};
          not_f.result = bool_sort();
          not_f.builtin = Builtin::Not;
          if (other.is_app() && other.symbol().builtin == Builtin::Not) return other.arg(0);
          return Term::app(std::make_shared<const FunctionSymbol>(not_f), {other});
        }
      }
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    case Builtin::Lookup: {
      // Skip updates of other identifiers; the rest of the environment may
      // be symbolic.
      Term env = args[1];
      while (env.is_app() && env.symbol().builtin == Builtin::Update && env.arg(0).is_ground() &&
             a.is_ground() && env.arg(0) != a) {
        env = env.arg(2);
      }
      return Term::app(t.symbol_ptr(), {a, env});
    }
    case Builtin::And:
    case Builtin::Or: {
      const bool is_and = f.builtin == Builtin::And;
      for (int side = 0; side < 2; ++side) {
        const Term& lit = args[side];
        if (lit.kind() != Term::Kind::Bool) continue;
        if (lit.bool_value() == is_and) return args[1 - side];
        return lit;
      }
      return Term::app(t.symbol_ptr(), std::move(args));
    }
    default:
      return Term::app(t.symbol_ptr(), std::move(args));
  }
}

}  // namespace

Term simplify(const Term& t) {
  if (!t.is_app()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(simplify(a));
  return simplify_app(t, std::move(args));
}

// ---------------------------------------------------------------------------

void collect_vars(const Term& t, VarSet& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.insert(t.variable());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

VarSet free_vars(const Term& t) {
  VarSet out;
  collect_vars(t, out);
  return out;
}

std::set<std::string> names_of(const VarSet& vars) {
  std::set<std::string> out;
  for (const auto& v : vars) out.insert(v.name);
  return out;
}

Variable fresh_variable(const std::string& base, const Sort& sort,
                        const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return Variable{base, sort};
  // Digits go before trailing primes so the name still reads back: n' -> n0'.
  std::size_t cut = base.find_last_not_of('\'') + 1;
  std::string stem = base.substr(0, cut), primes = base.substr(cut);
  for (std::size_t i = 0;; ++i) {
    std::string candidate = stem + std::to_string(i) + primes;
    if (!avoid.count(candidate)) return Variable{candidate, sort};
  }
}

Variable fresh_variable(const std::string& base, const Sort& sort, const VarSet& avoid) {
  return fresh_variable(base, sort, names_of(avoid));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Term& t) {
  if (t.kind() == Term::Kind::Int && t.int_value() < 0) return 6;
  if (!t.is_app()) return 7;
  switch (t.symbol().builtin) {
    case Builtin::Or: return 1;
    case Builtin::And: return 2;
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge:
    case Builtin::Eq:
    case Builtin::Ne: return 3;
    case Builtin::Add:
    case Builtin::Sub: return 4;
    case Builtin::Mul:
    case Builtin::Div: return 5;
    case Builtin::Not: return 6;
    default: return 7;
  }
}

void print(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Atom:
      os << t.name();
      return;
    case Term::Kind::Int:
      os << t.int_value();
      return;
    case Term::Kind::Bool:
      os << (t.bool_value() ? "true" : "false");
      return;
    case Term::Kind::App:
      break;
  }
  const auto& f = t.symbol();
  const int p = precedence(t);
  auto child = [&](const Term& c, bool right) {
    int cp = precedence(c);
    bool parens = cp < p || (right && cp == p && p < 7) || (p == 3 && cp == 3);
    if (parens) os << '(';
    print(os, c);
    if (parens) os << ')';
  };
  if (f.builtin == Builtin::Pair) {
    os << '(';
    print(os, t.arg(0));
    os << ", ";
    print(os, t.arg(1));
    os << ')';
    return;
  }
  if (p >= 1 && p <= 5 && t.args().size() == 2) {
    child(t.arg(0), false);
    os << ' ' << f.name << ' ';
    child(t.arg(1), true);
    return;
  }
  if (f.builtin == Builtin::Not) {
    os << '!';
    child(t.arg(0), false);
    return;
  }
  if (f.name == "[]") {
    os << '[';
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i) os << ", ";
      print(os, t.arg(i));
    }
    os << ']';
    return;
  }
  os << f.name;
  if (t.args().empty()) return;
  os << '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) os << ", ";
    print(os, t.arg(i));
  }
  os << ')';
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

std::string to_string(const Variable& v) { return v.name + ":" + v.sort.name; }

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += v.name + " |-> " + to_string(t);
  }
  return out + "}";
}

}  // namespace rl
