#pragma once

// Many-sorted signatures and first-order terms over them.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rl {

class Error : public std::runtime_error {
 public:
  enum class Kind {
    IllSorted,
    DivisionByZero,
    NatUnderflow,
    Overflow,
    NotGround,
    RhsVariableUnbound,
    NonEnumerableQuantifier,
    UnsupportedFragment,
    NameCollision,
    Parse,
    Input,
    MalformedReply,
    SolverCrashed,
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class BuiltinSort { None, Int, Bool, Nat };

struct Sort {
  std::string name;
  BuiltinSort builtin = BuiltinSort::None;
  // Constants of an open sort are arbitrary identifiers (program variables).
  bool open = false;

  bool is_numeric() const {
    return builtin == BuiltinSort::Int || builtin == BuiltinSort::Nat;
  }
  bool is_builtin() const { return builtin != BuiltinSort::None; }

  friend bool operator==(const Sort& a, const Sort& b) { return a.name == b.name; }
  friend bool operator<(const Sort& a, const Sort& b) { return a.name < b.name; }
};

const Sort& int_sort();
const Sort& bool_sort();
const Sort& nat_sort();

/// True when a term of sort `actual` may stand where `expected` is required.
/// Nat is treated as a subsort of Int.
bool sort_accepts(const Sort& expected, const Sort& actual);

enum class Builtin {
  None,
  Add,
  Sub,
  Mul,
  Div,
  Abs,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Not,
  And,
  Or,
  Lookup,
  Update,
  EmptyEnv,
  HeadIs,
  Pair,
};

struct FunctionSymbol {
  std::string name;
  std::vector<Sort> arg_sorts;
  Sort result;
  Builtin builtin = Builtin::None;
  // HeadIs: name of the injection symbol being tested for.
  std::string builtin_arg;

  /// Interpreted symbols are reduced by evaluation; the rest are free constructors.
  bool interpreted() const {
    return builtin != Builtin::None && builtin != Builtin::Update &&
           builtin != Builtin::EmptyEnv && builtin != Builtin::Pair;
  }
  bool same_as(const FunctionSymbol& other) const {
    return name == other.name && arg_sorts == other.arg_sorts;
  }
};

using SymbolPtr = std::shared_ptr<const FunctionSymbol>;

struct Variable {
  std::string name;
  Sort sort;

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.sort == b.sort;
  }
  friend bool operator<(const Variable& a, const Variable& b) {
    return a.name != b.name ? a.name < b.name : a.sort < b.sort;
  }
};

using VarSet = std::set<Variable>;

class Term {
 public:
  enum class Kind : std::uint8_t { Var, App, Int, Bool, Atom };

  static Term var(const Variable& v);
  static Term var(std::string name, Sort sort);
  /// Throws Error(IllSorted) when an argument sort does not fit.
  static Term app(SymbolPtr symbol, std::vector<Term> args);
  /// Throws Error(NatUnderflow) for a negative Nat literal.
  static Term integer(std::int64_t value, const Sort& sort = int_sort());
  static Term boolean(bool value);
  /// A constant of an open sort.
  static Term atom(std::string name, Sort sort);

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_app() const { return kind() == Kind::App; }
  bool is_literal() const { return kind() == Kind::Int || kind() == Kind::Bool; }

  const Sort& sort() const { return node_->sort; }
  /// Variable name, atom name, or symbol name.
  const std::string& name() const;
  Variable variable() const;
  const FunctionSymbol& symbol() const { return *node_->symbol; }
  const SymbolPtr& symbol_ptr() const { return node_->symbol; }
  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args.at(i); }
  std::int64_t int_value() const { return node_->value; }
  bool bool_value() const { return node_->value != 0; }

  bool is_ground() const { return node_->ground; }
  std::size_t hash() const { return node_->hash; }

  /// Structural equality; literals compare by value.
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  /// A total order compatible with ==, for ordered containers.
  friend bool operator<(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    Sort sort;
    std::string name;
    SymbolPtr symbol;
    std::vector<Term> args;
    std::int64_t value = 0;
    std::size_t hash = 0;
    bool ground = true;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static int compare(const Term& a, const Term& b);

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

class Signature {
 public:
  /// Declares Int, Bool and Nat together with their builtin operations.
  Signature();

  void add_sort(Sort sort);
  /// Throws Error(NameCollision) when (name, arg sorts) is already declared.
  SymbolPtr add_symbol(FunctionSymbol symbol);

  bool has_sort(const std::string& name) const;
  const Sort& sort(const std::string& name) const;
  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<SymbolPtr>& symbols() const { return symbols_; }

  std::vector<SymbolPtr> overloads(const std::string& name) const;
  /// Picks the first overload whose argument sorts accept `arg_sorts`.
  SymbolPtr resolve(const std::string& name, std::span<const Sort> arg_sorts) const;
  /// The symbol carrying the given builtin tag for the given result sort, if any.
  SymbolPtr find_builtin(Builtin builtin) const;
  SymbolPtr arithmetic(Builtin op, const Sort& lhs, const Sort& rhs) const;
  /// Symbols declared by the user (not the automatic builtin operations).
  std::vector<SymbolPtr> user_symbols() const;
  std::vector<Sort> user_sorts() const;

  void set_cfg_sort(const std::string& name);
  const Sort& cfg_sort() const;
  bool has_cfg_sort() const { return cfg_sort_.has_value(); }

 private:
  std::vector<Sort> sorts_;
  std::vector<SymbolPtr> symbols_;
  std::size_t builtin_symbol_count_ = 0;
  std::optional<std::string> cfg_sort_;
};

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const Variable, Term>> init) : map_(init) {}

  /// Throws Error(IllSorted) when the image sort does not fit the variable.
  void bind(const Variable& v, const Term& t);
  const Term* find(const Variable& v) const;
  bool contains(const Variable& v) const { return map_.count(v) != 0; }
  void erase(const Variable& v) { map_.erase(v); }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  /// (this ∘ other): apply `other` first, then this.
  Substitution compose(const Substitution& other) const;
  /// Applies the substitution to its own images until no mapped variable
  /// occurs in an image.
  Substitution normalized() const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.map_ == b.map_;
  }

 private:
  std::map<Variable, Term> map_;
};

using GroundValuation = Substitution;

Sort sort_of(const Term& t, const Signature& sig);

Term apply_substitution(const Substitution& sigma, const Term& t);

/// One-way matching of `lhs` against a ground `subject`.
std::optional<Substitution> match_term(const Term& lhs, const Term& subject);

struct Unifier {
  Substitution mgu;
  // Equalities between builtin-sorted subterms left for the constraint backend.
  std::vector<std::pair<Term, Term>> residual;
};

/// Syntactic unification with occurs check. Builtin-sorted non-variable
/// subterms are not unified structurally; they become residual equalities.
/// Only variables accepted by `bindable` may be bound (all by default).
std::optional<Unifier> unify(const Term& t1, const Term& t2,
                             const std::function<bool(const Variable&)>& bindable = {});

/// Fully reduces interpreted symbols of a ground term.
Term evaluate_ground(const Term& t);

/// Partial evaluation of interpreted symbols on possibly non-ground terms.
Term simplify(const Term& t);

VarSet free_vars(const Term& t);
void collect_vars(const Term& t, VarSet& out);
bool occurs(const Variable& v, const Term& t);

std::set<std::string> names_of(const VarSet& vars);
Variable fresh_variable(const std::string& base, const Sort& sort,
                        const std::set<std::string>& avoid);
Variable fresh_variable(const std::string& base, const Sort& sort, const VarSet& avoid);

std::string to_string(const Term& t);
std::string to_string(const Variable& v);
std::string to_string(const Substitution& s);

}  // namespace rl

template <>
struct std::hash<rl::Term> {
  std::size_t operator()(const rl::Term& t) const { return t.hash(); }
};
