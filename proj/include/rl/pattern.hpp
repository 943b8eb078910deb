#pragma once

// Matching-logic patterns over a configuration sort.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rl/terms.hpp"

namespace rl {

class Pattern {
 public:
  enum class Kind : std::uint8_t { Basic, Predicate, And, Or, Not, Exists, Forall };

  /// A configuration term, matched against the current configuration.
  static Pattern basic(Term term);
  /// A Bool-sorted term.
  static Pattern predicate(Term term);
  static Pattern top() { return predicate(Term::boolean(true)); }
  static Pattern bottom() { return predicate(Term::boolean(false)); }
  static Pattern conj(Pattern a, Pattern b);
  static Pattern disj(Pattern a, Pattern b);
  static Pattern neg(Pattern p);
  static Pattern exists(Variable v, Pattern body);
  static Pattern forall(Variable v, Pattern body);

  /// Folds with conj/disj; an empty list gives top/bottom respectively.
  static Pattern conj_all(const std::vector<Pattern>& ps);
  static Pattern disj_all(const std::vector<Pattern>& ps);
  /// Wraps `body` in existentials, innermost last.
  static Pattern exists_all(const std::vector<Variable>& vs, Pattern body);

  Kind kind() const { return node_->kind; }
  const Term& term() const { return node_->term; }
  const Pattern& left() const { return node_->children.at(0); }
  const Pattern& right() const { return node_->children.at(1); }
  const Pattern& body() const { return node_->children.at(0); }
  const Variable& var() const { return node_->var; }

  bool is_true() const;
  bool is_false() const;

  friend bool operator==(const Pattern& a, const Pattern& b);
  friend bool operator!=(const Pattern& a, const Pattern& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    Term term = Term::boolean(true);
    std::vector<Pattern> children;
    Variable var;
  };
  explicit Pattern(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// `∃ existentials. structure ∧ constraint`, the shape the prover works on.
struct ConstrainedPattern {
  Term structure = Term::boolean(true);
  Pattern constraint = Pattern::top();
  std::vector<Variable> existentials;

  Pattern to_pattern() const;
  friend bool operator==(const ConstrainedPattern&, const ConstrainedPattern&) = default;
};

bool is_structureless(const Pattern& p);

VarSet free_vars(const Pattern& p);
VarSet free_vars(const ConstrainedPattern& cp);
/// Every variable name occurring anywhere, bound or free.
std::set<std::string> all_var_names(const Pattern& p);

/// Capture-avoiding substitution; bound variables are renamed when an image
/// would otherwise be captured.
Pattern apply_substitution(const Substitution& sigma, const Pattern& p);
ConstrainedPattern apply_substitution(const Substitution& sigma, const ConstrainedPattern& cp);

/// Simplifies predicate terms and folds boolean constants.
Pattern simplify(const Pattern& p);

/// Splits a pattern into a disjunction of constrained patterns.
/// Throws Error(UnsupportedFragment) outside the supported shape.
std::vector<ConstrainedPattern> normalize(const Pattern& p);

std::string to_string(const Pattern& p);
std::string to_string(const ConstrainedPattern& cp);

// ---------------------------------------------------------------------------
// Satisfaction

struct SatContext {
  /// Needed to enumerate finite user sorts; may be null.
  const Signature* sig = nullptr;
  /// Witness search range for numeric quantifiers whose body has structure.
  std::int64_t bound = 64;
  /// Decides a closed structureless pattern; nullopt abstains. Used for
  /// quantifiers over Int/Nat.
  std::function<std::optional<bool>(const Pattern&)> decide;
};

/// (γ, ρ) ⊨ φ. Throws Error(NonEnumerableQuantifier) when a quantifier cannot
/// be decided.
bool satisfies(const Term& gamma, const GroundValuation& rho, const Pattern& phi,
               const SatContext& ctx = {});

/// The finite carrier of a sort, when there is one.
std::optional<std::vector<Term>> enumerate_sort(const Sort& sort, const Signature* sig);

// ---------------------------------------------------------------------------
// First-order view

class FolFormula {
 public:
  enum class Kind : std::uint8_t { Atom, Equals, And, Or, Not, Exists, Forall };

  static FolFormula atom(Term t);
  static FolFormula equals(Term a, Term b);
  static FolFormula conj(FolFormula a, FolFormula b);
  static FolFormula disj(FolFormula a, FolFormula b);
  static FolFormula neg(FolFormula f);
  static FolFormula exists(Variable v, FolFormula body);
  static FolFormula forall(Variable v, FolFormula body);

  Kind kind() const { return node_->kind; }
  const Term& lhs() const { return node_->lhs; }
  const Term& rhs() const { return node_->rhs; }
  const FolFormula& child(std::size_t i) const { return node_->children.at(i); }
  const Variable& var() const { return node_->var; }

 private:
  struct Node {
    Kind kind;
    Term lhs = Term::boolean(true);
    Term rhs = Term::boolean(true);
    std::vector<FolFormula> children;
    Variable var;
  };
  explicit FolFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// The distinguished variable standing for the configuration.
Variable box_variable(const Sort& cfg);

/// Replaces each basic pattern π by the equality □ = π. `cfg` is the sort of □.
FolFormula to_fol(const Pattern& p, const Sort& cfg);

/// Plain first-order evaluation; quantifiers range over `domain(sort)`.
bool fol_holds(const GroundValuation& rho, const FolFormula& f,
               const std::function<std::vector<Term>(const Sort&)>& domain);

std::string to_string(const FolFormula& f);

}  // namespace rl
