#pragma once

// Text formats: expressions, theory files, goal files and s-expressions.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rl/system.hpp"

namespace rl {

/// Untyped expression tree produced by the parser; elaboration against a
/// signature turns it into terms and patterns.
struct Expr {
  enum class Kind { Ident, Int, Call, Unary, Binary, Tuple, Binder };
  Kind kind = Kind::Ident;
  std::string text;  // identifier, operator, or binder keyword
  std::int64_t value = 0;
  std::vector<Expr> args;
  // Binder: bound names with their sort names.
  std::vector<std::pair<std::string, std::string>> bound;
  int line = 0, col = 0;
};

Expr parse_expr(std::string_view text);

struct Scope {
  std::map<std::string, Variable> vars;
  const std::vector<Macro>* macros = nullptr;

  void declare(const Variable& v) { vars.insert_or_assign(v.name, v); }
};

Term elaborate_term(const Expr& e, const Signature& sig, const Scope& scope,
                    const Sort* expected = nullptr);
Pattern elaborate_pattern(const Expr& e, const Signature& sig, const Scope& scope);

Term parse_term(std::string_view text, const Signature& sig, const Scope& scope = {},
                const Sort* expected = nullptr);
Pattern parse_pattern(std::string_view text, const Signature& sig, const Scope& scope = {});

/// Throws Error(Parse) on syntax errors and Error(IllSorted) on sort errors.
ReachabilitySystem parse_theory(std::string_view text);
std::string print_theory(const ReachabilitySystem& sys);

/// A goal before elaboration. Total goals have their circularities written
/// over the extended signature, so elaboration is deferred until the caller
/// knows which signature applies.
struct RawGoal {
  std::string name;
  std::vector<std::pair<std::string, std::string>> vars;  // name, sort
  Expr lhs, rhs;
  std::optional<Expr> bound;
  std::string result_name;
  struct RawCircularity {
    std::string label;
    Expr lhs, rhs;
  };
  std::vector<RawCircularity> circularities;
  struct RawRange {
    std::string var;
    std::int64_t lo, hi;
  };
  std::vector<RawRange> ranges;
  std::vector<std::pair<std::string, Expr>> bindings;
};

struct GoalFile {
  struct RawMacro {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    std::string result;
    Expr body;
    std::string text;
  };
  std::vector<RawMacro> macros;
  std::vector<RawGoal> goals;

  const RawGoal* find(const std::string& name) const;
};

GoalFile parse_goal_file(std::string_view text);

/// Elaborates a goal. The claim and bound use `claim_sig`; circularities use
/// `circ_sig`. Macros from the theory and from the goal file are in scope.
Goal elaborate_goal(const GoalFile& file, const RawGoal& raw, const Signature& claim_sig,
                    const Signature& circ_sig, const std::vector<Macro>& theory_macros);

std::string print_goal(const Goal& g);

/// Macros defined by a goal file, elaborated against `sig`.
std::vector<Macro> elaborate_macros(const GoalFile& file, const Signature& sig,
                                    const std::vector<Macro>& inherited);

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  enum class Kind { Atom, String, List };
  Kind kind = Kind::List;
  std::string text;
  std::vector<SExpr> items;
  int line = 0;

  static SExpr atom(std::string s) { return {Kind::Atom, std::move(s), {}, 0}; }
  static SExpr string(std::string s) { return {Kind::String, std::move(s), {}, 0}; }
  static SExpr list(std::vector<SExpr> xs) { return {Kind::List, {}, std::move(xs), 0}; }

  bool is_list(std::string_view head) const;
};

/// Parses a sequence of top-level s-expressions.
std::vector<SExpr> parse_sexprs(std::string_view text);
/// Pretty-prints with two-space indentation; short lists stay on one line.
std::string print_sexpr(const SExpr& e, int indent = 0);

}  // namespace rl
