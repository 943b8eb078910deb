#pragma once

#include <set>
#include <string>
#include <vector>

#include "rl/prover.hpp"

namespace rl::detail {

/// Builtin operations, for building side conditions.
const Signature& builtin_signature();
Term make_eq(const Term& a, const Term& b);
Term make_ge(const Term& a, const Term& b);

std::vector<Pattern> conjuncts(const Pattern& p);

/// Simplifies, drops duplicates and true conjuncts, and keeps only the
/// strongest of several lower bounds on the same expression.
Pattern compact(const std::vector<Pattern>& conjuncts);

/// a >= b for every Nat subtraction a - b in t, so the term is defined.
void nat_definedness(const Term& t, std::vector<Pattern>& out);

/// Alpha-equivalence; with `rename_free`, also a consistent renaming of free
/// variables.
bool alpha_equal(const Pattern& a, const Pattern& b, bool rename_free = false);

/// One rule applied to a pattern: the successor and the guard under which
/// the rule fires, both over the pattern's variables plus `existentials`.
struct StepCase {
  std::string rule;
  ConstrainedPattern successor;
  Pattern guard = Pattern::top();
};

/// Applies every rule to `cp` (whose existentials must already be opened).
/// Sets `blocked` when a rule overlaps only some instances of the structure.
std::vector<StepCase> step_cases(const ConstrainedPattern& cp, const ReachabilitySystem& sys,
                                 const std::set<std::string>& avoid, std::string& blocked);

/// Replaces existentials by fresh free variables avoiding `avoid`.
ConstrainedPattern open_existentials(const ConstrainedPattern& cp, std::set<std::string>& avoid);

}  // namespace rl::detail
