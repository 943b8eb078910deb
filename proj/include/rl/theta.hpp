#pragma once

// The variant extension: configurations are paired with a natural number
// that every rule decreases, turning total correctness in S into partial
// correctness in ext(S).

#include <string>

#include "rl/system.hpp"

namespace rl {

struct ExtendedSignature {
  Signature sig;
  Sort base_cfg;
  Sort cfg_prime;
  /// (cfg, n) : Cfg Nat -> Cfg'
  SymbolPtr pair;

  Term make_pair(const Term& cfg, const Term& n) const;
};

/// Adds Cfg' and the pairing constructor; Nat and its operations (including
/// abs) are the builtin ones. Throws Error(NameCollision) when the signature
/// already has a pairing constructor or a sort named Cfg'.
ExtendedSignature ext_signature(const Signature& sig);

/// Structureless patterns are unchanged; each basic pattern π becomes (π, n).
/// Bound variables are renamed when they would capture a variable of `n`.
Pattern ext_pattern(const Pattern& phi, const Term& n, const ExtendedSignature& ext);
ConstrainedPattern ext_pattern(const ConstrainedPattern& phi, const Term& n,
                               const ExtendedSignature& ext);

/// (lhs, n) /\ n >= 1 => (rhs, n - 1) with a fresh n, labeled `<label>.theta`.
ReachabilityRule ext_rule(const ReachabilityRule& rule, const ExtendedSignature& ext);

ReachabilitySystem ext_system(const ReachabilitySystem& sys);

struct TotalGoal {
  Pattern lhs = Pattern::top();
  Pattern rhs = Pattern::top();
  /// The variant s, of sort Nat.
  Term bound = Term::integer(0, nat_sort());
  /// Preferred name for the existential variant of the rhs; "M" when empty.
  std::string result_name;
};

/// ext(lhs, s) => exists M . ext(rhs, M), with M fresh.
Claim make_total_goal(const TotalGoal& goal, const ExtendedSignature& ext);

/// A total-correctness goal restated as a partial goal over ext(S). The
/// circularities must already be written over the extended signature.
Goal make_total_goal(const Goal& goal, const ExtendedSignature& ext);

}  // namespace rl
