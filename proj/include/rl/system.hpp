#pragma once

// Reachability rules, systems and correctness claims.

#include <optional>
#include <string>
#include <vector>

#include "rl/pattern.hpp"

namespace rl {

/// One-path rule lhs ⇒∃ rhs.
struct ReachabilityRule {
  std::string label;
  ConstrainedPattern lhs;
  ConstrainedPattern rhs;

  friend bool operator==(const ReachabilityRule&, const ReachabilityRule&) = default;
};

/// A named term abbreviation, expanded when a file is read.
struct Macro {
  std::string name;
  std::vector<Variable> params;
  Sort result;
  Term body = Term::boolean(true);
  /// Source form of the body, kept so files can be written back.
  std::string text;
};

struct ReachabilitySystem {
  std::string name;
  Signature sig;
  std::vector<ReachabilityRule> rules;
  std::vector<Macro> macros;
};

/// All-path claim lhs ⇒∀ rhs.
struct Claim {
  Pattern lhs = Pattern::top();
  Pattern rhs = Pattern::top();

  friend bool operator==(const Claim&, const Claim&) = default;
};

struct Circularity {
  std::string label;
  Claim claim;

  friend bool operator==(const Circularity&, const Circularity&) = default;
};

struct InstanceRange {
  Variable var;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  friend bool operator==(const InstanceRange&, const InstanceRange&) = default;
};

/// Ground instances for the oracles: the cartesian product of the ranges,
/// followed by derived bindings evaluated in order.
struct InstanceSpec {
  std::vector<InstanceRange> ranges;
  std::vector<std::pair<Variable, Term>> bindings;

  std::vector<GroundValuation> expand() const;
  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

struct Goal {
  std::string name;
  std::vector<Variable> vars;
  Claim claim;
  /// Present for total-correctness goals: the variant s.
  std::optional<Term> bound;
  /// Name for the existential variant of the rhs ("bound s as m").
  std::string result_name;
  std::vector<Circularity> circularities;
  InstanceSpec instances;

  friend bool operator==(const Goal&, const Goal&) = default;
};

/// Structural equality of the user-visible parts: sorts, symbols, the
/// configuration sort, rules and macro sources.
bool same_system(const ReachabilitySystem& a, const ReachabilitySystem& b);

std::string to_string(const ReachabilityRule& r);
std::string to_string(const Claim& c);

}  // namespace rl
