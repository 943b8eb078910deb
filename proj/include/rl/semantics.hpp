#pragma once

// Concrete execution of reachability systems and brute-force oracles for
// partial and total correctness on ground instances.

#include <cstddef>
#include <string>
#include <vector>

#include "rl/system.hpp"

namespace rl {

/// The configurations reachable from ground `gamma` in one step, in rule
/// order without duplicates. Rules whose right-hand side mentions variables
/// not bound by matching are rejected with Error(RhsVariableUnbound).
/// Applications whose right-hand side fails to evaluate give no successor.
std::vector<Term> successors(const Term& gamma, const ReachabilitySystem& sys);

enum class ExecStatus { Complete, Truncated, CycleDetected };

struct ExecutionResult {
  std::vector<Term> trace;
  ExecStatus status = ExecStatus::Complete;
  /// Truncated: the step budget. CycleDetected: index in `trace` of the
  /// first occurrence of the repeated configuration (the last entry).
  std::size_t budget = 0;
  std::size_t cycle_index = 0;
  /// Some visited configuration had more than one successor.
  bool branched = false;

  std::size_t steps() const { return trace.empty() ? 0 : trace.size() - 1; }
};

/// Follows the first successor at every step.
ExecutionResult execute(const Term& start, const ReachabilitySystem& sys, std::size_t max_steps,
                        bool detect_cycles);

enum class Verdict { Holds, CounterexampleTrace, Inconclusive };

std::string to_string(Verdict v);
std::string to_string(ExecStatus s);

struct OracleResult {
  Verdict verdict = Verdict::Holds;
  /// For a counterexample: the offending path and its instance.
  std::vector<Term> trace;
  GroundValuation instance;
  std::string detail;
  std::size_t instances_checked = 0;
  std::size_t instances_vacuous = 0;
};

struct OracleOptions {
  /// Longest path explored.
  std::size_t budget = 10000;
  /// Cap on configurations visited per instance, against branching blowup.
  std::size_t max_nodes = 1000000;
  SatContext sat;
};

/// Every complete path from each instance of `lhs` must reach `rhs`.
/// Paths found to loop forever satisfy the claim.
OracleResult oracle_partial(const ReachabilitySystem& sys, const ConstrainedPattern& lhs,
                            const Pattern& rhs, const std::vector<GroundValuation>& instances,
                            const OracleOptions& options = {});

/// As oracle_partial, but a path that revisits a configuration before
/// reaching `rhs` is a counterexample.
OracleResult oracle_total(const ReachabilitySystem& sys, const ConstrainedPattern& lhs,
                          const Pattern& rhs, const std::vector<GroundValuation>& instances,
                          const OracleOptions& options = {});

struct WellDefinedness {
  bool pass = true;
  std::string reason;
};

/// A sufficient syntactic check: the right-hand side carries no constraint
/// and introduces no variables.
WellDefinedness check_weak_well_definedness(const ReachabilityRule& rule);

}  // namespace rl
