#pragma once

// Validity and satisfiability of structureless side conditions.
//
// Queries go through a fixed pipeline: simplification, the builtin linear
// integer procedure, then an optional external solver speaking SMT-LIB 2.
// A definite builtin answer is final.

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rl/pattern.hpp"

namespace rl {

struct SolverVerdict {
  enum class Kind { Valid, Invalid, Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  /// Present for Invalid and Sat; always re-checked by evaluation.
  GroundValuation witness;
  std::string reason;

  static SolverVerdict unknown(std::string why) { return {Kind::Unknown, {}, std::move(why)}; }
  bool definite() const { return kind != Kind::Unknown; }
};

std::string to_string(SolverVerdict::Kind k);

struct SolverQuery {
  enum class Goal { CheckSat, CheckValid };
  std::vector<Pattern> assertions;
  Goal goal = Goal::CheckSat;
  /// Checked for validity under the assertions when goal == CheckValid.
  Pattern formula = Pattern::top();
  /// Free variables, sorted; filled by make_query when left empty.
  std::vector<Variable> declared_vars;
};

SolverQuery make_sat_query(const Pattern& f);
SolverQuery make_valid_query(const Pattern& f);

/// The SMT-LIB 2 script for a query. Validity is checked by asserting the
/// negation.
std::string emit_standard_query(const SolverQuery& q);
/// Interprets a solver reply for `q`. Throws Error(MalformedReply).
SolverVerdict parse_standard_reply(std::string_view reply, const SolverQuery& q);

/// Counters for reporting.
struct SolverStats {
  std::size_t queries = 0;
  std::size_t cache_hits = 0;
  std::size_t builtin_definite = 0;
  std::size_t external_calls = 0;
  std::size_t unknown = 0;
};

struct SolverOptions {
  /// Executable and arguments of the external solver, e.g. "z3 -in".
  /// Empty disables delegation.
  std::string external;
  std::chrono::milliseconds timeout{5000};
  /// Search limits of the builtin procedure.
  std::size_t max_vars = 6;
  std::size_t max_atoms = 64;
};

/// Picks the external solver: the explicit setting wins, then the RL_SOLVER
/// environment variable, then z3 on PATH. Returns "" when none is found.
std::string detect_external_solver(const std::optional<std::string>& flag, bool disabled);

/// A solver session. Not shareable between threads; keep one per worker.
class Solver {
 public:
  explicit Solver(SolverOptions options = {});

  SolverVerdict check_valid(const Pattern& f);
  SolverVerdict check_sat(const Pattern& f);
  /// Validity of hyp -> concl.
  SolverVerdict implies(const Pattern& hyp, const Pattern& concl);

  /// The builtin procedure alone; Unknown outside its fragment.
  SolverVerdict builtin_sat(const Pattern& f) const;
  SolverVerdict builtin_valid(const Pattern& f) const;
  /// The external solver alone; Unknown when none is configured.
  SolverVerdict external(const SolverQuery& q) const;

  const SolverOptions& options() const { return options_; }
  const SolverStats& stats() const { return stats_; }

 private:
  SolverVerdict run(const Pattern& f, bool valid);

  SolverOptions options_;
  SolverStats stats_;
  std::map<std::string, SolverVerdict> cache_;
};

/// True when `witness` makes `f` evaluate to `expected`. Errors and
/// non-ground leftovers count as failure.
bool witness_checks(const Pattern& f, const GroundValuation& witness, bool expected);

}  // namespace rl
