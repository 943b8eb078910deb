#pragma once

// The bundled languages: the counter language, IMP with a concrete syntax,
// and their goals. The bundle files are compiled into the library.

#include <string>
#include <string_view>
#include <vector>

#include "rl/syntax.hpp"
#include "rl/system.hpp"

namespace rl {

/// Contents of a bundled file such as "imp.theory". Throws Error(Input) for
/// an unknown name.
std::string_view bundled_file(std::string_view name);
std::vector<std::string> bundled_file_names();

ReachabilitySystem counter_system();
GoalFile counter_goals();

ReachabilitySystem imp_system();
GoalFile imp_goals();

/// Parses IMP concrete syntax to a term of sort Stmt over `sig`, which must
/// declare the IMP symbols. Statements on separate lines or separated by ';'
/// are sequenced, associating to the right; a while body extends to the end
/// of its line. Throws Error(Parse) with line and column.
Term parse_imp(std::string_view source, const Signature& sig);

/// Single-line concrete syntax that parses back to `stmt`. Throws
/// Error(Input) for terms outside the concrete syntax (e.g. non-literal
/// integers or evaluation helpers).
std::string print_imp(const Term& stmt);

/// <stmt(p) |> nil>{env}.
Term initial_config(const Term& program, const Term& env, const Signature& sig);

/// update(x1, v1, ... update(xn, vn, env0)) for the given bindings.
Term imp_env(const std::vector<std::pair<std::string, std::int64_t>>& bindings, const Signature& sig);

/// The visible bindings of a ground environment, innermost update first.
std::vector<std::pair<std::string, std::int64_t>> imp_env_bindings(const Term& env);

/// A goal as stated over the base system, and the partial goal to prove.
struct PreparedGoal {
  /// Claim over the base system; circularities of a total goal are over
  /// ext(base).
  Goal stated;
  /// The system `goal` is proved in: the base system, or ext(base) for a
  /// goal with a bound.
  ReachabilitySystem system;
  Goal goal;
  bool total = false;
};

/// Elaborates goal `name` of `file` against `base`. A goal with a bound is
/// restated as a partial goal over ext(base). `bound` replaces the bound of
/// the goal when non-empty. Throws Error(Input) for an unknown goal.
PreparedGoal prepare_goal(const ReachabilitySystem& base, const GoalFile& file, const std::string& name,
                          const std::string& bound = {});

}  // namespace rl
