#pragma once

// Derivations in the all-path reachability proof system: a checker for
// explicit proof trees and a search procedure that builds them.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rl/solver.hpp"
#include "rl/system.hpp"

namespace rl {

struct LabeledClaim {
  std::string label;
  Claim claim;

  friend bool operator==(const LabeledClaim&, const LabeledClaim&) = default;
};

/// S, A ⊢_C lhs ⇒∀ rhs. The system is supplied by the checking context.
struct Sequent {
  std::vector<LabeledClaim> axioms;
  std::vector<LabeledClaim> circularities;
  Claim claim;

  friend bool operator==(const Sequent&, const Sequent&) = default;
};

enum class ProofRule {
  Step,
  Axiom,
  Transitivity,
  CaseAnalysis,
  Circularity,
  Abstraction,
  Reflexivity,
  Consequence,
};

std::string to_string(ProofRule r);
std::optional<ProofRule> proof_rule_from_string(const std::string& s);

struct ProofTree {
  ProofRule rule = ProofRule::Reflexivity;
  Sequent conclusion;
  std::vector<ProofTree> premises;
  /// Axiom: label of the cited claim. Circularity: label of the new claim.
  std::string label;
  /// Abstraction: the variables X removed from the lhs.
  std::vector<Variable> abstracted;

  std::size_t size() const;
};

struct CheckResult {
  bool ok = true;
  /// Child indices from the root to the failing node, e.g. "/1/0".
  std::string path = "/";
  std::string reason;

  static CheckResult reject(std::string why) { return {false, "/", std::move(why)}; }
};

struct ProofContext {
  const ReachabilitySystem* sys = nullptr;
  Solver* solver = nullptr;
};

/// Validates one node against its rule, using only the conclusions of its
/// premises.
CheckResult check_node(const ProofTree& node, const ProofContext& ctx);

/// Validates the whole tree, premises before conclusions. Also rejects
/// citing a circularity made available by a Transitivity whose first premise
/// takes no Step.
CheckResult check_proof(const ProofTree& tree, const ProofContext& ctx);

/// True when every path through the derivation takes at least one Step.
bool is_progressive(const ProofTree& tree);

// ---------------------------------------------------------------------------
// Side conditions

/// Validity of the pattern implication φ → ψ, with configurations read as
/// the same □. Existentials of ψ are instantiated by unification against the
/// structure of φ.
SolverVerdict pattern_implies(const Pattern& phi, const Pattern& psi, Solver& solver);

struct SymbolicStep {
  /// One entry per rule whose left-hand side unifies and whose combined
  /// constraint is not unsatisfiable.
  std::vector<ConstrainedPattern> successors;
  std::vector<std::string> rules;
  /// The disjunction of applicable rule guards, over the variables of the
  /// input pattern.
  Pattern guards = Pattern::bottom();
  /// The guards cover the input constraint (the Step coverage premise).
  bool covered = false;
  /// A rule applies only to some instances of the structure; Step cannot
  /// be used.
  std::string blocked;
};

SymbolicStep symbolic_step(const ConstrainedPattern& cp, const ReachabilitySystem& sys,
                           Solver& solver);

// ---------------------------------------------------------------------------
// Search

struct ProverConfig {
  /// Symbolic steps along one branch.
  std::size_t max_depth = 2000;
  /// Case splits over the whole search.
  std::size_t max_branches = 256;
};

struct ProveResult {
  bool proved = false;
  ProofTree tree;
  /// Undischarged claims when not proved, innermost last.
  std::vector<std::string> frontier;
  std::string reason;
  std::size_t steps = 0;
};

/// Searches for a derivation of `goal` (normally with empty axioms and
/// circularities). `hints` are loop invariants, registered with the
/// Circularity rule when the search first reaches them. A returned proof
/// has passed check_proof.
ProveResult prove(const ReachabilitySystem& sys, const Sequent& goal,
                  const std::vector<LabeledClaim>& hints, Solver& solver,
                  const ProverConfig& config = {});

// ---------------------------------------------------------------------------
// Proof files

/// Deterministic s-expression form. Patterns are written in the theory-file
/// term syntax with the sorts of their free variables.
std::string print_proof(const ProofTree& tree, const std::string& system_name);
/// Throws Error(Parse) or Error(IllSorted).
ProofTree parse_proof(std::string_view text, const ReachabilitySystem& sys);

/// Alpha-equivalence of claims, also allowing a consistent renaming of free
/// variables.
bool same_claim_up_to_renaming(const Claim& a, const Claim& b);

}  // namespace rl
