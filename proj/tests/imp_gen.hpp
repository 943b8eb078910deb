#pragma once

// Random IMP programs over the variables x, y, z, for property tests.

#include <random>
#include <string>

#include "rl/lang.hpp"
#include "rl/semantics.hpp"

namespace rl::testing {

class ImpGen {
 public:
  ImpGen(const Signature& sig, unsigned seed) : sig_(sig), rng_(seed) {}

  Term stmt(int depth) {
    int pick = depth <= 0 ? below(2) : below(6);
    switch (pick) {
      case 0: return app("skip", {});
      case 1: return app("assign", {var(), aexp(depth - 1)});
      case 2:
      case 3: return app("seq", {stmt(depth - 1), stmt(depth - 1)});
      case 4: return app("ite", {bexp(depth - 1), stmt(depth - 1), stmt(depth - 1)});
      default: return app("while", {bexp(depth - 1), stmt(depth - 1)});
    }
  }

  Term aexp(int depth) {
    int pick = depth <= 0 ? below(2) : below(3);
    if (pick == 0) return app("int", {Term::integer(below(9) - 3)});
    if (pick == 1) return app("id", {var()});
    return app("plus", {aexp(depth - 1), aexp(depth - 1)});
  }

  Term bexp(int depth) {
    int pick = depth <= 0 ? 0 : below(4);
    if (pick == 0) return app("bool", {Term::boolean(below(2) == 0)});
    if (pick == 1) return app("eq", {aexp(depth - 1), aexp(depth - 1)});
    if (pick == 2) return app("lt", {aexp(depth - 1), aexp(depth - 1)});
    return app("not", {bexp(depth - 1)});
  }

  /// All of x, y, z bound to small values.
  Term env() {
    return imp_env({{"x", below(7) - 2}, {"y", below(7) - 2}, {"z", below(7) - 2}}, sig_);
  }

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  Term var() {
    static const char* names[] = {"x", "y", "z"};
    return Term::atom(names[below(3)], sig_.sort("Id"));
  }

  Term app(const std::string& name, std::vector<Term> args) {
    std::vector<Sort> sorts;
    for (const auto& a : args) sorts.push_back(a.sort());
    return Term::app(sig_.resolve(name, sorts), std::move(args));
  }

  const Signature& sig_;
  std::mt19937 rng_;
};

/// `count` configurations sampled along runs of random programs.
inline std::vector<Term> reachable_imp_configs(const ReachabilitySystem& imp, std::size_t count, unsigned seed) {
  ImpGen gen(imp.sig, seed);
  std::vector<Term> out;
  while (out.size() < count) {
    Term start = initial_config(gen.stmt(4), gen.env(), imp.sig);
    ExecutionResult r = execute(start, imp, 60, false);
    for (std::size_t i = 0; i < r.trace.size() && out.size() < count; i += 1 + gen.below(6)) {
      out.push_back(r.trace[i]);
    }
  }
  return out;
}

}  // namespace rl::testing
