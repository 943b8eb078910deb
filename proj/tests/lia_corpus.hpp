#pragma once

// Random linear integer formulas over at most three variables with
// coefficients in [-8, 8].

#include <random>

#include "rl/pattern.hpp"

namespace rl::testing {

class LiaCorpus {
 public:
  explicit LiaCorpus(unsigned seed) : rng_(seed) {}

  Pattern next() { return formula(2); }

  const std::vector<Variable>& vars() const { return vars_; }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Term num(std::int64_t v) { return Term::integer(v, int_sort()); }

  Term linear() {
    Term sum = num(pick(-8, 8));
    for (const auto& v : vars_) {
      int c = pick(-8, 8);
      if (c == 0) continue;
      Term mono = Term::app(sig_.arithmetic(Builtin::Mul, int_sort(), int_sort()), {num(c), Term::var(v)});
      sum = Term::app(sig_.arithmetic(Builtin::Add, int_sort(), int_sort()), {sum, mono});
    }
    return sum;
  }

  Pattern atom() {
    static const Builtin ops[] = {Builtin::Lt, Builtin::Le, Builtin::Eq, Builtin::Ne, Builtin::Ge, Builtin::Gt};
    Builtin op = ops[pick(0, 5)];
    return Pattern::predicate(Term::app(sig_.arithmetic(op, int_sort(), int_sort()), {linear(), num(0)}));
  }

  Pattern formula(int depth) {
    if (depth == 0) return atom();
    switch (pick(0, 3)) {
      case 0: return Pattern::conj(formula(depth - 1), formula(depth - 1));
      case 1: return Pattern::disj(formula(depth - 1), formula(depth - 1));
      case 2: return Pattern::neg(formula(depth - 1));
      default: return atom();
    }
  }

  std::mt19937 rng_;
  Signature sig_;
  std::vector<Variable> vars_{{"x", int_sort()}, {"y", int_sort()}, {"z", int_sort()}};
};

}  // namespace rl::testing
