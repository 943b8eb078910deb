#pragma once

// Integer feasibility of linear constraint systems: Fourier-Motzkin over the
// rationals, with branch-and-bound for integrality.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

namespace rl::lia {

using Z = boost::multiprecision::cpp_int;
using Q = boost::multiprecision::cpp_rational;

/// sum(coef[x] * x) + constant  (<= or =)  0
struct Row {
  enum class Op { Le, Eq };
  std::map<int, Q> coef;
  Q constant = 0;
  Op op = Op::Le;
};

struct Limits {
  std::size_t max_vars = 6;
  std::size_t max_rows = 4000;
  std::size_t max_nodes = 256;
};

struct Outcome {
  enum class Result { Sat, Unsat, Unknown };
  Result result = Result::Unknown;
  std::map<int, Z> model;
  std::string reason;
};

/// Decides whether the rows have a common integer solution.
Outcome solve_integer(const std::vector<Row>& rows, const Limits& limits);

/// Rational feasibility only; a cheap pruning test.
Outcome::Result rational_feasible(const std::vector<Row>& rows, const Limits& limits);

/// Multiplies through by the lcm of the denominators.
void scale_to_integers(Row& row);

/// Scales to integer coefficients and divides out their gcd, rounding the
/// constant of an inequality in the sound direction. Returns false when an
/// equality has no integer solution.
bool tighten(Row& row);

}  // namespace rl::lia
