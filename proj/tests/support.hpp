#pragma once

#include "doctest.h"
#include "rl/terms.hpp"

namespace doctest {
template <>
struct StringMaker<rl::Term> {
  static String convert(const rl::Term& t) { return rl::to_string(t).c_str(); }
};
template <>
struct StringMaker<rl::Substitution> {
  static String convert(const rl::Substitution& s) { return rl::to_string(s).c_str(); }
};
}  // namespace doctest

#include "rl/pattern.hpp"

namespace doctest {
template <>
struct StringMaker<rl::Pattern> {
  static String convert(const rl::Pattern& p) { return rl::to_string(p).c_str(); }
};
}  // namespace doctest

#include "counter_sig.hpp"
