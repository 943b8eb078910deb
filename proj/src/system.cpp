#include "rl/system.hpp"

namespace rl {

std::vector<GroundValuation> InstanceSpec::expand() const {
  std::vector<GroundValuation> out{GroundValuation{}};
  for (const auto& r : ranges) {
    std::vector<GroundValuation> next;
    for (const auto& base : out) {
      for (std::int64_t k = r.lo; k <= r.hi; ++k) {
        GroundValuation v = base;
        v.bind(r.var, Term::integer(k, r.var.sort.builtin == BuiltinSort::Nat ? nat_sort() : int_sort()));
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  for (auto& v : out) {
    for (const auto& [var, t] : bindings) v.bind(var, evaluate_ground(apply_substitution(v, t)));
  }
  return out;
}

bool same_system(const ReachabilitySystem& a, const ReachabilitySystem& b) {
  if (a.name != b.name || a.rules != b.rules) return false;
  auto sa = a.sig.user_sorts(), sb = b.sig.user_sorts();
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i].name != sb[i].name || sa[i].open != sb[i].open) return false;
  }
  if (a.sig.has_cfg_sort() != b.sig.has_cfg_sort()) return false;
  if (a.sig.has_cfg_sort() && !(a.sig.cfg_sort() == b.sig.cfg_sort())) return false;
  auto fa = a.sig.user_symbols(), fb = b.sig.user_symbols();
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (!fa[i]->same_as(*fb[i]) || !(fa[i]->result == fb[i]->result) || fa[i]->builtin != fb[i]->builtin ||
        fa[i]->builtin_arg != fb[i]->builtin_arg) {
      return false;
    }
  }
  if (a.macros.size() != b.macros.size()) return false;
  for (std::size_t i = 0; i < a.macros.size(); ++i) {
    if (a.macros[i].name != b.macros[i].name || a.macros[i].text != b.macros[i].text) return false;
  }
  return true;
}

std::string to_string(const ReachabilityRule& r) {
  return r.label + " : " + to_string(r.lhs) + " => " + to_string(r.rhs);
}

std::string to_string(const Claim& c) { return to_string(c.lhs) + " => " + to_string(c.rhs); }

}  // namespace rl
