#pragma once

// A two-counter configuration sort, built through the API rather than a
// theory file.

#include "rl/pattern.hpp"
#include "rl/terms.hpp"

namespace rl::testing {

struct Counter {
  Signature sig;
  Sort cfg{"Cfg"};
  SymbolPtr pair, halt;

  Counter() {
    sig.add_sort(cfg);
    sig.set_cfg_sort("Cfg");
    pair = sig.add_symbol({"cfg", {int_sort(), int_sort()}, cfg, Builtin::None, ""});
    halt = sig.add_symbol({"halt", {}, cfg, Builtin::None, ""});
  }

  Term num(std::int64_t v) const { return Term::integer(v); }
  Term nat(std::int64_t v) const { return Term::integer(v, nat_sort()); }
  Term ivar(const std::string& n) const { return Term::var(n, int_sort()); }
  Term nvar(const std::string& n) const { return Term::var(n, nat_sort()); }
  Term conf(const Term& a, const Term& b) const { return Term::app(pair, {a, b}); }
  Term op(Builtin b, const Term& x, const Term& y) const {
    auto f = b == Builtin::Add || b == Builtin::Sub || b == Builtin::Mul || b == Builtin::Div
                 ? sig.arithmetic(b, x.sort(), y.sort())
                 : nullptr;
    if (!f) {
      for (const auto& s : sig.symbols()) {
        if (s->builtin == b && s->arg_sorts.size() == 2 && sort_accepts(s->arg_sorts[0], x.sort()) &&
            sort_accepts(s->arg_sorts[1], y.sort())) {
          f = s;
          break;
        }
      }
    }
    return Term::app(f, {x, y});
  }
  Term add(const Term& x, const Term& y) const { return op(Builtin::Add, x, y); }
  Term sub(const Term& x, const Term& y) const { return op(Builtin::Sub, x, y); }
  Pattern pred(Builtin b, const Term& x, const Term& y) const { return Pattern::predicate(op(b, x, y)); }
  Pattern gt(const Term& x, const Term& y) const { return pred(Builtin::Gt, x, y); }
  Pattern ge(const Term& x, const Term& y) const { return pred(Builtin::Ge, x, y); }
  Pattern eq(const Term& x, const Term& y) const { return pred(Builtin::Eq, x, y); }
};

}  // namespace rl::testing
