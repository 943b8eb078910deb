#include "lia.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace rl::lia {

namespace {

Z floor_q(const Q& q) {
  Z n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  Z r = n / d;
  if (n % d != 0 && n < 0) r -= 1;
  return r;
}

Z ceil_q(const Q& q) { return -floor_q(-q); }

bool is_integer(const Q& q) { return boost::multiprecision::denominator(q) == 1; }

void drop_zeros(Row& r) {
  for (auto it = r.coef.begin(); it != r.coef.end();) {
    if (it->second == 0) {
      it = r.coef.erase(it);
    } else {
      ++it;
    }
  }
}

// Adds k * other to row.
void add_scaled(Row& row, const Row& other, const Q& k) {
  for (const auto& [v, c] : other.coef) row.coef[v] += k * c;
  row.constant += k * other.constant;
  drop_zeros(row);
}

struct Elimination {
  int var;
  std::vector<Row> bounds;
};

struct Definition {
  int var;
  Row expr;  // var = expr.coef . x + expr.constant
};

Q eval_rest(const Row& r, int skip, const std::map<int, Q>& values) {
  Q s = r.constant;
  for (const auto& [v, c] : r.coef) {
    if (v == skip) continue;
    auto it = values.find(v);
    if (it != values.end()) s += c * it->second;
  }
  return s;
}

struct RationalResult {
  Outcome::Result result = Outcome::Result::Unknown;
  std::map<int, Q> model;
  std::string reason;
};

RationalResult rational_model(std::vector<Row> rows, const Limits& limits) {
  RationalResult out;
  std::set<int> all_vars;
  for (auto& r : rows) {
    drop_zeros(r);
    for (const auto& [v, c] : r.coef) all_vars.insert(v);
  }

  // Equalities are solved for one variable and substituted away.
  std::vector<Definition> defs;
  while (true) {
    auto it = std::find_if(rows.begin(), rows.end(), [](const Row& r) { return r.op == Row::Op::Eq; });
    if (it == rows.end()) break;
    Row eq = *it;
    rows.erase(it);
    if (eq.coef.empty()) {
      if (eq.constant != 0) {
        out.result = Outcome::Result::Unsat;
        return out;
      }
      continue;
    }
    int x = eq.coef.begin()->first;
    for (const auto& [v, c] : eq.coef) {
      if (abs(c) == 1) {
        x = v;
        break;
      }
    }
    Q a = eq.coef.at(x);
    Row expr;
    for (const auto& [v, c] : eq.coef) {
      if (v != x) expr.coef[v] = -c / a;
    }
    expr.constant = -eq.constant / a;
    for (auto& r : rows) {
      auto f = r.coef.find(x);
      if (f == r.coef.end()) continue;
      Q k = f->second;
      r.coef.erase(f);
      add_scaled(r, expr, k);
      if (!tighten(r)) {
        out.result = Outcome::Result::Unsat;
        return out;
      }
    }
    for (auto& d : defs) {
      auto f = d.expr.coef.find(x);
      if (f == d.expr.coef.end()) continue;
      Q k = f->second;
      d.expr.coef.erase(f);
      add_scaled(d.expr, expr, k);
    }
    defs.push_back({x, expr});
  }

  std::set<int> vars;
  std::vector<Row> ineqs;
  for (auto& r : rows) {
    if (r.coef.empty()) {
      if (r.constant > 0) {
        out.result = Outcome::Result::Unsat;
        return out;
      }
      continue;
    }
    for (const auto& [v, c] : r.coef) vars.insert(v);
    ineqs.push_back(std::move(r));
  }
  if (vars.size() > limits.max_vars) {
    out.reason = "more than " + std::to_string(limits.max_vars) + " variables";
    return out;
  }

  std::vector<Elimination> elims;
  while (!vars.empty()) {
    int best = *vars.begin();
    std::size_t best_cost = SIZE_MAX;
    for (int v : vars) {
      std::size_t pos = 0, neg = 0;
      for (const auto& r : ineqs) {
        auto f = r.coef.find(v);
        if (f == r.coef.end()) continue;
        (f->second > 0 ? pos : neg)++;
      }
      if (pos * neg < best_cost) {
        best_cost = pos * neg;
        best = v;
      }
    }
    vars.erase(best);
    std::vector<Row> pos, neg, rest;
    for (auto& r : ineqs) {
      auto f = r.coef.find(best);
      if (f == r.coef.end()) {
        rest.push_back(std::move(r));
      } else {
        (f->second > 0 ? pos : neg).push_back(std::move(r));
      }
    }
    Elimination e{best, {}};
    e.bounds.insert(e.bounds.end(), pos.begin(), pos.end());
    e.bounds.insert(e.bounds.end(), neg.begin(), neg.end());
    elims.push_back(std::move(e));

    std::set<std::pair<std::map<int, Q>, Q>> seen;
    for (const auto& r : rest) seen.insert({r.coef, r.constant});
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        Row combined = p;
        Q a = p.coef.at(best), b = n.coef.at(best);
        for (auto& [v, c] : combined.coef) c *= -b;
        combined.constant *= -b;
        add_scaled(combined, n, a);
        combined.coef.erase(best);
        if (combined.coef.empty()) {
          if (combined.constant > 0) {
            out.result = Outcome::Result::Unsat;
            return out;
          }
          continue;
        }
        tighten(combined);
        if (seen.insert({combined.coef, combined.constant}).second) rest.push_back(std::move(combined));
      }
    }
    if (rest.size() > limits.max_rows) {
      out.reason = "elimination produced too many constraints";
      return out;
    }
    ineqs = std::move(rest);
  }

  // Back-substitution, preferring integers close to zero.
  std::map<int, Q> values;
  for (auto e = elims.rbegin(); e != elims.rend(); ++e) {
    std::optional<Q> lo, hi;
    for (const auto& r : e->bounds) {
      Q a = r.coef.at(e->var);
      Q bound = -eval_rest(r, e->var, values) / a;
      if (a > 0) {
        if (!hi || bound < *hi) hi = bound;
      } else {
        if (!lo || bound > *lo) lo = bound;
      }
    }
    Q value = 0;
    if (lo && hi && *lo > *hi) {
      // Cannot happen after a successful projection; stay conservative.
      out.reason = "inconsistent back-substitution";
      return out;
    }
    std::optional<Z> ilo, ihi;
    if (lo) ilo = ceil_q(*lo);
    if (hi) ihi = floor_q(*hi);
    if (!ilo || !ihi || *ilo <= *ihi) {
      Z pick = 0;
      if (ilo && pick < *ilo) pick = *ilo;
      if (ihi && pick > *ihi) pick = *ihi;
      value = Q(pick);
    } else {
      value = *lo;
    }
    values[e->var] = value;
  }
  for (auto d = defs.rbegin(); d != defs.rend(); ++d) values[d->var] = eval_rest(d->expr, -1, values);
  for (int v : all_vars) values.try_emplace(v, Q(0));
  out.result = Outcome::Result::Sat;
  out.model = std::move(values);
  return out;
}

Outcome branch(std::vector<Row>& rows, const Limits& limits, std::size_t& nodes) {
  Outcome out;
  if (++nodes > limits.max_nodes) {
    out.reason = "branch-and-bound limit reached";
    return out;
  }
  RationalResult r = rational_model(rows, limits);
  if (r.result != Outcome::Result::Sat) {
    out.result = r.result;
    out.reason = r.reason;
    return out;
  }
  for (const auto& [v, q] : r.model) {
    if (is_integer(q)) continue;
    Row down;
    down.coef[v] = 1;
    down.constant = -Q(floor_q(q));
    Row up;
    up.coef[v] = -1;
    up.constant = Q(ceil_q(q));
    bool unknown = false;
    std::string why;
    for (Row* extra : {&down, &up}) {
      rows.push_back(*extra);
      Outcome sub = branch(rows, limits, nodes);
      rows.pop_back();
      if (sub.result == Outcome::Result::Sat) return sub;
      if (sub.result == Outcome::Result::Unknown) {
        unknown = true;
        why = sub.reason;
      }
    }
    out.result = unknown ? Outcome::Result::Unknown : Outcome::Result::Unsat;
    out.reason = why;
    return out;
  }
  out.result = Outcome::Result::Sat;
  for (const auto& [v, q] : r.model) out.model[v] = boost::multiprecision::numerator(q);
  return out;
}

}  // namespace

void scale_to_integers(Row& row) {
  drop_zeros(row);
  Z lcm = boost::multiprecision::denominator(row.constant);
  for (const auto& [v, c] : row.coef) {
    Z d = boost::multiprecision::denominator(c);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  if (lcm != 1) {
    for (auto& [v, c] : row.coef) c *= lcm;
    row.constant *= lcm;
  }
}

bool tighten(Row& row) {
  scale_to_integers(row);
  if (row.coef.empty()) return row.op == Row::Op::Le || row.constant == 0;
  Z g = 0;
  for (const auto& [v, c] : row.coef) g = boost::multiprecision::gcd(g, Z(abs(boost::multiprecision::numerator(c))));
  if (g <= 1) return true;
  Z k = boost::multiprecision::numerator(row.constant);
  if (row.op == Row::Op::Eq) {
    if (k % g != 0) return false;
    for (auto& [v, c] : row.coef) c /= Q(g);
    row.constant /= Q(g);
    return true;
  }
  for (auto& [v, c] : row.coef) c /= Q(g);
  row.constant = Q(ceil_q(Q(k, g)));
  return true;
}

Outcome::Result rational_feasible(const std::vector<Row>& rows, const Limits& limits) {
  return rational_model(rows, limits).result;
}

Outcome solve_integer(const std::vector<Row>& input, const Limits& limits) {
  std::vector<Row> rows;
  rows.reserve(input.size());
  for (Row r : input) {
    if (!tighten(r)) return {Outcome::Result::Unsat, {}, {}};
    if (r.coef.empty()) {
      bool ok = r.op == Row::Op::Le ? r.constant <= 0 : r.constant == 0;
      if (!ok) return {Outcome::Result::Unsat, {}, {}};
      continue;
    }
    rows.push_back(std::move(r));
  }
  std::size_t nodes = 0;
  return branch(rows, limits, nodes);
}

}  // namespace rl::lia
