#include <map>

#include "prover_internal.hpp"
#include "rl/syntax.hpp"

namespace rl {

namespace {

SExpr vars_of(const Pattern& a, const Pattern& b) {
  VarSet vs = free_vars(a);
  for (const auto& v : free_vars(b)) vs.insert(v);
  SExpr out = SExpr::list({SExpr::atom("vars")});
  for (const auto& v : vs) out.items.push_back(SExpr::list({SExpr::atom(v.name), SExpr::atom(v.sort.name)}));
  return out;
}

SExpr labels(const char* head, const std::vector<LabeledClaim>& cs) {
  SExpr out = SExpr::list({SExpr::atom(head)});
  for (const auto& c : cs) out.items.push_back(SExpr::atom(c.label));
  return out;
}

void collect_claims(const ProofTree& t, std::vector<LabeledClaim>& out) {
  auto add = [&](const LabeledClaim& c) {
    for (const auto& seen : out) {
      if (seen.label != c.label) continue;
      if (!(seen.claim == c.claim)) throw Error(Error::Kind::Input, "two different claims are labeled " + c.label);
      return;
    }
    out.push_back(c);
  };
  for (const auto& c : t.conclusion.axioms) add(c);
  for (const auto& c : t.conclusion.circularities) add(c);
  for (const auto& p : t.premises) collect_claims(p, out);
}

SExpr print_node(const ProofTree& t) {
  const Claim& c = t.conclusion.claim;
  SExpr out = SExpr::list({SExpr::atom("node"), SExpr::atom(to_string(t.rule)), vars_of(c.lhs, c.rhs),
                           SExpr::list({SExpr::atom("lhs"), SExpr::string(to_string(c.lhs))}),
                           SExpr::list({SExpr::atom("rhs"), SExpr::string(to_string(c.rhs))}),
                           labels("axioms", t.conclusion.axioms),
                           labels("circularities", t.conclusion.circularities)});
  if (!t.label.empty()) out.items.push_back(SExpr::list({SExpr::atom("label"), SExpr::atom(t.label)}));
  if (!t.abstracted.empty()) {
    SExpr xs = SExpr::list({SExpr::atom("abstracted")});
    for (const auto& v : t.abstracted) xs.items.push_back(SExpr::list({SExpr::atom(v.name), SExpr::atom(v.sort.name)}));
    out.items.push_back(xs);
  }
  for (const auto& p : t.premises) out.items.push_back(print_node(p));
  return out;
}

[[noreturn]] void bad(const SExpr& e, const std::string& what) {
  throw Error(Error::Kind::Parse, "proof line " + std::to_string(e.line) + ": " + what);
}

const std::string& atom(const SExpr& e, const char* what) {
  if (e.kind != SExpr::Kind::Atom) bad(e, std::string("expected ") + what);
  return e.text;
}

class Reader {
 public:
  explicit Reader(const ReachabilitySystem& sys) : sys_(sys), macros_(sys.macros) {}

  ProofTree read(std::string_view text) {
    auto top = parse_sexprs(text);
    if (top.size() != 1 || !top[0].is_list("proof") || top[0].items.size() < 2) {
      throw Error(Error::Kind::Parse, "expected a single (proof <system> ...) form");
    }
    const SExpr& root = top[0];
    const std::string& system = atom(root.items[1], "a system name");
    if (system != sys_.name) {
      throw Error(Error::Kind::Input, "proof is for system " + system + ", not " + sys_.name);
    }
    std::optional<ProofTree> tree;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& e = root.items[i];
      if (e.is_list("define")) {
        if (e.items.size() != 2 || e.items[1].kind != SExpr::Kind::String) bad(e, "(define \"...\")");
        GoalFile f = parse_goal_file("define " + e.items[1].text + "\n");
        macros_ = elaborate_macros(f, sys_.sig, macros_);
      } else if (e.is_list("claim")) {
        if (e.items.size() != 5) bad(e, "(claim label (vars ...) (lhs ...) (rhs ...))");
        const std::string& label = atom(e.items[1], "a claim label");
        if (claims_.count(label)) bad(e, "claim " + label + " declared twice");
        Scope scope = scope_of(e.items[2]);
        claims_[label] = Claim{pattern(e.items[3], "lhs", scope), pattern(e.items[4], "rhs", scope)};
      } else if (e.is_list("node")) {
        if (tree) bad(e, "more than one root node");
        tree = node(e);
      } else {
        bad(e, "unexpected form");
      }
    }
    if (!tree) throw Error(Error::Kind::Parse, "proof has no root node");
    return *tree;
  }

 private:
  std::vector<Variable> var_list(const SExpr& e, const char* head) {
    if (!e.is_list(head)) bad(e, std::string("expected (") + head + " ...)");
    std::vector<Variable> out;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const SExpr& d = e.items[i];
      if (d.kind != SExpr::Kind::List || d.items.size() != 2) bad(d, "expected (name Sort)");
      const std::string& sort = atom(d.items[1], "a sort");
      if (!sys_.sig.has_sort(sort)) bad(d, "unknown sort " + sort);
      out.push_back(Variable{atom(d.items[0], "a variable"), sys_.sig.sort(sort)});
    }
    return out;
  }

  Scope scope_of(const SExpr& e) {
    Scope s;
    s.macros = &macros_;
    for (const auto& v : var_list(e, "vars")) s.declare(v);
    return s;
  }

  Pattern pattern(const SExpr& e, const char* head, const Scope& scope) {
    if (!e.is_list(head) || e.items.size() != 2 || e.items[1].kind != SExpr::Kind::String) {
      bad(e, std::string("expected (") + head + " \"...\")");
    }
    try {
      return parse_pattern(e.items[1].text, sys_.sig, scope);
    } catch (const Error& err) {
      throw Error(err.kind(), "proof line " + std::to_string(e.line) + ": " + err.what());
    }
  }

  std::vector<LabeledClaim> context(const SExpr& e, const char* head) {
    if (!e.is_list(head)) bad(e, std::string("expected (") + head + " ...)");
    std::vector<LabeledClaim> out;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const std::string& l = atom(e.items[i], "a claim label");
      auto it = claims_.find(l);
      if (it == claims_.end()) bad(e, "undeclared claim " + l);
      out.push_back({l, it->second});
    }
    return out;
  }

  ProofTree node(const SExpr& e) {
    if (e.items.size() < 7) bad(e, "(node Rule (vars ...) (lhs ...) (rhs ...) (axioms ...) (circularities ...) ...)");
    ProofTree t;
    auto rule = proof_rule_from_string(atom(e.items[1], "a rule name"));
    if (!rule) bad(e, "unknown rule " + e.items[1].text);
    t.rule = *rule;
    Scope scope = scope_of(e.items[2]);
    t.conclusion.claim = Claim{pattern(e.items[3], "lhs", scope), pattern(e.items[4], "rhs", scope)};
    t.conclusion.axioms = context(e.items[5], "axioms");
    t.conclusion.circularities = context(e.items[6], "circularities");
    for (std::size_t i = 7; i < e.items.size(); ++i) {
      const SExpr& x = e.items[i];
      if (x.is_list("label")) {
        if (x.items.size() != 2) bad(x, "(label name)");
        t.label = atom(x.items[1], "a label");
      } else if (x.is_list("abstracted")) {
        t.abstracted = var_list(x, "abstracted");
      } else if (x.is_list("node")) {
        t.premises.push_back(node(x));
      } else {
        bad(x, "unexpected form in node");
      }
    }
    return t;
  }

  const ReachabilitySystem& sys_;
  std::vector<Macro> macros_;
  std::map<std::string, Claim> claims_;
};

}  // namespace

std::string print_proof(const ProofTree& tree, const std::string& system_name) {
  std::vector<LabeledClaim> claims;
  collect_claims(tree, claims);
  std::string out = "(proof " + system_name + "\n";
  for (const auto& c : claims) {
    SExpr e = SExpr::list({SExpr::atom("claim"), SExpr::atom(c.label), vars_of(c.claim.lhs, c.claim.rhs),
                           SExpr::list({SExpr::atom("lhs"), SExpr::string(to_string(c.claim.lhs))}),
                           SExpr::list({SExpr::atom("rhs"), SExpr::string(to_string(c.claim.rhs))})});
    out += "  " + print_sexpr(e, 2) + "\n";
  }
  out += "  " + print_sexpr(print_node(tree), 2) + ")\n";
  return out;
}

ProofTree parse_proof(std::string_view text, const ReachabilitySystem& sys) {
  return Reader(sys).read(text);
}

}  // namespace rl
