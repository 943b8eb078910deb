// SMT-LIB 2 scripts, replies, and the external solver process.

#include <boost/process.hpp>
#include <future>
#include <sstream>

#include "rl/solver.hpp"
#include "rl/syntax.hpp"

namespace rl {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out += c;
    } else if (c == '\'') {
      out += "_p";
    } else {
      out += '_';
    }
  }
  return out.empty() ? "_" : out;
}

class Emitter {
 public:
  std::string formula(const Pattern& p, std::map<std::string, Sort> bound = {}) {
    switch (p.kind()) {
      case Pattern::Kind::Basic:
        throw Error(Error::Kind::UnsupportedFragment, "basic pattern in a solver query");
      case Pattern::Kind::Predicate:
        return term(p.term(), bound);
      case Pattern::Kind::Not:
        return "(not " + formula(p.body(), bound) + ")";
      case Pattern::Kind::And:
        return "(and " + formula(p.left(), bound) + " " + formula(p.right(), bound) + ")";
      case Pattern::Kind::Or:
        return "(or " + formula(p.left(), bound) + " " + formula(p.right(), bound) + ")";
      case Pattern::Kind::Exists:
      case Pattern::Kind::Forall: {
        quantified_ = true;
        const Variable& v = p.var();
        std::string name = "q" + std::to_string(bound.size()) + "_" + sanitize(v.name);
        bound[v.name] = v.sort;
        bound_names_[v.name].push_back(name);
        std::string body = formula(p.body(), bound);
        bound_names_[v.name].pop_back();
        bool exists = p.kind() == Pattern::Kind::Exists;
        if (v.sort.builtin == BuiltinSort::Nat) {
          body = exists ? "(and (>= " + name + " 0) " + body + ")" : "(=> (>= " + name + " 0) " + body + ")";
        }
        return std::string("(") + (exists ? "exists" : "forall") + " ((" + name + " " + sort(v.sort) + ")) " +
               body + ")";
      }
    }
    return "true";
  }

  std::string declare_var(const Variable& v) {
    auto it = vars_.find(v);
    if (it != vars_.end()) return it->second;
    std::string name = "v" + std::to_string(vars_.size()) + "_" + sanitize(v.name);
    vars_.emplace(v, name);
    var_order_.push_back(v);
    sort(v.sort);
    return name;
  }

  std::string preamble() const {
    std::ostringstream os;
    for (const auto& s : sort_order_) os << "(declare-sort " << sorts_.at(s) << " 0)\n";
    if (uses_div_) {
      os << "(define-fun tdiv ((a Int) (b Int)) Int (ite (>= a 0) (div a b) (- (div (- a) b))))\n";
    }
    for (const auto& [sym, name] : fun_order_) {
      os << "(declare-fun " << name << " (";
      for (std::size_t i = 0; i < sym->arg_sorts.size(); ++i) os << (i ? " " : "") << sort_name(sym->arg_sorts[i]);
      os << ") " << sort_name(sym->result) << ")\n";
    }
    for (const auto& [atom, name] : atom_order_) os << "(declare-fun " << name << " () " << sort_name(atom) << ")\n";
    for (const auto& v : var_order_) {
      os << "(declare-fun " << vars_.at(v) << " () " << sort_name(v.sort) << ")\n";
      if (v.sort.builtin == BuiltinSort::Nat) os << "(assert (>= " << vars_.at(v) << " 0))\n";
    }
    // Distinct constants of each open sort.
    std::map<std::string, std::vector<std::string>> by_sort;
    for (const auto& [atom, name] : atom_order_) by_sort[atom.name].push_back(name);
    for (const auto& [s, names] : by_sort) {
      if (names.size() < 2) continue;
      os << "(assert (distinct";
      for (const auto& n : names) os << " " << n;
      os << "))\n";
    }
    for (const auto& a : axioms_) os << "(assert " << a << ")\n";
    return os.str();
  }

  std::string logic() const {
    bool uf = !sort_order_.empty() || !fun_order_.empty() || !atom_order_.empty();
    std::string l = quantified_ || !axioms_.empty() ? "" : "QF_";
    if (uf) l += "UF";
    l += nonlinear_ ? "NIA" : "LIA";
    return l;
  }

  const std::map<Variable, std::string>& vars() const { return vars_; }

 private:
  std::string sort_name(const Sort& s) const {
    switch (s.builtin) {
      case BuiltinSort::Int:
      case BuiltinSort::Nat:
        return "Int";
      case BuiltinSort::Bool:
        return "Bool";
      case BuiltinSort::None:
        return sorts_.at(s.name);
    }
    return "Int";
  }

  std::string sort(const Sort& s) {
    if (s.builtin == BuiltinSort::None && !sorts_.count(s.name)) {
      sorts_[s.name] = "S_" + sanitize(s.name);
      sort_order_.push_back(s.name);
    }
    return sort_name(s);
  }

  std::string function(const SymbolPtr& f) {
    for (const auto& [sym, name] : fun_order_) {
      if (sym->same_as(*f) && sym->builtin == f->builtin && sym->builtin_arg == f->builtin_arg) return name;
    }
    for (const auto& s : f->arg_sorts) sort(s);
    sort(f->result);
    std::string name = "f" + std::to_string(fun_order_.size()) + "_" + sanitize(f->name);
    fun_order_.emplace_back(f, name);
    return name;
  }

  std::string atom(const Term& t) {
    sort(t.sort());
    for (const auto& [s, name] : atom_order_) {
      if (name == "a_" + sanitize(t.name()) + "_" + sanitize(s.name) && s == t.sort()) return name;
    }
    std::string name = "a_" + sanitize(t.name()) + "_" + sanitize(t.sort().name);
    atom_order_.emplace_back(t.sort(), name);
    return name;
  }

  // Axioms for the environment builtins, once every symbol is known.
  void env_axioms() {
    if (!lookup_) return;
    std::string L = function(lookup_);
    std::string I = sort_name(lookup_->arg_sorts[0]), E = sort_name(lookup_->arg_sorts[1]);
    if (update_) {
      std::string U = function(update_);
      axioms_.push_back("(forall ((x " + I + ") (v Int) (e " + E + ")) (= (" + L + " x (" + U + " x v e)) v))");
      axioms_.push_back("(forall ((x " + I + ") (y " + I + ") (v Int) (e " + E + ")) (=> (distinct x y) (= (" + L +
                        " y (" + U + " x v e)) (" + L + " y e))))");
    }
    if (empty_) {
      std::string N = function(empty_);
      axioms_.push_back("(forall ((x " + I + ")) (= (" + L + " x " + N + ") 0))");
    }
  }

 public:
  void finish() { env_axioms(); }

 private:
  std::string term(const Term& t, const std::map<std::string, Sort>& bound) {
    switch (t.kind()) {
      case Term::Kind::Int: {
        std::int64_t v = t.int_value();
        if (v >= 0) return std::to_string(v);
        return "(- " + std::to_string(static_cast<unsigned long long>(-(v + 1)) + 1) + ")";
      }
      case Term::Kind::Bool:
        return t.bool_value() ? "true" : "false";
      case Term::Kind::Atom:
        return atom(t);
      case Term::Kind::Var: {
        auto b = bound_names_.find(t.name());
        if (bound.count(t.name()) && b != bound_names_.end() && !b->second.empty()) return b->second.back();
        return declare_var(t.variable());
      }
      case Term::Kind::App:
        break;
    }
    const auto& f = t.symbol();
    std::vector<std::string> a;
    for (const auto& x : t.args()) a.push_back(term(x, bound));
    auto bin = [&](const char* op) { return std::string("(") + op + " " + a[0] + " " + a[1] + ")"; };
    switch (f.builtin) {
      case Builtin::Add: return bin("+");
      case Builtin::Sub: return bin("-");
      case Builtin::Mul:
        if (t.arg(0).kind() != Term::Kind::Int && t.arg(1).kind() != Term::Kind::Int) nonlinear_ = true;
        return bin("*");
      case Builtin::Div:
        uses_div_ = true;
        if (t.arg(1).kind() != Term::Kind::Int) nonlinear_ = true;
        return bin("tdiv");
      case Builtin::Abs: return "(abs " + a[0] + ")";
      case Builtin::Lt: return bin("<");
      case Builtin::Le: return bin("<=");
      case Builtin::Gt: return bin(">");
      case Builtin::Ge: return bin(">=");
      case Builtin::Eq: return bin("=");
      case Builtin::Ne: return bin("distinct");
      case Builtin::Not: return "(not " + a[0] + ")";
      case Builtin::And: return bin("and");
      case Builtin::Or: return bin("or");
      case Builtin::Lookup:
        lookup_ = t.symbol_ptr();
        break;
      case Builtin::Update:
        update_ = t.symbol_ptr();
        break;
      case Builtin::EmptyEnv:
        empty_ = t.symbol_ptr();
        break;
      default:
        break;
    }
    std::string name = function(t.symbol_ptr());
    if (a.empty()) return name;
    std::string out = "(" + name;
    for (const auto& x : a) out += " " + x;
    return out + ")";
  }

  std::map<std::string, std::string> sorts_;
  std::vector<std::string> sort_order_;
  std::vector<std::pair<SymbolPtr, std::string>> fun_order_;
  std::vector<std::pair<Sort, std::string>> atom_order_;
  std::map<Variable, std::string> vars_;
  std::vector<Variable> var_order_;
  std::map<std::string, std::vector<std::string>> bound_names_;
  std::vector<std::string> axioms_;
  SymbolPtr lookup_, update_, empty_;
  bool quantified_ = false;
  bool nonlinear_ = false;
  bool uses_div_ = false;
};

std::optional<std::int64_t> int_value(const SExpr& e) {
  try {
    if (e.kind == SExpr::Kind::Atom) return std::stoll(e.text);
    if (e.kind == SExpr::Kind::List && e.items.size() == 2 && e.items[0].text == "-") {
      if (auto v = int_value(e.items[1])) return -*v;
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

Pattern query_formula(const SolverQuery& q) {
  Pattern f = Pattern::conj_all(q.assertions);
  if (q.goal == SolverQuery::Goal::CheckValid) f = Pattern::conj(f, Pattern::neg(q.formula));
  return f;
}

}  // namespace

std::string emit_standard_query(const SolverQuery& q) {
  Emitter em;
  for (const auto& v : q.declared_vars) em.declare_var(v);
  std::vector<std::string> asserts;
  for (const auto& a : q.assertions) asserts.push_back(em.formula(a));
  if (q.goal == SolverQuery::Goal::CheckValid) asserts.push_back("(not " + em.formula(q.formula) + ")");
  em.finish();
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << em.logic() << ")\n";
  os << em.preamble();
  for (const auto& a : asserts) os << "(assert " << a << ")\n";
  os << "(check-sat)\n(get-model)\n(exit)\n";
  return os.str();
}

SolverVerdict parse_standard_reply(std::string_view reply, const SolverQuery& q) {
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(reply);
  } catch (const Error& e) {
    throw Error(Error::Kind::MalformedReply, std::string("solver reply: ") + e.what());
  }
  if (items.empty() || items[0].kind != SExpr::Kind::Atom) {
    throw Error(Error::Kind::MalformedReply, "solver reply does not start with a verdict");
  }
  const std::string& head = items[0].text;
  bool valid = q.goal == SolverQuery::Goal::CheckValid;
  if (head == "unsat") return {valid ? SolverVerdict::Kind::Valid : SolverVerdict::Kind::Unsat, {}, "solver"};
  if (head == "unknown" || head == "timeout") return SolverVerdict::unknown("solver");
  if (head != "sat") throw Error(Error::Kind::MalformedReply, "unexpected solver verdict '" + head + "'");

  // Recover the model of the declared variables.
  Emitter names;
  for (const auto& v : q.declared_vars) names.declare_var(v);
  std::map<std::string, Variable> by_name;
  for (const auto& [v, n] : names.vars()) by_name.emplace(n, v);
  GroundValuation w;
  if (items.size() > 1 && items[1].kind == SExpr::Kind::List) {
    for (const auto& d : items[1].items) {
      if (!d.is_list("define-fun") || d.items.size() != 5) continue;
      auto it = by_name.find(d.items[1].text);
      if (it == by_name.end()) continue;
      const Variable& v = it->second;
      const SExpr& val = d.items[4];
      if (v.sort.builtin == BuiltinSort::Bool && val.kind == SExpr::Kind::Atom) {
        w.bind(v, Term::boolean(val.text == "true"));
      } else if (v.sort.is_numeric()) {
        auto n = int_value(val);
        if (!n) throw Error(Error::Kind::MalformedReply, "model value for " + v.name + " is not an integer");
        if (v.sort.builtin == BuiltinSort::Nat && *n < 0) continue;
        w.bind(v, Term::integer(*n, v.sort));
      }
    }
  }
  // Unconstrained numeric and boolean variables may be missing from the model.
  for (const auto& v : q.declared_vars) {
    if (w.contains(v)) continue;
    if (v.sort.builtin == BuiltinSort::Bool) w.bind(v, Term::boolean(false));
    if (v.sort.is_numeric()) w.bind(v, Term::integer(0, v.sort));
  }
  Pattern f = query_formula(q);
  if (!witness_checks(f, w, true)) return SolverVerdict::unknown("solver model could not be checked");
  return {valid ? SolverVerdict::Kind::Invalid : SolverVerdict::Kind::Sat, w, "solver"};
}

SolverVerdict Solver::external(const SolverQuery& q) const {
  if (options_.external.empty()) return SolverVerdict::unknown("no external solver");
  std::string script;
  try {
    script = emit_standard_query(q);
  } catch (const Error& e) {
    return SolverVerdict::unknown(e.what());
  }
  namespace bp = boost::process;
  std::vector<std::string> words;
  std::istringstream ws(options_.external);
  for (std::string w; ws >> w;) words.push_back(w);
  std::string exe = words[0];
  if (exe.find('/') == std::string::npos) exe = bp::search_path(exe).string();
  if (exe.empty()) return SolverVerdict::unknown("solver executable not found: " + words[0]);
  words.erase(words.begin());
  try {
    bp::opstream in;
    bp::ipstream out;
    bp::child child(exe, bp::args(words), bp::std_in < in, bp::std_out > out, bp::std_err > bp::null);
    in << script;
    in.flush();
    in.pipe().close();
    auto reader = std::async(std::launch::async, [&out] {
      std::string text, line;
      while (std::getline(out, line)) text += line + "\n";
      return text;
    });
    if (reader.wait_for(options_.timeout) != std::future_status::ready) {
      child.terminate();
      reader.wait();
      return SolverVerdict::unknown("solver timeout");
    }
    std::string reply = reader.get();
    child.wait();
    return parse_standard_reply(reply, q);
  } catch (const Error& e) {
    return SolverVerdict::unknown(std::string("solver crashed: ") + e.what());
  } catch (const std::exception& e) {
    return SolverVerdict::unknown(std::string("solver crashed: ") + e.what());
  }
}

}  // namespace rl
