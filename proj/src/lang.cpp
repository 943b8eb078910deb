#include "rl/lang.hpp"

#include <cctype>
#include <set>

#include "rl/theta.hpp"

namespace rl {

namespace detail {
// Generated from bundles/ at configure time.
extern const std::pair<std::string_view, std::string_view> kBundles[];
extern const std::size_t kBundleCount;
}  // namespace detail

std::string_view bundled_file(std::string_view name) {
  for (std::size_t i = 0; i < detail::kBundleCount; ++i) {
    if (detail::kBundles[i].first == name) return detail::kBundles[i].second;
  }
  throw Error(Error::Kind::Input, "no bundled file " + std::string(name));
}

std::vector<std::string> bundled_file_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kBundleCount; ++i) out.emplace_back(detail::kBundles[i].first);
  return out;
}

ReachabilitySystem counter_system() { return parse_theory(bundled_file("counter.theory")); }
GoalFile counter_goals() { return parse_goal_file(bundled_file("counter.goals")); }
ReachabilitySystem imp_system() { return parse_theory(bundled_file("imp.theory")); }
GoalFile imp_goals() { return parse_goal_file(bundled_file("imp.goals")); }

namespace {

Term make(const Signature& sig, const std::string& name, std::vector<Term> args) {
  std::vector<Sort> sorts;
  for (const auto& a : args) sorts.push_back(a.sort());
  SymbolPtr f = sig.resolve(name, sorts);
  if (!f) throw Error(Error::Kind::Input, "signature has no IMP symbol " + name);
  return Term::app(f, std::move(args));
}

const std::set<std::string>& imp_keywords() {
  static const std::set<std::string> kw{"skip", "if", "then", "else", "while", "do", "not", "true", "false"};
  return kw;
}

struct Token {
  enum class Kind { Ident, Int, Op, Newline, End };
  Kind kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex_imp(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Error::Kind::Parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      if (depth == 0 && !out.empty() && out.back().kind != Token::Kind::Newline) {
        out.push_back({Token::Kind::Newline, "\\n", line, col});
      }
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    Token t{Token::Kind::Op, {}, line, col};
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      t.kind = Token::Kind::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      t.kind = Token::Kind::Int;
    } else if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
      i += 2;
    } else if (std::string_view("();+-=<").find(c) != std::string_view::npos) {
      if (c == '(') ++depth;
      if (c == ')' && depth > 0) --depth;
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(src.substr(start, i - start));
    col += static_cast<int>(i - start);
    out.push_back(std::move(t));
  }
  out.push_back({Token::Kind::End, "end of input", line, col});
  return out;
}

class ImpParser {
 public:
  ImpParser(std::vector<Token> tokens, const Signature& sig) : toks_(std::move(tokens)), sig_(sig) {
    if (!sig.has_sort("Id")) throw Error(Error::Kind::Input, "signature has no sort Id");
  }

  Term program() {
    skip_newlines();
    if (peek().kind == Token::Kind::End) fail("empty program");
    Term s = seq(true);
    skip_newlines();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return s;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is(const char* text) const {
    return (peek().kind == Token::Kind::Op || peek().kind == Token::Kind::Ident) && peek().text == text;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw Error(Error::Kind::Parse,
                "line " + std::to_string(t.line) + ", column " + std::to_string(t.col) + ": " + what);
  }
  void expect(const char* text) {
    if (!is(text)) fail(std::string("expected '") + text + "', found '" + peek().text + "'");
    next();
  }
  void skip_newlines() {
    while (peek().kind == Token::Kind::Newline) next();
  }

  Term seq(bool across_lines) {
    Term first = stmt();
    if (is(";")) {
      next();
      return make(sig_, "seq", {first, seq(across_lines)});
    }
    if (across_lines && peek().kind == Token::Kind::Newline) {
      skip_newlines();
      if (peek().kind == Token::Kind::End) return first;
      return make(sig_, "seq", {first, seq(across_lines)});
    }
    return first;
  }

  Term stmt() {
    if (is("skip")) {
      next();
      return make(sig_, "skip", {});
    }
    if (is("if")) {
      next();
      Term c = bexp();
      expect("then");
      Term a = stmt();
      expect("else");
      Term b = stmt();
      return make(sig_, "ite", {c, a, b});
    }
    if (is("while")) {
      next();
      Term c = bexp();
      expect("do");
      return make(sig_, "while", {c, seq(false)});
    }
    if (is("(")) {
      next();
      Term s = seq(false);
      expect(")");
      return s;
    }
    Term x = ident("a statement");
    expect(":=");
    return make(sig_, "assign", {x, aexp()});
  }

  Term ident(const char* what) {
    if (peek().kind != Token::Kind::Ident || imp_keywords().count(peek().text)) {
      fail(std::string("expected ") + what + ", found '" + peek().text + "'");
    }
    return Term::atom(next().text, sig_.sort("Id"));
  }

  std::int64_t literal() {
    if (peek().kind != Token::Kind::Int) fail("expected an integer, found '" + peek().text + "'");
    const Token& t = next();
    try {
      return std::stoll(t.text);
    } catch (const std::out_of_range&) {
      throw Error(Error::Kind::Parse, "line " + std::to_string(t.line) + ", column " + std::to_string(t.col) +
                                          ": integer out of range");
    }
  }

  Term aexp() {
    Term a = aatom();
    while (true) {
      if (is("+")) {
        next();
        a = make(sig_, "plus", {a, aatom()});
      } else if (is("-")) {
        next();
        if (peek().kind != Token::Kind::Int) fail("only an integer literal may be subtracted");
        a = make(sig_, "plus", {a, make(sig_, "int", {Term::integer(-literal())})});
      } else {
        return a;
      }
    }
  }

  Term aatom() {
    if (peek().kind == Token::Kind::Int) return make(sig_, "int", {Term::integer(literal())});
    if (is("-")) {
      next();
      return make(sig_, "int", {Term::integer(-literal())});
    }
    if (is("(")) {
      next();
      Term a = aexp();
      expect(")");
      return a;
    }
    return make(sig_, "id", {ident("an arithmetic expression")});
  }

  Term bexp() {
    if (is("true") || is("false") || is("not")) return batom();
    if (is("(")) {
      std::size_t save = pos_;
      try {
        return comparison();
      } catch (const Error& e) {
        if (e.kind() != Error::Kind::Parse) throw;
        pos_ = save;
        return batom();
      }
    }
    return comparison();
  }

  Term comparison() {
    Term a = aexp();
    if (is("=")) {
      next();
      return make(sig_, "eq", {a, aexp()});
    }
    if (is("<")) {
      next();
      return make(sig_, "lt", {a, aexp()});
    }
    fail("expected '=' or '<', found '" + peek().text + "'");
  }

  Term batom() {
    if (is("true") || is("false")) return make(sig_, "bool", {Term::boolean(next().text == "true")});
    if (is("not")) {
      next();
      return make(sig_, "not", {batom()});
    }
    if (is("(")) {
      next();
      Term b = bexp();
      expect(")");
      return b;
    }
    fail("expected a boolean expression, found '" + peek().text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
};

[[noreturn]] void unprintable(const Term& t) {
  throw Error(Error::Kind::Input, "not IMP concrete syntax: " + to_string(t));
}

bool head_is(const Term& t, const char* name) { return t.is_app() && t.symbol().name == name; }

std::int64_t int_literal(const Term& t) {
  if (!head_is(t, "int") || t.arg(0).kind() != Term::Kind::Int) unprintable(t);
  return t.arg(0).int_value();
}

std::string print_aexp(const Term& t);

std::string print_aatom(const Term& t) {
  if (head_is(t, "plus")) return "(" + print_aexp(t) + ")";
  return print_aexp(t);
}

std::string print_aexp(const Term& t) {
  if (head_is(t, "int")) return std::to_string(int_literal(t));
  if (head_is(t, "id") && t.arg(0).kind() == Term::Kind::Atom) return t.arg(0).name();
  if (head_is(t, "plus")) {
    const Term& r = t.arg(1);
    if (head_is(r, "int") && r.arg(0).kind() == Term::Kind::Int && r.arg(0).int_value() < 0 &&
        r.arg(0).int_value() != INT64_MIN) {
      return print_aexp(t.arg(0)) + " - " + std::to_string(-r.arg(0).int_value());
    }
    return print_aexp(t.arg(0)) + " + " + print_aatom(r);
  }
  unprintable(t);
}

std::string print_bexp(const Term& t);

std::string print_batom(const Term& t) {
  if (head_is(t, "eq") || head_is(t, "lt")) return "(" + print_bexp(t) + ")";
  return print_bexp(t);
}

std::string print_bexp(const Term& t) {
  if (head_is(t, "bool") && t.arg(0).kind() == Term::Kind::Bool) return t.arg(0).bool_value() ? "true" : "false";
  if (head_is(t, "eq")) return print_aexp(t.arg(0)) + " = " + print_aexp(t.arg(1));
  if (head_is(t, "lt")) return print_aexp(t.arg(0)) + " < " + print_aexp(t.arg(1));
  if (head_is(t, "not")) return "not " + print_batom(t.arg(0));
  unprintable(t);
}

std::string print_seq(const Term& t);

std::string print_stmt(const Term& t) {
  if (head_is(t, "skip")) return "skip";
  if (head_is(t, "assign") && t.arg(0).kind() == Term::Kind::Atom) {
    return t.arg(0).name() + " := " + print_aexp(t.arg(1));
  }
  if (head_is(t, "ite")) {
    auto branch = [](const Term& s) { return head_is(s, "seq") ? "(" + print_seq(s) + ")" : print_stmt(s); };
    return "if " + print_bexp(t.arg(0)) + " then " + branch(t.arg(1)) + " else " + branch(t.arg(2));
  }
  if (head_is(t, "while")) return "while " + print_bexp(t.arg(0)) + " do " + print_seq(t.arg(1));
  if (head_is(t, "seq")) return print_seq(t);
  unprintable(t);
}

// A while or if-then-else ending a statement would swallow what follows it.
std::string print_seq(const Term& t) {
  if (!head_is(t, "seq")) return print_stmt(t);
  const Term& first = t.arg(0);
  bool wrap = head_is(first, "seq") || head_is(first, "while") || head_is(first, "ite");
  std::string left = wrap ? "(" + print_seq(first) + ")" : print_stmt(first);
  return left + "; " + print_seq(t.arg(1));
}

}  // namespace

Term parse_imp(std::string_view source, const Signature& sig) {
  return ImpParser(lex_imp(source), sig).program();
}

std::string print_imp(const Term& stmt) { return print_seq(stmt); }

Term initial_config(const Term& program, const Term& env, const Signature& sig) {
  Term stack = make(sig, "cons", {make(sig, "stmt", {program}), make(sig, "nil", {})});
  return make(sig, "cfg", {stack, env});
}

Term imp_env(const std::vector<std::pair<std::string, std::int64_t>>& bindings, const Signature& sig) {
  Term env = make(sig, "env0", {});
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    env = make(sig, "update", {Term::atom(it->first, sig.sort("Id")), Term::integer(it->second), env});
  }
  return env;
}

std::vector<std::pair<std::string, std::int64_t>> imp_env_bindings(const Term& env) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  std::set<std::string> seen;
  Term e = env;
  while (e.is_app() && e.symbol().builtin == Builtin::Update) {
    const Term& x = e.arg(0);
    const Term& v = e.arg(1);
    if (x.kind() != Term::Kind::Atom || v.kind() != Term::Kind::Int) unprintable(env);
    if (seen.insert(x.name()).second) out.emplace_back(x.name(), v.int_value());
    e = e.arg(2);
  }
  if (!e.is_app() || e.symbol().builtin != Builtin::EmptyEnv) unprintable(env);
  return out;
}

PreparedGoal prepare_goal(const ReachabilitySystem& base, const GoalFile& file, const std::string& name,
                          const std::string& bound) {
  const RawGoal* found = file.find(name);
  if (!found) throw Error(Error::Kind::Input, "no goal named " + name);
  RawGoal raw = *found;
  if (!bound.empty()) raw.bound = parse_expr(bound);
  PreparedGoal out;
  if (!raw.bound) {
    out.stated = elaborate_goal(file, raw, base.sig, base.sig, base.macros);
    out.system = base;
    out.goal = out.stated;
    return out;
  }
  ReachabilitySystem ext = ext_system(base);
  out.stated = elaborate_goal(file, raw, base.sig, ext.sig, base.macros);
  out.goal = make_total_goal(out.stated, ext_signature(base.sig));
  out.system = std::move(ext);
  out.total = true;
  return out;
}

}  // namespace rl
