#include "rl/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace rl {

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Op, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1, col = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "theory", "sorts", "open", "config", "symbol", "vars", "define", "rule", "goal", "claim",
      "bound", "circularity", "instances", "with", "end", "builtin", "in", "exists", "forall"};
  return k;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

[[noreturn]] void parse_error(int line, int col, const std::string& msg) {
  throw Error(Error::Kind::Parse, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

std::vector<Token> lex(std::string_view src) {
  static const char* ops[] = {"=>", "->", "/\\", "\\/", "..", "<=", ">=", "!=", "&&", "||", "(",
                              ")",  ",",  ":",   ".",   "~",  "!",  "+",  "-",  "*",  "/",  "<",
                              ">",  "=",  "[",   "]",   "{",  "}",  ";"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size()) {
        if (ident_char(src[j])) {
          ++j;
        } else if (src[j] == '.' && j + 1 < src.size() && ident_start(src[j + 1])) {
          j += 2;  // dotted labels such as step.theta
        } else {
          break;
        }
      }
      while (j < src.size() && src[j] == '\'') ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        parse_error(line, col, "integer literal out of range");
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* op : ops) {
      std::string_view o(op);
      if (src.substr(i, o.size()) == o) {
        t.kind = Token::Kind::Op;
        t.text = std::string(o);
        advance(o.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) parse_error(line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Expression parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_op(const char* op, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Op && peek(ahead).text == op;
  }
  bool is_kw(const char* kw) const {
    return peek().kind == Token::Kind::Ident && peek().text == kw;
  }
  bool is_keyword() const {
    return peek().kind == Token::Kind::Ident && keywords().count(peek().text) &&
           peek().text != "exists" && peek().text != "forall";
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    parse_error(t.line, t.col, msg + ", found " + found);
  }
  void expect_op(const char* op) {
    if (!is_op(op)) fail(std::string("expected '") + op + "'");
    next();
  }
  void expect_kw(const char* kw) {
    if (!is_kw(kw)) fail(std::string("expected '") + kw + "'");
    next();
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Token::Kind::Ident || keywords().count(peek().text)) fail(std::string("expected ") + what);
    return next().text;
  }
  std::int64_t integer() {
    bool neg = false;
    if (is_op("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Token::Kind::Int) fail("expected integer");
    std::int64_t v = next().value;
    return neg ? -v : v;
  }

  Expr pattern() { return pattern_or(); }

 private:
  Expr binary(std::string op, Expr a, Expr b, const Token& at) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.text = std::move(op);
    e.args = {std::move(a), std::move(b)};
    e.line = at.line;
    e.col = at.col;
    return e;
  }

  Expr pattern_or() {
    Expr e = pattern_and();
    while (is_op("\\/")) {
      Token t = next();
      e = binary("\\/", std::move(e), pattern_and(), t);
    }
    return e;
  }

  Expr pattern_and() {
    Expr e = pattern_unary();
    while (is_op("/\\")) {
      Token t = next();
      e = binary("/\\", std::move(e), pattern_unary(), t);
    }
    return e;
  }

  Expr pattern_unary() {
    if (is_op("~")) {
      Token t = next();
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.text = "~";
      e.args = {pattern_unary()};
      e.line = t.line;
      e.col = t.col;
      return e;
    }
    if (is_kw("exists") || is_kw("forall")) {
      Token t = next();
      Expr e;
      e.kind = Expr::Kind::Binder;
      e.text = t.text;
      e.line = t.line;
      e.col = t.col;
      do {
        std::vector<std::string> names{ident("bound variable")};
        while (peek().kind == Token::Kind::Ident && !keywords().count(peek().text)) names.push_back(next().text);
        expect_op(":");
        std::string sort = ident("sort name");
        for (auto& n : names) e.bound.emplace_back(std::move(n), sort);
      } while (is_op(",") && (next(), true));
      expect_op(".");
      e.args = {pattern_or()};
      return e;
    }
    return term_or();
  }

  Expr term_or() {
    Expr e = term_and();
    while (is_op("||")) {
      Token t = next();
      e = binary("||", std::move(e), term_and(), t);
    }
    return e;
  }

  Expr term_and() {
    Expr e = comparison();
    while (is_op("&&")) {
      Token t = next();
      e = binary("&&", std::move(e), comparison(), t);
    }
    return e;
  }

  Expr comparison() {
    Expr e = additive();
    for (const char* op : {"<=", ">=", "!=", "<", ">", "="}) {
      if (is_op(op)) {
        Token t = next();
        return binary(op, std::move(e), additive(), t);
      }
    }
    return e;
  }

  Expr additive() {
    Expr e = multiplicative();
    while (is_op("+") || is_op("-")) {
      Token t = next();
      e = binary(t.text, std::move(e), multiplicative(), t);
    }
    return e;
  }

  Expr multiplicative() {
    Expr e = unary();
    while (is_op("*") || is_op("/")) {
      Token t = next();
      e = binary(t.text, std::move(e), unary(), t);
    }
    return e;
  }

  Expr unary() {
    if (is_op("-") || is_op("!")) {
      Token t = next();
      Expr inner = unary();
      if (t.text == "-" && inner.kind == Expr::Kind::Int) {
        inner.value = -inner.value;
        inner.line = t.line;
        inner.col = t.col;
        return inner;
      }
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.text = t.text;
      e.args = {std::move(inner)};
      e.line = t.line;
      e.col = t.col;
      return e;
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    Expr e;
    e.line = t.line;
    e.col = t.col;
    if (t.kind == Token::Kind::Int) {
      e.kind = Expr::Kind::Int;
      e.value = next().value;
      return e;
    }
    if (is_op("(")) {
      next();
      Expr inner = pattern_or();
      if (is_op(",")) {
        next();
        e.kind = Expr::Kind::Tuple;
        e.args = {std::move(inner), pattern_or()};
        expect_op(")");
        return e;
      }
      expect_op(")");
      return inner;
    }
    if (is_op("[")) {
      // Bracket notation is sugar for the symbol named "[]".
      next();
      e.kind = Expr::Kind::Call;
      e.text = "[]";
      if (!is_op("]")) {
        e.args.push_back(pattern_or());
        while (is_op(",")) {
          next();
          e.args.push_back(pattern_or());
        }
      }
      expect_op("]");
      return e;
    }
    if (t.kind == Token::Kind::Ident && !keywords().count(t.text)) {
      e.text = next().text;
      if (is_op("(")) {
        next();
        e.kind = Expr::Kind::Call;
        if (!is_op(")")) {
          e.args.push_back(pattern_or());
          while (is_op(",")) {
            next();
            e.args.push_back(pattern_or());
          }
        }
        expect_op(")");
        return e;
      }
      e.kind = Expr::Kind::Ident;
      return e;
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Elaboration

[[noreturn]] void sort_error(const Expr& e, const std::string& msg) {
  throw Error(Error::Kind::IllSorted, std::to_string(e.line) + ":" + std::to_string(e.col) + ": " + msg);
}

const Macro* find_macro(const Scope& scope, const std::string& name) {
  if (!scope.macros) return nullptr;
  for (const auto& m : *scope.macros) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

Builtin binary_builtin(const std::string& op) {
  static const std::map<std::string, Builtin> table = {
      {"+", Builtin::Add}, {"-", Builtin::Sub}, {"*", Builtin::Mul}, {"/", Builtin::Div},
      {"<", Builtin::Lt},  {"<=", Builtin::Le}, {">", Builtin::Gt},  {">=", Builtin::Ge},
      {"=", Builtin::Eq},  {"!=", Builtin::Ne}, {"&&", Builtin::And}, {"||", Builtin::Or}};
  auto it = table.find(op);
  return it == table.end() ? Builtin::None : it->second;
}

// Literals adapt to Nat when the other operand is Nat.
Term adapt_literal(const Term& lit, const Term& other) {
  if (lit.kind() == Term::Kind::Int && lit.int_value() >= 0 &&
      other.sort().builtin == BuiltinSort::Nat && lit.sort().builtin == BuiltinSort::Int) {
    return Term::integer(lit.int_value(), nat_sort());
  }
  return lit;
}

Term expand_macro(const Macro& m, const Expr& e, const Signature& sig, const Scope& scope) {
  if (e.args.size() != m.params.size()) {
    sort_error(e, "macro " + m.name + " expects " + std::to_string(m.params.size()) + " arguments");
  }
  Substitution sigma;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    Term arg = elaborate_term(e.args[i], sig, scope, &m.params[i].sort);
    if (!sort_accepts(m.params[i].sort, arg.sort())) {
      sort_error(e.args[i], "argument of " + m.name + " has sort " + arg.sort().name + ", expected " +
                                m.params[i].sort.name);
    }
    sigma.bind(m.params[i], arg);
  }
  return apply_substitution(sigma, m.body);
}

Term elaborate_app(const Expr& e, const Signature& sig, const Scope& scope, const Sort* expected) {
  std::vector<SymbolPtr> candidates;
  for (const auto& f : sig.overloads(e.text)) {
    if (f->arg_sorts.size() == e.args.size()) candidates.push_back(f);
  }
  if (candidates.empty()) {
    if (sig.overloads(e.text).empty()) sort_error(e, "unknown symbol " + e.text);
    sort_error(e, "no overload of " + e.text + " takes " + std::to_string(e.args.size()) + " arguments");
  }
  if (expected) {
    std::stable_partition(candidates.begin(), candidates.end(),
                          [&](const SymbolPtr& f) { return sort_accepts(*expected, f->result); });
  }
  std::optional<Error> last;
  for (const auto& f : candidates) {
    try {
      std::vector<Term> args;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        args.push_back(elaborate_term(e.args[i], sig, scope, &f->arg_sorts[i]));
      }
      return Term::app(f, std::move(args));
    } catch (const Error& err) {
      if (err.kind() != Error::Kind::IllSorted) throw;
      last = err;
    }
  }
  throw *last;
}

}  // namespace

Expr parse_expr(std::string_view text) {
  Parser p(lex(text));
  Expr e = p.pattern();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return e;
}

Term elaborate_term(const Expr& e, const Signature& sig, const Scope& scope, const Sort* expected) {
  switch (e.kind) {
    case Expr::Kind::Int:
      if (expected && expected->builtin == BuiltinSort::Nat && e.value >= 0) {
        return Term::integer(e.value, nat_sort());
      }
      return Term::integer(e.value);
    case Expr::Kind::Ident: {
      if (e.text == "true") return Term::boolean(true);
      if (e.text == "false") return Term::boolean(false);
      if (auto it = scope.vars.find(e.text); it != scope.vars.end()) return Term::var(it->second);
      if (const Macro* m = find_macro(scope, e.text)) return expand_macro(*m, e, sig, scope);
      std::vector<SymbolPtr> constants;
      for (const auto& f : sig.overloads(e.text)) {
        if (f->arg_sorts.empty()) constants.push_back(f);
      }
      if (expected) {
        for (const auto& f : constants) {
          if (sort_accepts(*expected, f->result)) return Term::app(f, {});
        }
      }
      if (constants.size() == 1) return Term::app(constants.front(), {});
      if (expected && expected->open) return Term::atom(e.text, *expected);
      if (constants.size() > 1) sort_error(e, "ambiguous constant " + e.text);
      sort_error(e, "unknown identifier " + e.text);
    }
    case Expr::Kind::Call:
      if (const Macro* m = find_macro(scope, e.text)) return expand_macro(*m, e, sig, scope);
      return elaborate_app(e, sig, scope, expected);
    case Expr::Kind::Tuple: {
      std::optional<Error> last;
      for (const auto& f : sig.symbols()) {
        if (f->builtin != Builtin::Pair) continue;
        try {
          return Term::app(f, {elaborate_term(e.args[0], sig, scope, &f->arg_sorts[0]),
                               elaborate_term(e.args[1], sig, scope, &f->arg_sorts[1])});
        } catch (const Error& err) {
          if (err.kind() != Error::Kind::IllSorted) throw;
          last = err;
        }
      }
      if (last) throw *last;
      sort_error(e, "pairs need an extended signature");
    }
    case Expr::Kind::Unary: {
      if (e.text == "!") {
        Term a = elaborate_term(e.args[0], sig, scope, &bool_sort());
        auto f = sig.resolve("!", std::vector<Sort>{a.sort()});
        if (!f) sort_error(e, "'!' needs a Bool operand");
        return Term::app(f, {a});
      }
      if (e.text == "-") {
        Term a = elaborate_term(e.args[0], sig, scope, nullptr);
        if (!a.sort().is_numeric()) sort_error(e, "'-' needs a numeric operand");
        return Term::app(sig.arithmetic(Builtin::Sub, int_sort(), a.sort()), {Term::integer(0), a});
      }
      sort_error(e, "pattern connective '" + e.text + "' inside a term");
    }
    case Expr::Kind::Binary: {
      Builtin b = binary_builtin(e.text);
      if (b == Builtin::None) sort_error(e, "pattern connective '" + e.text + "' inside a term");
      const bool arith = b == Builtin::Add || b == Builtin::Sub || b == Builtin::Mul || b == Builtin::Div;
      const Sort* hint = nullptr;
      if (arith && expected && expected->builtin == BuiltinSort::Nat) hint = expected;
      if (b == Builtin::And || b == Builtin::Or) hint = &bool_sort();
      Term l = elaborate_term(e.args[0], sig, scope, hint);
      Term r = elaborate_term(e.args[1], sig, scope, hint);
      l = adapt_literal(l, r);
      r = adapt_literal(r, l);
      std::vector<Sort> sorts{l.sort(), r.sort()};
      SymbolPtr f;
      for (const auto& s : sig.symbols()) {
        if (s->builtin == b && s->name == e.text && s->arg_sorts.size() == 2 &&
            sort_accepts(s->arg_sorts[0], l.sort()) && sort_accepts(s->arg_sorts[1], r.sort())) {
          f = s;
          break;
        }
      }
      if (!f) {
        sort_error(e, "no operator " + e.text + " on " + l.sort().name + " and " + r.sort().name);
      }
      return Term::app(f, {l, r});
    }
    case Expr::Kind::Binder:
      sort_error(e, "quantifier inside a term");
  }
  sort_error(e, "bad expression");
}

Pattern elaborate_pattern(const Expr& e, const Signature& sig, const Scope& scope) {
  if (e.kind == Expr::Kind::Binary && (e.text == "/\\" || e.text == "\\/")) {
    Pattern a = elaborate_pattern(e.args[0], sig, scope);
    Pattern b = elaborate_pattern(e.args[1], sig, scope);
    return e.text == "/\\" ? Pattern::conj(a, b) : Pattern::disj(a, b);
  }
  if (e.kind == Expr::Kind::Unary && e.text == "~") {
    return Pattern::neg(elaborate_pattern(e.args[0], sig, scope));
  }
  if (e.kind == Expr::Kind::Binder) {
    Scope inner = scope;
    std::vector<Variable> vs;
    for (const auto& [name, sort] : e.bound) {
      if (!sig.has_sort(sort)) sort_error(e, "unknown sort " + sort);
      vs.push_back(Variable{name, sig.sort(sort)});
      inner.declare(vs.back());
    }
    Pattern body = elaborate_pattern(e.args[0], sig, inner);
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
      body = e.text == "exists" ? Pattern::exists(*it, body) : Pattern::forall(*it, body);
    }
    return body;
  }
  Term t = elaborate_term(e, sig, scope, nullptr);
  if (t.sort().builtin == BuiltinSort::Bool) return Pattern::predicate(t);
  if (t.sort().is_builtin()) sort_error(e, "a pattern cannot be a term of sort " + t.sort().name);
  return Pattern::basic(t);
}

Term parse_term(std::string_view text, const Signature& sig, const Scope& scope, const Sort* expected) {
  return elaborate_term(parse_expr(text), sig, scope, expected);
}

Pattern parse_pattern(std::string_view text, const Signature& sig, const Scope& scope) {
  return elaborate_pattern(parse_expr(text), sig, scope);
}

// ---------------------------------------------------------------------------
// Theory files

namespace {

const std::map<std::string, Builtin>& builtin_names() {
  static const std::map<std::string, Builtin> m = {{"lookup", Builtin::Lookup},
                                                   {"update", Builtin::Update},
                                                   {"emptyenv", Builtin::EmptyEnv},
                                                   {"headis", Builtin::HeadIs},
                                                   {"pair", Builtin::Pair}};
  return m;
}

std::string builtin_name(Builtin b) {
  for (const auto& [name, tag] : builtin_names()) {
    if (tag == b) return name;
  }
  return {};
}

// Reads `a b c : Sort` into variables.
std::vector<std::pair<std::string, std::string>> parse_var_decl(Parser& p) {
  std::vector<std::string> names{p.ident("variable name")};
  while (!p.is_op(":")) names.push_back(p.ident("variable name"));
  p.expect_op(":");
  std::string sort = p.ident("sort name");
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& n : names) out.emplace_back(std::move(n), sort);
  return out;
}

// Captures the source text between two token positions for printing back.
std::string slice(std::string_view src, const Token& from, const Token& to) {
  auto offset = [&](const Token& t) {
    int line = 1;
    std::size_t i = 0;
    while (i < src.size() && line < t.line) {
      if (src[i] == '\n') ++line;
      ++i;
    }
    return std::min(src.size(), i + static_cast<std::size_t>(t.col - 1));
  };
  std::size_t a = offset(from), b = to.kind == Token::Kind::End ? src.size() : offset(to);
  std::string s(src.substr(a, b - a));
  // Drop trailing comments and whitespace.
  std::string out;
  std::istringstream lines(s);
  std::string line;
  while (std::getline(lines, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (!out.empty()) out += ' ';
    out += line;
  }
  auto notspace = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
  out.erase(out.begin(), std::find_if(out.begin(), out.end(), notspace));
  out.erase(std::find_if(out.rbegin(), out.rend(), notspace).base(), out.end());
  // Collapse runs of whitespace.
  std::string collapsed;
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  return collapsed;
}

struct MacroHeader {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  std::string result;
  Expr body;
  std::string text;
};

MacroHeader parse_define(Parser& p, std::string_view src) {
  MacroHeader m;
  m.name = p.ident("macro name");
  if (p.is_op("(")) {
    p.next();
    if (!p.is_op(")")) {
      do {
        for (auto& v : parse_var_decl(p)) m.params.push_back(std::move(v));
      } while (p.is_op(",") && (p.next(), true));
    }
    p.expect_op(")");
  }
  p.expect_op(":");
  m.result = p.ident("sort name");
  p.expect_op("=");
  Token start = p.peek();
  m.body = p.pattern();
  m.text = slice(src, start, p.peek());
  return m;
}

Macro elaborate_macro(const MacroHeader& h, const Signature& sig, const std::vector<Macro>& earlier) {
  Macro m;
  m.name = h.name;
  m.text = h.text;
  Scope scope;
  scope.macros = &earlier;
  for (const auto& [name, sort] : h.params) {
    if (!sig.has_sort(sort)) throw Error(Error::Kind::IllSorted, "unknown sort " + sort);
    m.params.push_back(Variable{name, sig.sort(sort)});
    scope.declare(m.params.back());
  }
  if (!sig.has_sort(h.result)) throw Error(Error::Kind::IllSorted, "unknown sort " + h.result);
  m.result = sig.sort(h.result);
  m.body = elaborate_term(h.body, sig, scope, &m.result);
  if (!sort_accepts(m.result, m.body.sort())) {
    throw Error(Error::Kind::IllSorted, "macro " + h.name + " body has sort " + m.body.sort().name);
  }
  return m;
}

ConstrainedPattern single_cp(const Pattern& p, const std::string& label, bool allow_existentials) {
  auto cps = normalize(p);
  if (cps.size() != 1) {
    throw Error(Error::Kind::UnsupportedFragment, "rule " + label + " side must not be a disjunction");
  }
  if (!allow_existentials && !cps[0].existentials.empty()) {
    throw Error(Error::Kind::UnsupportedFragment, "rule " + label + " lhs must not be quantified");
  }
  return cps[0];
}

}  // namespace

ReachabilitySystem parse_theory(std::string_view text) {
  Parser p(lex(text));
  ReachabilitySystem sys;
  Scope scope;
  scope.macros = &sys.macros;
  while (!p.at_end()) {
    if (p.is_kw("theory")) {
      p.next();
      sys.name = p.ident("theory name");
    } else if (p.is_kw("sorts") || p.is_kw("open")) {
      bool open = p.is_kw("open");
      p.next();
      if (open) p.expect_kw("sorts");
      while (p.peek().kind == Token::Kind::Ident && !keywords().count(p.peek().text)) {
        Sort s;
        s.name = p.next().text;
        s.open = open;
        sys.sig.add_sort(s);
      }
    } else if (p.is_kw("config")) {
      p.next();
      sys.sig.set_cfg_sort(p.ident("sort name"));
    } else if (p.is_kw("symbol")) {
      p.next();
      FunctionSymbol f;
      if (p.is_op("[") && p.is_op("]", 1)) {
        p.next();
        p.next();
        f.name = "[]";
      } else {
        f.name = p.ident("symbol name");
      }
      p.expect_op(":");
      while (!p.is_op("->")) f.arg_sorts.push_back(sys.sig.sort(p.ident("sort name")));
      p.expect_op("->");
      f.result = sys.sig.sort(p.ident("sort name"));
      if (p.is_kw("builtin")) {
        p.next();
        std::string kind = p.ident("builtin kind");
        auto it = builtin_names().find(kind);
        if (it == builtin_names().end()) p.fail("unknown builtin kind " + kind);
        f.builtin = it->second;
        if (f.builtin == Builtin::HeadIs) f.builtin_arg = p.ident("symbol name");
      }
      sys.sig.add_symbol(std::move(f));
    } else if (p.is_kw("vars")) {
      p.next();
      for (const auto& [name, sort] : parse_var_decl(p)) scope.declare(Variable{name, sys.sig.sort(sort)});
    } else if (p.is_kw("define")) {
      p.next();
      sys.macros.push_back(elaborate_macro(parse_define(p, text), sys.sig, sys.macros));
    } else if (p.is_kw("rule")) {
      p.next();
      ReachabilityRule r;
      r.label = p.ident("rule label");
      p.expect_op(":");
      Pattern lhs = elaborate_pattern(p.pattern(), sys.sig, scope);
      p.expect_op("=>");
      Pattern rhs = elaborate_pattern(p.pattern(), sys.sig, scope);
      r.lhs = single_cp(lhs, r.label, false);
      r.rhs = single_cp(rhs, r.label, true);
      sys.rules.push_back(std::move(r));
    } else {
      p.fail("expected a declaration");
    }
  }
  return sys;
}

namespace {

std::string join_sorts(const std::vector<Sort>& sorts) {
  std::string out;
  for (const auto& s : sorts) {
    if (!out.empty()) out += ' ';
    out += s.name;
  }
  return out;
}

std::string print_var_decls(const std::vector<Variable>& vars) {
  // Group by sort, keeping first-appearance order.
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  for (const auto& v : vars) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == v.sort.name; });
    if (it == groups.end()) {
      groups.push_back({v.sort.name, {v.name}});
    } else {
      it->second.push_back(v.name);
    }
  }
  std::string out;
  for (const auto& [sort, names] : groups) {
    out += "vars";
    for (const auto& n : names) out += " " + n;
    out += " : " + sort + "\n";
  }
  return out;
}

// Variables in order of first occurrence, rejecting a name used at two sorts.
void add_vars(std::vector<Variable>& out, const VarSet& vs) {
  for (const auto& v : vs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Variable& w) { return w.name == v.name; });
    if (it == out.end()) {
      out.push_back(v);
    } else if (!(it->sort == v.sort)) {
      throw Error(Error::Kind::NameCollision, "variable " + v.name + " is used at sorts " +
                                                  it->sort.name + " and " + v.sort.name);
    }
  }
}

}  // namespace

std::string print_theory(const ReachabilitySystem& sys) {
  std::ostringstream os;
  if (!sys.name.empty()) os << "theory " << sys.name << "\n\n";
  std::vector<Sort> plain, open;
  for (const auto& s : sys.sig.user_sorts()) (s.open ? open : plain).push_back(s);
  if (!plain.empty()) os << "sorts " << join_sorts(plain) << "\n";
  if (!open.empty()) os << "open sorts " << join_sorts(open) << "\n";
  if (sys.sig.has_cfg_sort()) os << "config " << sys.sig.cfg_sort().name << "\n";
  os << "\n";
  for (const auto& f : sys.sig.user_symbols()) {
    os << "symbol " << f->name << " :";
    for (const auto& s : f->arg_sorts) os << " " << s.name;
    os << " -> " << f->result.name;
    if (f->builtin != Builtin::None) {
      os << " builtin " << builtin_name(f->builtin);
      if (f->builtin == Builtin::HeadIs) os << " " << f->builtin_arg;
    }
    os << "\n";
  }
  if (!sys.macros.empty()) os << "\n";
  for (const auto& m : sys.macros) {
    os << "define " << m.name;
    if (!m.params.empty()) {
      os << "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        os << (i ? ", " : "") << m.params[i].name << " : " << m.params[i].sort.name;
      }
      os << ")";
    }
    os << " : " << m.result.name << " = " << m.text << "\n";
  }
  std::vector<Variable> vars;
  for (const auto& r : sys.rules) {
    add_vars(vars, free_vars(r.lhs));
    add_vars(vars, free_vars(r.rhs));
  }
  if (!vars.empty()) os << "\n" << print_var_decls(vars);
  if (!sys.rules.empty()) os << "\n";
  for (const auto& r : sys.rules) {
    os << "rule " << r.label << " : " << to_string(r.lhs) << "\n    => " << to_string(r.rhs) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Goal files

const RawGoal* GoalFile::find(const std::string& name) const {
  for (const auto& g : goals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

GoalFile parse_goal_file(std::string_view text) {
  Parser p(lex(text));
  GoalFile file;
  while (!p.at_end()) {
    if (p.is_kw("define")) {
      p.next();
      MacroHeader h = parse_define(p, text);
      file.macros.push_back({h.name, h.params, h.result, h.body, h.text});
      continue;
    }
    if (!p.is_kw("goal")) p.fail("expected 'goal' or 'define'");
    p.next();
    RawGoal g;
    g.name = p.ident("goal name");
    bool has_claim = false;
    while (!p.is_kw("end")) {
      if (p.is_kw("vars")) {
        p.next();
        for (auto& v : parse_var_decl(p)) g.vars.push_back(std::move(v));
      } else if (p.is_kw("claim")) {
        p.next();
        g.lhs = p.pattern();
        p.expect_op("=>");
        g.rhs = p.pattern();
        has_claim = true;
      } else if (p.is_kw("bound")) {
        p.next();
        g.bound = p.pattern();
        if (p.peek().kind == Token::Kind::Ident && p.peek().text == "as") {
          p.next();
          g.result_name = p.ident("variable name");
        }
      } else if (p.is_kw("circularity")) {
        p.next();
        RawGoal::RawCircularity c;
        c.label = p.ident("circularity label");
        p.expect_op(":");
        c.lhs = p.pattern();
        p.expect_op("=>");
        c.rhs = p.pattern();
        g.circularities.push_back(std::move(c));
      } else if (p.is_kw("instances")) {
        p.next();
        do {
          RawGoal::RawRange r;
          r.var = p.ident("variable name");
          p.expect_kw("in");
          r.lo = p.integer();
          p.expect_op("..");
          r.hi = p.integer();
          g.ranges.push_back(std::move(r));
        } while (p.is_op(",") && (p.next(), true));
        if (p.is_kw("with")) {
          p.next();
          do {
            std::string v = p.ident("variable name");
            p.expect_op("=");
            g.bindings.emplace_back(v, p.pattern());
          } while (p.is_op(",") && (p.next(), true));
        }
      } else {
        p.fail("expected a goal item or 'end'");
      }
    }
    p.next();
    if (!has_claim) p.fail("goal " + g.name + " has no claim");
    if (file.find(g.name)) p.fail("duplicate goal " + g.name);
    file.goals.push_back(std::move(g));
  }
  return file;
}

std::vector<Macro> elaborate_macros(const GoalFile& file, const Signature& sig,
                                    const std::vector<Macro>& inherited) {
  std::vector<Macro> all = inherited;
  for (const auto& raw : file.macros) {
    MacroHeader h{raw.name, raw.params, raw.result, raw.body, raw.text};
    all.push_back(elaborate_macro(h, sig, all));
  }
  return all;
}

Goal elaborate_goal(const GoalFile& file, const RawGoal& raw, const Signature& claim_sig,
                    const Signature& circ_sig, const std::vector<Macro>& theory_macros) {
  Goal g;
  g.name = raw.name;
  std::vector<Macro> macros = elaborate_macros(file, claim_sig, theory_macros);
  Scope scope;
  scope.macros = &macros;
  for (const auto& [name, sort] : raw.vars) {
    if (!claim_sig.has_sort(sort)) throw Error(Error::Kind::IllSorted, "unknown sort " + sort);
    g.vars.push_back(Variable{name, claim_sig.sort(sort)});
    scope.declare(g.vars.back());
  }
  g.claim.lhs = elaborate_pattern(raw.lhs, claim_sig, scope);
  g.claim.rhs = elaborate_pattern(raw.rhs, claim_sig, scope);
  if (raw.bound) {
    g.bound = elaborate_term(*raw.bound, claim_sig, scope, &nat_sort());
    if (!sort_accepts(nat_sort(), g.bound->sort())) {
      throw Error(Error::Kind::IllSorted, "bound of goal " + raw.name + " must have sort Nat, not " +
                                              g.bound->sort().name);
    }
  }
  g.result_name = raw.result_name;
  Scope circ_scope = scope;
  for (auto& [name, v] : circ_scope.vars) {
    if (circ_sig.has_sort(v.sort.name)) v.sort = circ_sig.sort(v.sort.name);
  }
  for (const auto& c : raw.circularities) {
    g.circularities.push_back(
        {c.label, {elaborate_pattern(c.lhs, circ_sig, circ_scope), elaborate_pattern(c.rhs, circ_sig, circ_scope)}});
  }
  for (const auto& r : raw.ranges) {
    auto it = scope.vars.find(r.var);
    if (it == scope.vars.end()) throw Error(Error::Kind::Input, "instance variable " + r.var + " not declared");
    g.instances.ranges.push_back({it->second, r.lo, r.hi});
  }
  for (const auto& [name, e] : raw.bindings) {
    auto it = scope.vars.find(name);
    if (it == scope.vars.end()) throw Error(Error::Kind::Input, "instance variable " + name + " not declared");
    g.instances.bindings.emplace_back(it->second, elaborate_term(e, claim_sig, scope, &it->second.sort));
  }
  return g;
}

std::string print_goal(const Goal& g) {
  std::ostringstream os;
  os << "goal " << g.name << "\n";
  std::string decls = print_var_decls(g.vars);
  std::istringstream lines(decls);
  for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
  os << "  claim " << to_string(g.claim.lhs) << "\n    => " << to_string(g.claim.rhs) << "\n";
  if (g.bound) {
    os << "  bound " << to_string(*g.bound);
    if (!g.result_name.empty()) os << " as " << g.result_name;
    os << "\n";
  }
  for (const auto& c : g.circularities) {
    os << "  circularity " << c.label << " : " << to_string(c.claim.lhs) << "\n    => "
       << to_string(c.claim.rhs) << "\n";
  }
  if (!g.instances.ranges.empty()) {
    os << "  instances ";
    for (std::size_t i = 0; i < g.instances.ranges.size(); ++i) {
      const auto& r = g.instances.ranges[i];
      os << (i ? ", " : "") << r.var.name << " in " << r.lo << " .. " << r.hi;
    }
    for (std::size_t i = 0; i < g.instances.bindings.size(); ++i) {
      const auto& [v, t] = g.instances.bindings[i];
      os << (i ? ", " : " with ") << v.name << " = " << to_string(t);
    }
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// S-expressions

bool SExpr::is_list(std::string_view head) const {
  return kind == Kind::List && !items.empty() && items[0].kind == Kind::Atom && items[0].text == head;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::size_t i = 0;
  int line = 1;
  auto skip = [&] {
    while (i < text.size()) {
      if (text[i] == '\n') {
        ++line;
        ++i;
      } else if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      } else if (text[i] == '#') {
        while (i < text.size() && text[i] != '\n') ++i;
      } else {
        break;
      }
    }
  };
  std::function<SExpr()> read = [&]() -> SExpr {
    skip();
    if (i >= text.size()) throw Error(Error::Kind::Parse, std::to_string(line) + ": unexpected end of input");
    SExpr e;
    e.line = line;
    if (text[i] == '(') {
      ++i;
      e.kind = SExpr::Kind::List;
      while (true) {
        skip();
        if (i >= text.size()) throw Error(Error::Kind::Parse, std::to_string(e.line) + ": unclosed '('");
        if (text[i] == ')') {
          ++i;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (text[i] == ')') throw Error(Error::Kind::Parse, std::to_string(line) + ": unexpected ')'");
    if (text[i] == '"') {
      ++i;
      e.kind = SExpr::Kind::String;
      while (true) {
        if (i >= text.size()) throw Error(Error::Kind::Parse, std::to_string(e.line) + ": unterminated string");
        char c = text[i++];
        if (c == '"') return e;
        if (c == '\n') ++line;
        if (c == '\\' && i < text.size() && (text[i] == '"' || text[i] == '\\')) c = text[i++];
        e.text += c;
      }
    }
    e.kind = SExpr::Kind::Atom;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
           text[i] != ')' && text[i] != '"') {
      e.text += text[i++];
    }
    return e;
  };
  std::vector<SExpr> out;
  skip();
  while (i < text.size()) {
    out.push_back(read());
    skip();
  }
  return out;
}

namespace {

std::string flat(const SExpr& e) {
  switch (e.kind) {
    case SExpr::Kind::Atom: return e.text;
    case SExpr::Kind::String: {
      std::string out = "\"";
      for (std::size_t k = 0; k < e.text.size(); ++k) {
        char c = e.text[k];
        // Only a backslash that would read as an escape needs doubling.
        bool escapes = c == '\\' && (k + 1 == e.text.size() || e.text[k + 1] == '"' || e.text[k + 1] == '\\');
        if (c == '"' || escapes) out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case SExpr::Kind::List: {
      std::string out = "(";
      for (std::size_t k = 0; k < e.items.size(); ++k) out += (k ? " " : "") + flat(e.items[k]);
      return out + ")";
    }
  }
  return {};
}

}  // namespace

std::string print_sexpr(const SExpr& e, int indent) {
  std::string one = flat(e);
  if (e.kind != SExpr::Kind::List || one.size() + static_cast<std::size_t>(indent) <= 100) return one;
  std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  std::string out = "(";
  std::size_t k = 0;
  // Keep the head atom on the opening line.
  if (!e.items.empty() && e.items[0].kind == SExpr::Kind::Atom) {
    out += e.items[0].text;
    k = 1;
  }
  for (; k < e.items.size(); ++k) {
    out += "\n" + pad + print_sexpr(e.items[k], indent + 2);
  }
  return out + ")";
}

}  // namespace rl
