#pragma once

// Definition language: lexer, generic AST with source positions, parser and
// canonical printer. Semantics (name resolution, dimension checks, execution)
// live in runner.hpp.
//
// A document is a sequence of statements, one per line (or separated by ';'):
//
//   kind item item ... [= value] [{ line; line; ... }]
//
// where each body line has the same shape without a nested body. Values are
// names, polynomial expressions, lists `[v, ...]`, graded literals
// `{ (1,2): x, (3): 1 }` with 1-based basis indices, and double-section
// literals `{...} | {...}` (A-part, then A*-part). `#` starts a comment.

#include <jqn/ring.hpp>

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace jqn::dsl {

struct Pos {
  int line = 0, col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class DslError : public std::runtime_error {
 public:
  DslError(Pos p, const std::string& msg) : std::runtime_error(p.str() + ": " + msg), pos(p), message(msg) {}
  Pos pos;
  std::string message;
};

using GradedTerms = std::vector<std::pair<std::vector<int>, Poly>>;

struct Value {
  enum class Kind { name, expr, list, tuple, graded, section };
  Kind kind = Kind::name;
  std::string name;          // name
  Poly poly;                 // expr
  std::vector<Value> items;  // list, tuple
  GradedTerms terms, terms2; // graded; section uses both
  Pos pos;

  static Value make_name(std::string n, Pos p) {
    Value v;
    v.kind = Kind::name;
    v.name = std::move(n);
    v.pos = p;
    return v;
  }
  bool is_name() const { return kind == Kind::name; }

  // Positions are not part of a value's identity.
  bool operator==(const Value& o) const {
    return kind == o.kind && name == o.name && poly == o.poly && items == o.items && terms == o.terms &&
           terms2 == o.terms2;
  }
};

struct Line {
  std::vector<Value> head;
  std::optional<Value> value;
  Pos pos;
  bool operator==(const Line& o) const { return head == o.head && value == o.value; }
  /// Head item k as a word, or empty.
  std::string word(std::size_t k) const { return k < head.size() && head[k].is_name() ? head[k].name : std::string{}; }
};

struct Statement {
  Line header;
  std::optional<std::vector<Line>> body;
  bool operator==(const Statement& o) const { return header == o.header && body == o.body; }
  const std::string& kind() const { return header.head.front().name; }
  const Pos& pos() const { return header.pos; }
};

struct Document {
  std::vector<Statement> statements;
  bool operator==(const Document& o) const { return statements == o.statements; }
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok { ident, integer, punct, newline, end };

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
}

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;  // count code points, not bytes
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    Pos p{line, col};
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (c == '\n' || c == ';') {
      out.push_back({Tok::newline, std::string(1, c), p});
      advance(1);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::ident, src.substr(i, j - i), p});
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::integer, src.substr(i, j - i), p});
      advance(j - i);
    } else if (std::string("()[]{},:=+-*/^|").find(c) != std::string::npos) {
      out.push_back({Tok::punct, std::string(1, c), p});
      advance(1);
    } else {
      throw DslError(p, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::end, "", Pos{line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Document document() {
    Document doc;
    for (;;) {
      skip_newlines();
      if (peek().kind == Tok::end) break;
      doc.statements.push_back(statement());
    }
    return doc;
  }

 private:
  std::vector<Token> t_;
  std::size_t k_ = 0;
  int depth_ = 0;  // bracket nesting inside a value: newlines are insignificant there

  const Token& peek() {
    if (depth_ > 0)
      while (t_[k_].kind == Tok::newline) ++k_;
    return t_[k_];
  }
  Token next() {
    Token tok = peek();
    if (tok.kind != Tok::end) ++k_;
    return tok;
  }
  bool at(const char* p) { return peek().kind == Tok::punct && peek().text == p; }
  bool accept(const char* p) {
    if (!at(p)) return false;
    next();
    return true;
  }
  void expect(const char* p) {
    if (!accept(p)) throw DslError(peek().pos, std::string("expected '") + p + "', found " + describe(peek()));
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::newline: return "end of line";
      default: return "'" + t.text + "'";
    }
  }
  void skip_newlines() {
    while (t_[k_].kind == Tok::newline) ++k_;
  }
  bool at_line_end() {
    const Token& t = peek();
    return t.kind == Tok::newline || t.kind == Tok::end || (t.kind == Tok::punct && t.text == "}");
  }

  Statement statement() {
    Statement s;
    s.header = line(true);
    if (s.header.head.empty() || !s.header.head.front().is_name())
      throw DslError(s.header.pos, "statement must start with a keyword");
    if (!s.header.value && at("{")) {
      next();
      std::vector<Line> body;
      for (;;) {
        skip_newlines();
        if (accept("}")) break;
        if (peek().kind == Tok::end) throw DslError(peek().pos, "unterminated block");
        body.push_back(line(false));
        if (!at_line_end()) throw DslError(peek().pos, "expected end of line, found " + describe(peek()));
      }
      s.body = std::move(body);
    }
    if (!at_line_end() || at("}")) throw DslError(peek().pos, "expected end of statement, found " + describe(peek()));
    return s;
  }

  Line line(bool top) {
    Line l;
    l.pos = peek().pos;
    while (!at_line_end() && !at("=") && !(top && at("{"))) {
      const Token& t = peek();
      if (t.kind == Tok::ident || t.kind == Tok::integer) {
        l.head.push_back(Value::make_name(next().text, t.pos));
      } else if (at("(")) {
        l.head.push_back(tuple());
      } else {
        throw DslError(t.pos, "unexpected " + describe(t));
      }
    }
    if (l.head.empty()) throw DslError(l.pos, "empty line");
    if (accept("=")) l.value = value();
    return l;
  }

  Value tuple() {
    Value v;
    v.kind = Value::Kind::tuple;
    v.pos = peek().pos;
    expect("(");
    ++depth_;
    if (!at(")"))
      do {
        const Token& t = peek();
        if (t.kind != Tok::ident) throw DslError(t.pos, "expected a name, found " + describe(t));
        v.items.push_back(Value::make_name(next().text, t.pos));
      } while (accept(","));
    --depth_;
    expect(")");
    return v;
  }

  Value value() {
    Pos p = peek().pos;
    if (at("{")) {
      Value v;
      v.kind = Value::Kind::graded;
      v.pos = p;
      v.terms = graded();
      if (accept("|")) {
        if (!at("{")) throw DslError(peek().pos, "expected the A*-part literal after '|'");
        v.kind = Value::Kind::section;
        v.terms2 = graded();
      }
      return v;
    }
    if (at("[")) {
      Value v;
      v.kind = Value::Kind::list;
      v.pos = p;
      next();
      ++depth_;
      if (!at("]"))
        do v.items.push_back(value());
        while (accept(","));
      --depth_;
      expect("]");
      return v;
    }
    // A bare name is a name; anything else (including "1*x", which prints as "x") is an expression.
    if (peek().kind == Tok::ident && peek().text != "exp") {
      std::size_t save = k_;
      Token t = next();
      if (at_value_end()) return Value::make_name(t.text, t.pos);
      k_ = save;
    }
    Value v;
    v.kind = Value::Kind::expr;
    v.pos = p;
    v.poly = expr();
    if (auto n = single_variable(v.poly)) return Value::make_name(*n, p);
    return v;
  }

  bool at_value_end() {
    return at_line_end() || at(",") || at("]") || at(")") || at("|");
  }

  static std::optional<std::string> single_variable(const Poly& p) {
    auto vars = p.variables();
    if (p.size() != 1 || vars.size() != 1 || p.has_u() || !(p == Poly::var(vars.front()))) return std::nullopt;
    return vars.front();
  }

  GradedTerms graded() {
    GradedTerms terms;
    expect("{");
    ++depth_;
    if (!at("}"))
      do {
        if (at("}")) break;  // trailing comma
        std::vector<int> key;
        Pos kp = peek().pos;
        expect("(");
        if (!at(")"))
          do {
            const Token& t = peek();
            if (t.kind != Tok::integer) throw DslError(t.pos, "basis index must be a positive integer");
            key.push_back(std::stoi(next().text));
            if (key.back() < 1) throw DslError(kp, "basis indices are 1-based");
          } while (accept(","));
        expect(")");
        expect(":");
        terms.emplace_back(std::move(key), expr());
      } while (accept(","));
    --depth_;
    expect("}");
    return terms;
  }

  // expr := term (('+'|'-') term)*
  // Newlines end an expression unless it sits inside brackets.
  Poly expr() {
    Poly r = term();
    for (;;) {
      if (accept("+")) r += term();
      else if (accept("-")) r -= term();
      else break;
    }
    return r;
  }
  Poly term() {
    Poly r = unary();
    for (;;) {
      if (accept("*")) {
        r *= unary();
      } else if (at("/")) {
        Pos p = next().pos;
        Poly d = unary();
        if (!d.is_constant() || d.is_zero()) throw DslError(p, "division only by nonzero constants");
        r = r.scaled(Rat(1) / d.constant_value());
      } else {
        break;
      }
    }
    return r;
  }
  Poly unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }
  Poly power() {
    Poly base = atom();
    if (accept("^")) {
      const Token& t = peek();
      if (t.kind != Tok::integer) throw DslError(t.pos, "exponent must be a nonnegative integer");
      unsigned e = static_cast<unsigned>(std::stoul(next().text));
      base = pow(base, e);
    }
    return base;
  }
  Poly atom() {
    const Token& t = peek();
    if (t.kind == Tok::integer) return Poly(Rat(next().text));
    if (accept("(")) {
      ++depth_;
      Poly r = expr();
      --depth_;
      expect(")");
      return r;
    }
    if (t.kind == Tok::ident) {
      Token id = next();
      if (id.text == "exp") {
        expect("(");
        bool neg = accept("-");
        if (!(peek().kind == Tok::ident && peek().text == "t")) throw DslError(peek().pos, "exp takes t or -t");
        next();
        expect(")");
        return Poly::exp_t(neg ? -1 : 1);
      }
      if (id.text == "u") throw DslError(id.pos, "'u' is reserved for exp(t)");
      if (id.text.find('.') != std::string::npos || id.text.find('\'') != std::string::npos)
        throw DslError(id.pos, "'" + id.text + "' is not a valid variable");
      return Poly::var(id.text);
    }
    throw DslError(t.pos, "expected an expression, found " + describe(t));
  }
};

}  // namespace detail

inline Document parse_syntax(const std::string& text) { return detail::Parser(detail::lex(text)).document(); }

// ---------------------------------------------------------------------------
// Printer: canonical text that reparses to an equal document.

inline std::string print_terms(const GradedTerms& terms) {
  if (terms.empty()) return "{}";
  std::string s = "{ ";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += ", ";
    s += "(";
    for (std::size_t j = 0; j < terms[i].first.size(); ++j) s += (j ? "," : "") + std::to_string(terms[i].first[j]);
    s += "): " + terms[i].second.str();
  }
  return s + " }";
}

inline std::string print_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::name: return v.name;
    case Value::Kind::expr: return v.poly.str();
    case Value::Kind::graded: return print_terms(v.terms);
    case Value::Kind::section: return print_terms(v.terms) + " | " + print_terms(v.terms2);
    case Value::Kind::list:
    case Value::Kind::tuple: {
      bool tuple = v.kind == Value::Kind::tuple;
      std::string s = tuple ? "(" : "[";
      for (std::size_t i = 0; i < v.items.size(); ++i) s += (i ? ", " : "") + print_value(v.items[i]);
      return s + (tuple ? ")" : "]");
    }
  }
  return {};
}

inline std::string print_line(const Line& l) {
  std::string s;
  for (std::size_t i = 0; i < l.head.size(); ++i) s += (i ? " " : "") + print_value(l.head[i]);
  if (l.value) s += " = " + print_value(*l.value);
  return s;
}

inline std::string print(const Document& doc) {
  std::string out;
  for (const auto& st : doc.statements) {
    out += print_line(st.header);
    if (st.body) {
      out += " {\n";
      for (const auto& l : *st.body) out += "  " + print_line(l) + "\n";
      out += "}";
    }
    out += "\n";
  }
  return out;
}

}  // namespace jqn::dsl
