#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "gl2ode/expr.hpp"

namespace gl2ode {

struct ParseError : std::runtime_error {
  int line, column;
  std::string expected;
  ParseError(int l, int c, const std::string &exp, const std::string &got)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                           ": expected " + exp + ", got " + got),
        line(l),
        column(c),
        expected(exp) {}
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One ODE y^(n) = F(x, y, y1, ..., y_{n-1}), plus optional auxiliary
/// definitions (used for radicals such as w = (...)^(1/2)).
struct ODESpec {
  int order = 5;
  Expr F;
  std::string name;
  std::vector<std::pair<std::string, Expr>> lets;  // in declaration order

  /// F with every auxiliary symbol substituted away.
  Expr resolved() const {
    Expr f = F;
    for (auto it = lets.rbegin(); it != lets.rend(); ++it)
      f = substitute(f, {{sym_id(it->first), it->second}});
    return f;
  }
};

namespace detail {

class Parser {
 public:
  Parser(const std::string &text, std::set<std::string> allowed = {})
      : s_(text), allowed_(std::move(allowed)) {}

  Expr parse_expression() {
    Expr e = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("end of input", describe_here());
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string &expected, const std::string &got) {
    throw ParseError(line_, col_, expected, got);
  }

  std::string describe_here() {
    if (pos_ >= s_.size()) return "end of input";
    return std::string("'") + s_[pos_] + "'";
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) advance();
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      if (eat('+')) {
        e = e + term();
      } else if (eat('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      if (eat('*')) {
        e = e * factor();
      } else if (eat('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    bool neg = eat('-');
    Expr a = atom();
    if (eat('^')) {
      Rational e = exponent();
      a = pow(a, e);
    }
    return neg ? -a : a;
  }

  Rational exponent() {
    if (eat('(')) {
      Rational r = rational_literal();
      if (!eat(')')) fail("')'", describe_here());
      return r;
    }
    return Rational(integer_literal("integer exponent"));
  }

  Rational rational_literal() {
    Int num = integer_literal("rational exponent");
    if (eat('/')) {
      Int den = integer_literal("denominator");
      if (den == 0) fail("nonzero denominator", "0");
      return Rational(num, den);
    }
    return Rational(num);
  }

  Int integer_literal(const std::string &what) {
    skip_ws();
    bool neg = eat('-');
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail(what, describe_here());
    Int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      advance();
    }
    return neg ? Int(-v) : v;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("number, symbol or '('", "end of input");
    char c = s_[pos_];
    if (c == '(') {
      advance();
      Expr e = expr();
      if (!eat(')')) fail("')'", describe_here());
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return constant(Rational(integer_literal("number")));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        name.push_back(s_[pos_]);
        advance();
      }
      if (!allowed_.empty() && !allowed_.count(name))
        throw ValidationError("symbol '" + name + "' is not allowed here (line " +
                              std::to_string(line_) + ")");
      return symbol(name);
    }
    fail("number, symbol or '('", describe_here());
  }

  const std::string &s_;
  std::set<std::string> allowed_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace detail

/// Parses an expression; when `allowed` is nonempty, any other symbol is a
/// ValidationError.
inline Expr parse_expr(const std::string &text, std::set<std::string> allowed = {}) {
  detail::Parser p(text, std::move(allowed));
  return p.parse_expression();
}

/// The jet symbols of an order-n ODE: x, y, y1 .. y_{n-1}.
inline std::set<std::string> jet_symbols(int order) {
  std::set<std::string> s{"x", "y"};
  for (int k = 1; k < order; ++k) s.insert("y" + std::to_string(k));
  return s;
}

/// Parses an ODE file:
///   order = <int>
///   [name = <string>]
///   [let <sym> = <expr>]...
///   F = <expr>
inline ODESpec parse_ode(const std::string &text) {
  ODESpec spec;
  spec.order = -1;
  bool have_f = false;
  std::set<std::string> allowed;
  std::vector<std::string> aux_names;

  std::size_t start = 0;
  int lineno = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? text.size() + 1 : end + 1;
    ++lineno;

    auto strip = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) + ": expected '<key> = <value>'");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));

    if (key == "order") {
      spec.order = std::stoi(val);
      if (spec.order < 3 || spec.order > 9)
        throw ValidationError("order must be between 3 and 9, got " + val);
      allowed = jet_symbols(spec.order);
    } else if (key == "name") {
      spec.name = val;
    } else if (key.rfind("let ", 0) == 0) {
      if (spec.order < 0) throw ValidationError("'order = <n>' must come before 'let'");
      std::string sym = strip(key.substr(4));
      if (sym.empty() || allowed.count(sym))
        throw ValidationError("invalid auxiliary symbol '" + sym + "'");
      // an auxiliary definition may reference jet symbols and earlier lets,
      // never itself or later ones: acyclic by construction
      Expr def = parse_expr(val, allowed);
      spec.lets.emplace_back(sym, def);
      aux_names.push_back(sym);
      allowed.insert(sym);
    } else if (key == "F") {
      if (spec.order < 0) throw ValidationError("'order = <n>' must come before 'F'");
      spec.F = parse_expr(val, allowed);
      have_f = true;
    } else {
      throw ValidationError("line " + std::to_string(lineno) + ": unknown stanza '" + key + "'");
    }
  }
  if (spec.order < 0) throw ValidationError("missing 'order = <n>' stanza");
  if (!have_f) throw ValidationError("missing 'F = <expr>' stanza");
  return spec;
}

/// Builds an ODESpec from an expression string (CLI --expr/--order path).
inline ODESpec make_ode(int order, const std::string &f_text, const std::string &name = "") {
  if (order < 3 || order > 9)
    throw ValidationError("order must be between 3 and 9, got " + std::to_string(order));
  ODESpec spec;
  spec.order = order;
  spec.name = name;
  spec.F = parse_expr(f_text, jet_symbols(order));
  return spec;
}

}  // namespace gl2ode
