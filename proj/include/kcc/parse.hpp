#pragma once

// Recursive-descent parser for the expression grammar
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' ['-'] integer)? | '-' factor
//   atom   := identifier | number | '(' expr ')'
//
// Numbers are decimal integers or decimals, converted exactly (0.25 -> 1/4).

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kcc/expr.hpp"

namespace kcc {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::string message, std::set<std::string> expected)
      : std::runtime_error(format(line, column, message, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  static std::string format(int line, int column, const std::string& message,
                            const std::set<std::string>& expected) {
    std::string s = "syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    if (!expected.empty()) {
      s += " (expected one of:";
      for (const auto& e : expected) s += " " + e;
      s += ")";
    }
    return s;
  }

  int line_;
  int column_;
  std::set<std::string> expected_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    skip_ws();
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, msg, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    std::vector<Expr> terms{lhs};
    for (;;) {
      if (peek('+')) {
        ++pos_;
        terms.push_back(parse_term());
      } else if (peek('-')) {
        ++pos_;
        terms.push_back(neg(parse_term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : add(terms);
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        acc = mul({acc, parse_factor()});
      } else if (peek('/')) {
        ++pos_;
        acc = div(acc, parse_factor());
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_factor() {
    if (peek('-')) {
      ++pos_;
      return neg(parse_factor());
    }
    Expr base = parse_atom();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      bool negative = false;
      if (pos_ < src_.size() && src_[pos_] == '-') {
        negative = true;
        ++pos_;
        skip_ws();
      }
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                   src_[pos_] == '('))
          fail("non-integer exponent", {"integer"});
        fail("missing exponent", {"integer"});
      }
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') fail("non-integer exponent", {"integer"});
      std::string digits(src_.substr(start, pos_ - start));
      if (digits.size() > 9) fail("exponent too large", {"integer"});
      long k = std::stol(digits);
      return pow(base, negative ? -k : k);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input", {"identifier", "number", "(", "-"});
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!peek(')')) fail("unbalanced parenthesis", {")"});
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return symbol(std::string(src_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'", {"identifier", "number", "(", "-"});
  }

  Expr parse_number() {
    std::size_t start = pos_;
    std::string intpart;
    std::string frac;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) intpart += src_[pos_++];
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) frac += src_[pos_++];
    }
    if (intpart.empty() && frac.empty()) {
      pos_ = start;
      fail("malformed number", {"digit"});
    }
    mpz_class num((intpart.empty() ? std::string("0") : intpart) + frac, 10);
    mpz_class den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational r(num, den);
    r.canonicalize();
    return constant(r);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view source) { return detail::Parser(source).parse_all(); }

/// Parses an exact rational literal such as "2017/256", "-3", "0.25".
inline Rational parse_rational(std::string_view text) {
  Expr e = parse(text);
  if (!e.is_constant()) throw ParseError(1, 1, "not a rational constant: " + std::string(text), {"number"});
  return e.value();
}

}  // namespace kcc
