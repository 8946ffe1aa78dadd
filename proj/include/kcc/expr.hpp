#pragma once

// Immutable symbolic expression trees over symbols and exact rational
// constants. Nodes are shared, so derived expressions form DAGs; every
// traversal in this library memoizes on node identity.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kcc {

using Rational = mpq_class;

enum class Kind : std::uint8_t { Constant, Symbol, Add, Mul, Pow, Div };

class Expr;

struct Node {
  Kind kind;
  Rational value;          // Constant
  std::string name;        // Symbol
  std::vector<Expr> args;  // Add, Mul: operands; Pow: {base}; Div: {num, den}
  long exponent = 0;       // Pow
};

class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  const Node* id() const { return node_.get(); }

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_zero() const { return is_constant() && sgn(node_->value) == 0; }
  bool is_one() const { return is_constant() && node_->value == 1; }

  const Rational& value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  const std::vector<Expr>& args() const { return node_->args; }
  long exponent() const { return node_->exponent; }

 private:
  std::shared_ptr<const Node> node_;
};

namespace detail {

inline Expr make_node(Kind kind, std::vector<Expr> args, long exponent = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->exponent = exponent;
  return Expr(std::move(n));
}

inline const Expr& zero_expr() {
  static const Expr z = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = 0;
    return Expr(std::move(n));
  }();
  return z;
}

inline Rational rational_pow(const Rational& base, long k) {
  Rational result = 1;
  Rational b = base;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  while (e) {
    if (e & 1UL) result *= b;
    b *= b;
    e >>= 1U;
  }
  if (k < 0) result = 1 / result;
  result.canonicalize();
  return result;
}

}  // namespace detail

inline Expr::Expr() : node_(detail::zero_expr().node_) {}

inline Expr constant(const Rational& v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  n->value.canonicalize();
  return Expr(std::move(n));
}

inline Expr constant(long v) { return constant(Rational(v)); }

inline Expr symbol(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Symbol;
  n->name = std::move(name);
  return Expr(std::move(n));
}

/// Sum with eager flattening, constant folding and removal of zeros.
inline Expr add(const std::vector<Expr>& terms) {
  std::vector<Expr> out;
  Rational c = 0;
  for (const auto& t : terms) {
    if (t.kind() == Kind::Add) {
      for (const auto& s : t.args()) {
        if (s.is_constant())
          c += s.value();
        else
          out.push_back(s);
      }
    } else if (t.is_constant()) {
      c += t.value();
    } else {
      out.push_back(t);
    }
  }
  if (sgn(c) != 0) out.insert(out.begin(), constant(c));
  if (out.empty()) return constant(0);
  if (out.size() == 1) return out.front();
  return detail::make_node(Kind::Add, std::move(out));
}

/// Product with eager flattening and constant folding; a zero factor
/// annihilates the product. The folded constant, if any, leads.
inline Expr mul(const std::vector<Expr>& factors) {
  std::vector<Expr> out;
  Rational c = 1;
  auto absorb = [&](const Expr& f) {
    if (f.is_constant())
      c *= f.value();
    else
      out.push_back(f);
  };
  for (const auto& f : factors) {
    if (f.kind() == Kind::Mul) {
      for (const auto& s : f.args()) absorb(s);
    } else {
      absorb(f);
    }
  }
  if (sgn(c) == 0) return constant(0);
  if (c != 1) out.insert(out.begin(), constant(c));
  if (out.empty()) return constant(1);
  if (out.size() == 1) return out.front();
  return detail::make_node(Kind::Mul, std::move(out));
}

inline Expr pow(const Expr& base, long k) {
  if (k == 0) return constant(1);
  if (k == 1) return base;
  if (base.is_constant() && !(sgn(base.value()) == 0 && k < 0))
    return constant(detail::rational_pow(base.value(), k));
  if (base.kind() == Kind::Pow) return pow(base.args().front(), base.exponent() * k);
  return detail::make_node(Kind::Pow, {base}, k);
}

inline Expr neg(const Expr& e) { return mul({constant(-1), e}); }

/// Quotient. A literal zero denominator is kept as a node so that
/// canonicalize and evaluate can report it.
inline Expr div(const Expr& num, const Expr& den) {
  if (den.is_constant() && sgn(den.value()) != 0) {
    Rational inv = 1 / den.value();
    return mul({constant(inv), num});
  }
  if (num.is_zero() && !den.is_constant()) return constant(0);
  return detail::make_node(Kind::Div, {num, den});
}

inline Expr sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }

/// Structural identity (same tree shape and leaves). This is not semantic
/// equality; see semantically_equal in canonical.hpp.
inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Constant:
      return a.value() == b.value();
    case Kind::Symbol:
      return a.name() == b.name();
    case Kind::Pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!structurally_equal(a.args()[i], b.args()[i])) return false;
  return true;
}

/// Free symbols in order of first appearance (depth-first, left to right).
inline std::vector<std::string> free_symbols(const Expr& e) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::unordered_map<const Node*, bool> visited;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!visited.emplace(x.id(), true).second) return;
    if (x.is_symbol()) {
      if (seen.insert(x.name()).second) order.push_back(x.name());
      return;
    }
    for (const auto& a : x.args()) walk(a);
  };
  walk(e);
  return order;
}

/// Number of distinct nodes in the DAG.
inline std::size_t dag_size(const Expr& e) {
  std::unordered_map<const Node*, bool> visited;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!visited.emplace(x.id(), true).second) return;
    for (const auto& a : x.args()) walk(a);
  };
  walk(e);
  return visited.size();
}

// ---------------------------------------------------------------------------
// Printing. The output re-parses under the grammar in parse.hpp.

namespace detail {

inline bool is_negative_term(const Expr& e) {
  if (e.is_constant()) return sgn(e.value()) < 0;
  if (e.kind() == Kind::Mul) return e.args().front().is_constant() && sgn(e.args().front().value()) < 0;
  return false;
}

inline std::string rational_string(const Rational& r) { return r.get_str(); }

// Precedence levels: 1 sum, 2 product/quotient, 3 unary minus, 4 power, 5 atom.
inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      if (sgn(e.value()) < 0) return 3;
      return e.value().get_den() == 1 ? 5 : 2;
    case Kind::Symbol:
      return 5;
    case Kind::Add:
      return 1;
    case Kind::Mul:
      return is_negative_term(e) ? 3 : 2;
    case Kind::Div:
      return 2;
    case Kind::Pow:
      return 4;
  }
  return 5;
}

void print(std::ostream& os, const Expr& e);

inline void print_wrapped(std::ostream& os, const Expr& e, bool wrap) {
  if (wrap) os << '(';
  print(os, e);
  if (wrap) os << ')';
}

inline void print(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      os << rational_string(e.value());
      return;
    case Kind::Symbol:
      os << e.name();
      return;
    case Kind::Add: {
      bool first = true;
      for (const auto& t : e.args()) {
        if (first) {
          print(os, t);
          first = false;
        } else if (is_negative_term(t)) {
          os << " - ";
          Expr pos = neg(t);
          print_wrapped(os, pos, precedence(pos) < 2);
        } else {
          os << " + ";
          print(os, t);
        }
      }
      return;
    }
    case Kind::Mul: {
      const auto& f = e.args();
      std::size_t start = 0;
      if (f.front().is_constant()) {
        const Rational& c = f.front().value();
        if (c == -1) {
          os << '-';
          start = 1;
        } else if (sgn(c) < 0) {
          os << '-';
          os << rational_string(Rational(-c));
          if (f.size() > 1) os << '*';
          start = 1;
        }
      }
      for (std::size_t i = start; i < f.size(); ++i) {
        if (i > start) os << '*';
        const Expr& x = f[i];
        // '*' and '/' are left-associative, so quotients and rational
        // literals may appear unbracketed inside a product.
        print_wrapped(os, x, precedence(x) < 2 || precedence(x) == 3);
      }
      return;
    }
    case Kind::Pow: {
      const Expr& b = e.args().front();
      print_wrapped(os, b, precedence(b) < 5);
      os << '^' << e.exponent();
      return;
    }
    case Kind::Div: {
      const Expr& n = e.args()[0];
      const Expr& d = e.args()[1];
      print_wrapped(os, n, precedence(n) < 2 || n.kind() == Kind::Div);
      os << '/';
      print_wrapped(os, d, precedence(d) < 4);
      return;
    }
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::ostringstream os;
  detail::print(os, e);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Expr& e) {
  detail::print(os, e);
  return os;
}

}  // namespace kcc
