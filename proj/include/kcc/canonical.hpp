#pragma once

// Canonical rational-function form of an expression: a numerator polynomial
// over a denominator kept as a product of distinct primitive factors.
// Denominator factors that divide the numerator exactly are cancelled; no
// multivariate gcd is computed, so two equal functions may still have
// different canonical forms. Equality is decided by cross-multiplication.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kcc/expr.hpp"
#include "kcc/polynomial.hpp"

namespace kcc {

class CanonicalizeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct DenFactor {
  Polynomial poly;  // primitive, positive leading coefficient, non-constant
  unsigned power;
};

class RationalFunction {
 public:
  RationalFunction() = default;
  explicit RationalFunction(Polynomial num) : num_(std::move(num)) {}

  static RationalFunction constant(std::size_t nvars, const Rational& c) {
    return RationalFunction(Polynomial::constant(nvars, c));
  }

  std::size_t nvars() const { return num_.nvars(); }
  const Polynomial& numerator() const { return num_; }
  const std::vector<DenFactor>& factors() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }

  Polynomial denominator() const {
    Polynomial d = Polynomial::constant(nvars(), 1);
    for (const auto& f : den_) d = d * f.poly.pow(f.power);
    return d;
  }

  RationalFunction operator+(const RationalFunction& o) const { return combine(o, false); }
  RationalFunction operator-(const RationalFunction& o) const { return combine(o, true); }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  RationalFunction operator*(const RationalFunction& o) const {
    RationalFunction r(num_ * o.num_);
    if (r.num_.is_zero()) return r;
    r.den_ = den_;
    for (const auto& f : o.den_) r.add_factor(f.poly, f.power);
    r.reduce();
    return r;
  }

  RationalFunction inverse() const {
    if (num_.is_zero()) throw CanonicalizeError("division by the zero polynomial");
    RationalFunction r(denominator());
    Rational c = num_.content();
    if (sgn(num_.leading().coeff) < 0) c = -c;
    Monomial m = num_.monomial_content();
    Polynomial rest = num_.divide_monomial(m).scaled(1 / c);
    r.num_ = r.num_.scaled(1 / c);
    for (std::size_t k = 0; k < m.size(); ++k)
      if (m[k]) r.add_factor(Polynomial::variable(nvars(), k), m[k]);
    if (!rest.is_constant()) r.add_factor(rest, 1);
    r.reduce();
    return r;
  }

  RationalFunction operator/(const RationalFunction& o) const { return *this * o.inverse(); }

  RationalFunction pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    RationalFunction r(num_.pow(static_cast<unsigned>(k)));
    if (k == 0) return r;
    for (const auto& f : den_) r.den_.push_back({f.poly, f.power * static_cast<unsigned>(k)});
    return r;
  }

  RationalFunction scaled(const Rational& c) const {
    RationalFunction r = *this;
    r.num_ = r.num_.scaled(c);
    if (r.num_.is_zero()) r.den_.clear();
    return r;
  }

 private:
  void add_factor(const Polynomial& p, unsigned power) {
    for (auto& f : den_) {
      if (f.poly == p) {
        f.power += power;
        return;
      }
    }
    den_.push_back({p, power});
  }

  // Cancels denominator factors that divide the numerator exactly.
  void reduce() {
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    for (auto& f : den_) {
      while (f.power > 0) {
        auto q = num_.divide_exact(f.poly);
        if (!q) break;
        num_ = std::move(*q);
        --f.power;
      }
    }
    std::erase_if(den_, [](const DenFactor& f) { return f.power == 0; });
  }

  RationalFunction combine(const RationalFunction& o, bool subtract) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return subtract ? -o : o;
    // Least common multiple of the factored denominators.
    std::vector<DenFactor> lcm = den_;
    for (const auto& f : o.den_) {
      auto it = std::find_if(lcm.begin(), lcm.end(), [&](const DenFactor& g) { return g.poly == f.poly; });
      if (it == lcm.end())
        lcm.push_back(f);
      else
        it->power = std::max(it->power, f.power);
    }
    auto lift = [&](const RationalFunction& x) {
      Polynomial n = x.num_;
      for (const auto& g : lcm) {
        unsigned have = 0;
        for (const auto& f : x.den_)
          if (f.poly == g.poly) have = f.power;
        if (g.power > have) n = n * g.poly.pow(g.power - have);
      }
      return n;
    };
    RationalFunction r(subtract ? lift(*this) - lift(o) : lift(*this) + lift(o));
    r.den_ = std::move(lcm);
    r.reduce();
    return r;
  }

  Polynomial num_;
  std::vector<DenFactor> den_;
};

/// Canonical form: numerator and expanded denominator over a variable order.
/// The denominator is an integer polynomial with unit content and positive
/// leading coefficient; constants live in the numerator.
struct CanonicalRational {
  std::vector<std::string> vars;
  Polynomial num;
  Polynomial den;
  std::vector<DenFactor> den_factors;

  bool is_zero() const { return num.is_zero(); }

  std::string numerator_string() const { return num.to_string(vars); }
  std::string denominator_string() const { return den.to_string(vars); }

  /// "num" or "(num)/(factored denominator)".
  std::string to_string() const {
    if (den_factors.empty()) return num.to_string(vars);
    std::string n = num.to_string(vars);
    if (num.size() > 1) n = "(" + n + ")";
    std::string d;
    for (const auto& f : den_factors) {
      if (!d.empty()) d += "*";
      std::string fs = f.poly.to_string(vars);
      if (f.poly.size() > 1) fs = "(" + fs + ")";
      d += fs;
      if (f.power > 1) d += "^" + std::to_string(f.power);
    }
    if (den_factors.size() > 1) d = "(" + d + ")";
    return n + "/" + d;
  }

  Expr to_expr() const {
    Expr n = num.to_expr(vars);
    if (den_factors.empty()) return n;
    std::vector<Expr> f;
    for (const auto& d : den_factors) f.push_back(kcc::pow(d.poly.to_expr(vars), d.power));
    return div(n, mul(f));
  }

  double eval(std::span<const double> x) const { return num.eval(x) / den.eval(x); }
};

namespace detail {

class Canonicalizer {
 public:
  explicit Canonicalizer(const std::vector<std::string>& vars) : vars_(vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) index_.emplace(vars[i], i);
  }

  RationalFunction operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    RationalFunction r = compute(e);
    memo_.emplace(e.id(), r);
    keep_.push_back(e);
    return r;
  }

 private:
  RationalFunction compute(const Expr& e) {
    const std::size_t n = vars_.size();
    switch (e.kind()) {
      case Kind::Constant:
        return RationalFunction::constant(n, e.value());
      case Kind::Symbol: {
        auto it = index_.find(e.name());
        if (it == index_.end()) throw CanonicalizeError("symbol '" + e.name() + "' is not in the variable order");
        return RationalFunction(Polynomial::variable(n, it->second));
      }
      case Kind::Add: {
        RationalFunction acc = RationalFunction::constant(n, 0);
        for (const auto& a : e.args()) acc = acc + (*this)(a);
        return acc;
      }
      case Kind::Mul: {
        RationalFunction acc = RationalFunction::constant(n, 1);
        for (const auto& a : e.args()) {
          acc = acc * (*this)(a);
          if (acc.is_zero()) break;
        }
        return acc;
      }
      case Kind::Pow: {
        RationalFunction b = (*this)(e.args().front());
        if (b.is_zero() && e.exponent() < 0)
          throw CanonicalizeError("division by the zero polynomial in " + kcc::to_string(e));
        return b.pow(e.exponent());
      }
      case Kind::Div: {
        RationalFunction d = (*this)(e.args()[1]);
        if (d.is_zero()) throw CanonicalizeError("division by the zero polynomial in " + kcc::to_string(e));
        return (*this)(e.args()[0]) / d;
      }
    }
    return RationalFunction::constant(n, 0);
  }

  const std::vector<std::string>& vars_;
  std::map<std::string, std::size_t> index_;
  std::unordered_map<const Node*, RationalFunction> memo_;
  std::vector<Expr> keep_;
};

inline std::vector<std::string> sorted_symbols(const Expr& e) {
  auto s = free_symbols(e);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

inline RationalFunction to_rational_function(const Expr& e, const std::vector<std::string>& vars) {
  return detail::Canonicalizer(vars)(e);
}

inline CanonicalRational make_canonical(const RationalFunction& rf, std::vector<std::string> vars) {
  CanonicalRational c;
  c.vars = std::move(vars);
  c.num = rf.numerator();
  c.den = rf.denominator();
  c.den_factors = rf.factors();
  return c;
}

/// Canonical form under an explicit variable order. Every free symbol of e
/// must appear in vars.
inline CanonicalRational canonicalize(const Expr& e, const std::vector<std::string>& vars) {
  return make_canonical(to_rational_function(e, vars), vars);
}

/// Canonical form with variables in lexicographic order of their names.
inline CanonicalRational canonicalize(const Expr& e) { return canonicalize(e, detail::sorted_symbols(e)); }

/// Cross-multiplication test num1*den2 - num2*den1 == 0. Both forms must
/// share a variable order.
inline bool equivalent(const CanonicalRational& a, const CanonicalRational& b) {
  if (a.vars != b.vars) throw std::invalid_argument("canonical forms over different variable orders");
  return (a.num * b.den - b.num * a.den).is_zero();
}

inline std::vector<std::string> merged_order(const Expr& a, const Expr& b) {
  auto s = free_symbols(a);
  for (auto& x : free_symbols(b)) s.push_back(std::move(x));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// Semantic equality of two expressions as rational functions.
inline bool semantically_equal(const Expr& a, const Expr& b) {
  auto vars = merged_order(a, b);
  return equivalent(canonicalize(a, vars), canonicalize(b, vars));
}

/// True when e is identically zero as a rational function.
inline bool is_identically_zero(const Expr& e) { return canonicalize(e).is_zero(); }

}  // namespace kcc
