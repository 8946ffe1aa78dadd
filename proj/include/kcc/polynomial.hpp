#pragma once

// Sparse multivariate polynomials with exact rational coefficients over a
// fixed, ordered list of variables. Terms are kept sorted in descending
// graded-lexicographic order of their exponent vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcc/expr.hpp"

namespace kcc {

using Monomial = std::vector<std::uint16_t>;

/// true if a precedes b in descending graded-lex order.
inline bool grlex_greater(const Monomial& a, const Monomial& b) {
  unsigned da = 0;
  unsigned db = 0;
  for (auto e : a) da += e;
  for (auto e : b) db += e;
  if (da != db) return da > db;
  return a > b;
}

struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_greater(a, b); }
};

struct Term {
  Monomial mono;
  Rational coeff;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    if (sgn(c) != 0) p.terms_.push_back({Monomial(nvars, 0), c});
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t index) {
    Polynomial p(nvars);
    Monomial m(nvars, 0);
    m.at(index) = 1;
    p.terms_.push_back({std::move(m), Rational(1)});
    return p;
  }

  /// Builds from unsorted terms, merging duplicates and dropping zeros.
  static Polynomial from_terms(std::size_t nvars, std::vector<Term> terms) {
    std::map<Monomial, Rational, GrlexGreater> acc;
    for (auto& t : terms) acc[t.mono] += t.coeff;
    return from_map(nvars, std::move(acc));
  }

  std::size_t nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.front().mono) == 0);
  }

  Rational constant_value() const { return terms_.empty() ? Rational(0) : terms_.front().coeff; }

  const Term& leading() const { return terms_.front(); }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, degree_of(t.mono));
    return d;
  }

  bool operator==(const Polynomial& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].mono != o.terms_[i].mono || terms_[i].coeff != o.terms_[i].coeff) return false;
    return true;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  Polynomial operator+(const Polynomial& o) const { return merge(o, false); }
  Polynomial operator-(const Polynomial& o) const { return merge(o, true); }

  Polynomial operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial(nvars_);
    if (o.is_constant()) return scaled(o.constant_value());
    if (is_constant()) return o.scaled(constant_value());
    std::map<Monomial, Rational, GrlexGreater> acc;
    Monomial m(nvars_);
    for (const auto& a : terms_) {
      for (const auto& b : o.terms_) {
        for (std::size_t k = 0; k < nvars_; ++k) m[k] = static_cast<std::uint16_t>(a.mono[k] + b.mono[k]);
        auto [it, inserted] = acc.try_emplace(m, a.coeff * b.coeff);
        if (!inserted) it->second += a.coeff * b.coeff;
      }
    }
    return from_map(nvars_, std::move(acc));
  }

  Polynomial scaled(const Rational& c) const {
    if (sgn(c) == 0) return Polynomial(nvars_);
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
  }

  Polynomial pow(unsigned k) const {
    Polynomial result = constant(nvars_, 1);
    Polynomial base = *this;
    while (k) {
      if (k & 1U) result = result * base;
      k >>= 1U;
      if (k) base = base * base;
    }
    return result;
  }

  /// Exact quotient this / d, or nullopt when d does not divide this.
  std::optional<Polynomial> divide_exact(const Polynomial& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    if (d.is_constant()) return scaled(1 / d.constant_value());
    const Term& lt = d.leading();
    std::vector<Term> quotient;
    Polynomial rem = *this;
    while (!rem.is_zero()) {
      const Term& r = rem.leading();
      Monomial q(nvars_);
      for (std::size_t k = 0; k < nvars_; ++k) {
        if (r.mono[k] < lt.mono[k]) return std::nullopt;
        q[k] = static_cast<std::uint16_t>(r.mono[k] - lt.mono[k]);
      }
      Rational c = r.coeff / lt.coeff;
      Polynomial t(nvars_);
      t.terms_.push_back({q, c});
      quotient.push_back({std::move(q), c});
      rem = rem - t * d;
    }
    return from_terms(nvars_, std::move(quotient));
  }

  Polynomial derivative(std::size_t var) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      if (t.mono[var] == 0) continue;
      Term d = t;
      d.coeff *= t.mono[var];
      d.mono[var] -= 1;
      out.push_back(std::move(d));
    }
    return from_terms(nvars_, std::move(out));
  }

  /// Gcd of the monomials of all terms (zero vector for the zero polynomial).
  Monomial monomial_content() const {
    if (terms_.empty()) return Monomial(nvars_, 0);
    Monomial g = terms_.front().mono;
    for (const auto& t : terms_)
      for (std::size_t k = 0; k < nvars_; ++k) g[k] = std::min(g[k], t.mono[k]);
    return g;
  }

  /// Positive rational c such that this / c has coprime integer coefficients.
  Rational content() const {
    if (terms_.empty()) return 1;
    mpz_class g = 0;
    mpz_class l = 1;
    for (const auto& t : terms_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
    }
    Rational c(g, l);
    c.canonicalize();
    return c;
  }

  /// Integer-coefficient, content-free, positive leading coefficient.
  Polynomial primitive() const {
    if (terms_.empty()) return *this;
    Rational c = content();
    if (sgn(leading().coeff) < 0) c = -c;
    return scaled(1 / c);
  }

  Polynomial divide_monomial(const Monomial& m) const {
    Polynomial r = *this;
    for (auto& t : r.terms_)
      for (std::size_t k = 0; k < nvars_; ++k) t.mono[k] = static_cast<std::uint16_t>(t.mono[k] - m[k]);
    return r;
  }

  double eval(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double v = t.coeff.get_d();
      for (std::size_t k = 0; k < nvars_; ++k)
        if (t.mono[k]) v *= std::pow(x[k], static_cast<int>(t.mono[k]));
      s += v;
    }
    return s;
  }

  Rational eval_exact(std::span<const Rational> x) const {
    Rational s = 0;
    for (const auto& t : terms_) {
      Rational v = t.coeff;
      for (std::size_t k = 0; k < nvars_; ++k)
        if (t.mono[k]) v *= detail::rational_pow(x[k], t.mono[k]);
      s += v;
    }
    return s;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      Rational c = t.coeff;
      bool negative = sgn(c) < 0;
      if (negative) c = -c;
      if (first)
        os << (negative ? "-" : "");
      else
        os << (negative ? " - " : " + ");
      first = false;
      bool unit_mono = degree_of(t.mono) == 0;
      bool wrote = false;
      if (c != 1 || unit_mono) {
        os << c.get_str();
        wrote = true;
      }
      for (std::size_t k = 0; k < nvars_; ++k) {
        if (!t.mono[k]) continue;
        if (wrote) os << '*';
        os << names.at(k);
        if (t.mono[k] > 1) os << '^' << t.mono[k];
        wrote = true;
      }
    }
    return os.str();
  }

  Expr to_expr(const std::vector<std::string>& names) const {
    std::vector<Expr> terms;
    terms.reserve(terms_.size());
    for (const auto& t : terms_) {
      std::vector<Expr> f{kcc::constant(t.coeff)};
      for (std::size_t k = 0; k < nvars_; ++k)
        if (t.mono[k]) f.push_back(kcc::pow(symbol(names.at(k)), t.mono[k]));
      terms.push_back(mul(f));
    }
    return add(terms);
  }

 private:
  static unsigned degree_of(const Monomial& m) {
    unsigned d = 0;
    for (auto e : m) d += e;
    return d;
  }

  static Polynomial from_map(std::size_t nvars, std::map<Monomial, Rational, GrlexGreater> acc) {
    Polynomial p(nvars);
    p.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (sgn(c) != 0) p.terms_.push_back({m, c});
    return p;
  }

  Polynomial merge(const Polynomial& o, bool subtract) const {
    Polynomial r(nvars_);
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() || (i < terms_.size() && grlex_greater(terms_[i].mono, o.terms_[j].mono))) {
        r.terms_.push_back(terms_[i++]);
      } else if (i == terms_.size() || grlex_greater(o.terms_[j].mono, terms_[i].mono)) {
        Term t = o.terms_[j++];
        if (subtract) t.coeff = -t.coeff;
        r.terms_.push_back(std::move(t));
      } else {
        Rational c = terms_[i].coeff;
        if (subtract)
          c -= o.terms_[j].coeff;
        else
          c += o.terms_[j].coeff;
        if (sgn(c) != 0) r.terms_.push_back({terms_[i].mono, c});
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace kcc
