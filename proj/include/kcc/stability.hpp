#pragma once

// Fixed points at concrete parameter values, characteristic polynomials and
// Hurwitz determinants of the deviation curvature tensor, Jacobi stability
// verdicts, and the polynomial system whose real solutions are the stable
// fixed points.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kcc/calculus.hpp"
#include "kcc/canonical.hpp"
#include "kcc/evaluate.hpp"
#include "kcc/kcc.hpp"
#include "kcc/model.hpp"

namespace kcc {

using NumMatrix = std::vector<std::vector<double>>;

// ---------------------------------------------------------------------------
// Field operations used by the generic Faddeev-LeVerrier and Hurwitz code.

template <class T>
struct FieldOps;

template <>
struct FieldOps<double> {
  static double zero_like(const double&) { return 0.0; }
  static double one_like(const double&) { return 1.0; }
  static double div_int(const double& x, int k) { return x / k; }
  static bool is_zero(const double& x) { return x == 0.0; }
};

template <>
struct FieldOps<Rational> {
  static Rational zero_like(const Rational&) { return 0; }
  static Rational one_like(const Rational&) { return 1; }
  static Rational div_int(const Rational& x, int k) { return x / k; }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
};

template <>
struct FieldOps<RationalFunction> {
  static RationalFunction zero_like(const RationalFunction& x) { return RationalFunction::constant(x.nvars(), 0); }
  static RationalFunction one_like(const RationalFunction& x) { return RationalFunction::constant(x.nvars(), 1); }
  static RationalFunction div_int(const RationalFunction& x, int k) { return x.scaled(Rational(1, k)); }
  static bool is_zero(const RationalFunction& x) { return x.is_zero(); }
};

/// Coefficients (a_1..a_n) of det(lambda I - P) = lambda^n + a_1 lambda^{n-1} + ... + a_n
/// by the Faddeev-LeVerrier recurrence
///   M_k = P M_{k-1} + a_{k-1} I,  a_k = -tr(P M_k) / k,  M_0 = 0, a_0 = 1.
template <class T>
std::vector<T> char_poly(const std::vector<std::vector<T>>& P) {
  using F = FieldOps<T>;
  const std::size_t n = P.size();
  if (n == 0) return {};
  for (const auto& r : P)
    if (r.size() != n) throw std::invalid_argument("char_poly: matrix is not square");
  const T zero = F::zero_like(P[0][0]);
  const T one = F::one_like(P[0][0]);
  std::vector<std::vector<T>> M(n, std::vector<T>(n, zero));
  std::vector<T> a;
  T prev = one;
  for (std::size_t k = 1; k <= n; ++k) {
    // M <- P*M + prev*I
    std::vector<std::vector<T>> next(n, std::vector<T>(n, zero));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        T s = zero;
        for (std::size_t l = 0; l < n; ++l) {
          if (F::is_zero(P[i][l]) || F::is_zero(M[l][j])) continue;
          s = s + P[i][l] * M[l][j];
        }
        if (i == j) s = s + prev;
        next[i][j] = std::move(s);
      }
    M = std::move(next);
    T tr = zero;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (F::is_zero(P[i][l]) || F::is_zero(M[l][i])) continue;
        tr = tr + P[i][l] * M[l][i];
      }
    prev = F::div_int(zero - tr, static_cast<int>(k));
    a.push_back(prev);
  }
  return a;
}

/// Numeric overload; rejects non-finite entries.
inline std::vector<double> char_poly_numeric(const NumMatrix& P) {
  for (const auto& r : P)
    for (double v : r)
      if (!std::isfinite(v)) throw std::domain_error("char_poly: non-finite matrix entry");
  return char_poly<double>(P);
}

template <class T>
T determinant(const std::vector<std::vector<T>>& a) {
  using F = FieldOps<T>;
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  T zero = F::zero_like(a[0][0]);
  T acc = zero;
  for (std::size_t j = 0; j < n; ++j) {
    if (F::is_zero(a[0][j])) continue;
    std::vector<std::vector<T>> m;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<T> r;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) r.push_back(a[i][c]);
      m.push_back(std::move(r));
    }
    T term = a[0][j] * determinant(m);
    if (j % 2 == 0)
      acc = acc + term;
    else
      acc = acc - term;
  }
  return acc;
}

/// Hurwitz determinants Delta_1..Delta_n of lambda^n + a_1 lambda^{n-1} + ... + a_n.
/// Entry (r, c) of the Hurwitz matrix (1-based) is a_{2c-r}, with a_0 = 1 and
/// a_k = 0 outside 0..n.
template <class T>
std::vector<T> hurwitz_determinants(const std::vector<T>& a) {
  using F = FieldOps<T>;
  const std::size_t n = a.size();
  if (n == 0) return {};
  const T zero = F::zero_like(a[0]);
  const T one = F::one_like(a[0]);
  auto coeff = [&](long k) -> T {
    if (k == 0) return one;
    if (k < 0 || k > static_cast<long>(n)) return zero;
    return a[static_cast<std::size_t>(k - 1)];
  };
  std::vector<T> out;
  for (std::size_t j = 1; j <= n; ++j) {
    std::vector<std::vector<T>> H(j, std::vector<T>(j, zero));
    for (std::size_t r = 1; r <= j; ++r)
      for (std::size_t c = 1; c <= j; ++c) H[r - 1][c - 1] = coeff(2 * static_cast<long>(c) - static_cast<long>(r));
    out.push_back(determinant(H));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed points.

struct FixedPoint {
  std::vector<double> x;
  double residual = 0.0;      // max_i |G^i(mu, x, 0)|
  double denom_margin = 0.0;  // min_i |den G^i(mu, x, 0)|
};

struct SearchBox {
  std::vector<std::pair<double, double>> bounds;

  static SearchBox cube(std::size_t n, double lo, double hi) { return {std::vector<std::pair<double, double>>(n, {lo, hi})}; }
};

struct FixedPointOptions {
  unsigned seeds = 9;  // per axis
  unsigned max_iterations = 100;
  double dedup_radius = 1e-6;
  double min_denominator = 1e-8;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::map<std::string, Expr> point_substitution(const Model& m, const Binding& mu) {
  std::map<std::string, Expr> s;
  for (const auto& p : m.params) {
    auto it = mu.find(p);
    if (it == mu.end()) throw ParameterError("parameter '" + p + "' is not bound");
    if (const auto* r = std::get_if<Rational>(&it->second))
      s.emplace(p, constant(*r));
    else {
      Rational q(std::get<double>(it->second));
      s.emplace(p, constant(q));
    }
  }
  for (const auto& y : m.velocities) s.emplace(y, constant(0));
  return s;
}

inline Binding fixed_params(const Model& m, const Binding& mu) {
  Binding b;
  for (const auto& p : m.params) {
    auto it = mu.find(p);
    if (it == mu.end()) throw ParameterError("parameter '" + p + "' is not bound");
    b.emplace(p, it->second);
  }
  return b;
}

inline double max_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

}  // namespace detail

/// The slice G^i(mu, x, 0) as rational functions of x.
struct FixedPointSystem {
  std::vector<Polynomial> numerators;
  std::vector<Polynomial> denominators;
  std::vector<std::vector<Polynomial>> jacobian;

  FixedPointSystem(const Model& m, const Binding& mu) {
    auto subs = detail::point_substitution(m, mu);
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i) {
      RationalFunction rf = to_rational_function(substitute(m.G[i], subs), m.coords);
      numerators.push_back(rf.numerator());
      denominators.push_back(rf.denominator());
    }
    jacobian.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) jacobian[i].push_back(numerators[i].derivative(j));
  }

  double residual(std::span<const double> x) const {
    double r = 0.0;
    for (std::size_t i = 0; i < numerators.size(); ++i) r = std::max(r, std::fabs(numerators[i].eval(x) / denominators[i].eval(x)));
    return r;
  }

  double denom_margin(std::span<const double> x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : denominators) d = std::min(d, std::fabs(p.eval(x)));
    return d;
  }
};

/// Newton's method on the cleared numerators from every node of a uniform
/// seed grid; converged points are kept when they lie in the box, satisfy
/// the residual bound on G itself and stay away from denominator zeros.
inline std::vector<FixedPoint> find_fixed_points(const Model& m, const Binding& mu, const SearchBox& box,
                                                 const FixedPointOptions& opt = {}) {
  const std::size_t n = m.dim();
  if (box.bounds.size() != n) throw std::invalid_argument("search box dimension differs from the model");
  for (const auto& [lo, hi] : box.bounds)
    if (!(lo < hi)) throw std::invalid_argument("degenerate search box");
  if (opt.seeds == 0) throw std::invalid_argument("seed grid must have at least one node per axis");

  FixedPointSystem sys(m, mu);
  std::vector<FixedPoint> found;

  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= opt.seeds;
  std::vector<double> x(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = 0; k < n; ++k) {
      unsigned g = static_cast<unsigned>(rest % opt.seeds);
      rest /= opt.seeds;
      const auto& [lo, hi] = box.bounds[k];
      x[k] = opt.seeds == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * g / (opt.seeds - 1);
    }

    bool ok = true;
    for (unsigned it = 0; it < opt.max_iterations; ++it) {
      Eigen::MatrixXd J(n, n);
      Eigen::VectorXd F(n);
      for (std::size_t i = 0; i < n; ++i) {
        F(i) = sys.numerators[i].eval(x);
        for (std::size_t j = 0; j < n; ++j) J(i, j) = sys.jacobian[i][j].eval(x);
      }
      if (!F.allFinite() || !J.allFinite()) {
        ok = false;
        break;
      }
      if (F.lpNorm<Eigen::Infinity>() == 0.0) break;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (lu.rank() < static_cast<Eigen::Index>(n)) {
        ok = false;
        break;
      }
      Eigen::VectorXd step = lu.solve(F);
      for (std::size_t k = 0; k < n; ++k) x[k] -= step(k);
      if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + detail::max_norm(x))) break;
    }
    if (!ok) continue;
    for (auto& v : x)
      if (std::fabs(v) < 1e-15) v = 0.0;

    bool inside = true;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& [lo, hi] = box.bounds[k];
      double slack = 1e-9 * (hi - lo);
      if (!std::isfinite(x[k]) || x[k] < lo - slack || x[k] > hi + slack) inside = false;
    }
    if (!inside) continue;

    FixedPoint fp;
    fp.x = x;
    fp.denom_margin = sys.denom_margin(x);
    if (!(fp.denom_margin > opt.min_denominator)) continue;
    fp.residual = sys.residual(x);
    if (!(fp.residual <= 1e-10 * (1.0 + detail::max_norm(x)))) continue;

    bool duplicate = false;
    for (const auto& q : found) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::fabs(q.x[k] - x[k]));
      if (d < opt.dedup_radius) duplicate = true;
    }
    if (!duplicate) found.push_back(std::move(fp));
  }
  std::sort(found.begin(), found.end(), [](const FixedPoint& a, const FixedPoint& b) { return a.x < b.x; });
  return found;
}

// ---------------------------------------------------------------------------
// Classification.

enum class Verdict { Stable, Unstable, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "Stable";
    case Verdict::Unstable:
      return "Unstable";
    case Verdict::Indeterminate:
      return "Indeterminate";
  }
  return "?";
}

struct StabilityReport {
  FixedPoint fixed_point;
  NumMatrix P;                      // at (x, 0)
  std::vector<double> char_poly;    // a_1..a_n of P
  std::vector<double> hurwitz;      // Delta_1..Delta_n of P
  std::vector<std::complex<double>> eigenvalues;
  Verdict verdict = Verdict::Indeterminate;
  std::vector<std::string> margin_flags;
  bool eigen_disagreement = false;
};

inline constexpr double kDefaultTolerance = 1e-9;

/// Routh-Hurwitz decision on the coefficients of the max-normalized matrix.
/// Stable when a_n and every Delta_j exceed tol; Unstable when any of them
/// is below -tol; Indeterminate otherwise.
inline Verdict hurwitz_verdict(const std::vector<double>& a, const std::vector<double>& delta, double tol,
                               std::vector<std::string>* flags = nullptr) {
  if (a.empty()) return Verdict::Indeterminate;
  bool negative = false;
  bool marginal = false;
  auto look = [&](double q, const std::string& name) {
    if (q < -tol)
      negative = true;
    else if (q <= tol) {
      marginal = true;
      if (flags) flags->push_back(name);
    }
  };
  look(a.back(), "a" + std::to_string(a.size()));
  for (std::size_t j = 0; j < delta.size(); ++j) look(delta[j], "Delta" + std::to_string(j + 1));
  if (negative) return Verdict::Unstable;
  if (marginal) return Verdict::Indeterminate;
  return Verdict::Stable;
}

/// Verdict for a numeric matrix: Hurwitz test after normalizing by the
/// largest entry, cross-checked against the eigenvalue real parts.
inline StabilityReport classify_matrix(const NumMatrix& P, double tol = kDefaultTolerance) {
  const std::size_t n = P.size();
  StabilityReport r;
  r.P = P;
  r.char_poly = char_poly_numeric(P);
  r.hurwitz = hurwitz_determinants(r.char_poly);

  double scale = 0.0;
  for (const auto& row : P)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) {
    r.verdict = Verdict::Indeterminate;
    r.margin_flags.push_back("P = 0");
    r.eigenvalues.assign(n, {0.0, 0.0});
    return r;
  }
  NumMatrix Q = P;
  Eigen::MatrixXd E(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Q[i][j] /= scale;
      E(i, j) = Q[i][j];
    }
  auto a = char_poly<double>(Q);
  auto delta = hurwitz_determinants(a);
  r.verdict = hurwitz_verdict(a, delta, tol, &r.margin_flags);

  Eigen::EigenSolver<Eigen::MatrixXd> es(E, false);
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    r.eigenvalues.push_back(es.eigenvalues()(k) * scale);
    max_re = std::max(max_re, es.eigenvalues()(k).real());
  }
  constexpr double kEigenMargin = 1e-6;
  if (std::fabs(max_re) > kEigenMargin && r.verdict != Verdict::Indeterminate) {
    Verdict by_eigen = max_re < 0 ? Verdict::Stable : Verdict::Unstable;
    if (by_eigen != r.verdict) {
      r.eigen_disagreement = true;
      r.verdict = Verdict::Indeterminate;
      r.margin_flags.push_back("eigenvalue cross-check disagrees");
    }
  }
  return r;
}

/// Numeric value of a symbolic matrix at (x, y), parameters fixed.
inline NumMatrix evaluate_matrix(const ExprMatrix& A, const Model& m, const Binding& mu, std::span<const double> x,
                                 std::span<const double> y) {
  Binding fixed = detail::fixed_params(m, mu);
  std::vector<std::string> slots = m.coords;
  slots.insert(slots.end(), m.velocities.begin(), m.velocities.end());
  std::vector<double> state(x.begin(), x.end());
  state.insert(state.end(), y.begin(), y.end());
  NumMatrix out(A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (const auto& e : A[i]) out[i].push_back(CompiledExpr(e, slots, fixed)(state, 0.0));
  return out;
}

inline StabilityReport classify(const Model& m, const Binding& mu, const FixedPoint& fp, const ExprMatrix& P,
                                double tol = kDefaultTolerance) {
  std::vector<double> y(m.dim(), 0.0);
  StabilityReport r = classify_matrix(evaluate_matrix(P, m, mu, fp.x, y), tol);
  r.fixed_point = fp;
  return r;
}

inline StabilityReport classify(const Model& m, const Binding& mu, const FixedPoint& fp, double tol = kDefaultTolerance) {
  return classify(m, mu, fp, kcc_invariant(m), tol);
}

struct StableCount {
  int k = 0;
  int indeterminate = 0;
  std::vector<StabilityReport> reports;
};

inline StableCount count_stable(const Model& m, const Binding& mu, const SearchBox& box, double tol = kDefaultTolerance,
                                const FixedPointOptions& opt = {}) {
  StableCount c;
  ExprMatrix P = kcc_invariant(m);
  for (const auto& fp : find_fixed_points(m, mu, box, opt)) {
    c.reports.push_back(classify(m, mu, fp, P, tol));
    if (c.reports.back().verdict == Verdict::Stable) ++c.k;
    if (c.reports.back().verdict == Verdict::Indeterminate) ++c.indeterminate;
  }
  return c;
}

// ---------------------------------------------------------------------------
// The polynomial system of stable fixed points.

class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SemiAlgebraicSystem {
  std::vector<std::string> vars;         // coordinates then parameters
  std::vector<Polynomial> equations;     // numerators of G^i(mu, x, 0)
  std::vector<Polynomial> inequations;   // denominators of G^i(mu, x, 0), != 0
  std::vector<Polynomial> inequalities;  // a_{n,1} a_{n,2} > 0, Delta_{j,1} Delta_{j,2} > 0

  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& p : equations) out.push_back("EQ " + p.to_string(vars));
    for (const auto& p : inequations) out.push_back("NEQ " + p.to_string(vars));
    for (const auto& p : inequalities) out.push_back("GT " + p.to_string(vars));
    return out;
  }
};

inline constexpr std::size_t kDefaultMonomialBudget = 200000;

inline SemiAlgebraicSystem assemble_semialgebraic(const Model& m, std::size_t budget = kDefaultMonomialBudget) {
  const std::size_t n = m.dim();
  SemiAlgebraicSystem s;
  s.vars = m.position_param_order();
  std::map<std::string, Expr> zero_y;
  for (const auto& y : m.velocities) zero_y.emplace(y, constant(0));

  auto guard = [&](const Polynomial& p, const std::string& what) {
    if (p.size() > budget)
      throw SizeLimitError(what + " has " + std::to_string(p.size()) + " monomials, above the budget of " +
                           std::to_string(budget));
  };
  auto primitive_or_zero = [](const Polynomial& p) { return p.is_zero() ? p : p.primitive(); };

  for (std::size_t i = 0; i < n; ++i) {
    RationalFunction g = to_rational_function(substitute(m.G[i], zero_y), s.vars);
    s.equations.push_back(primitive_or_zero(g.numerator()));
    s.inequations.push_back(g.denominator());
    guard(s.equations.back(), "G" + std::to_string(i + 1) + " numerator");
  }

  ExprMatrix P = kcc_invariant(m);
  std::vector<std::vector<RationalFunction>> Pr(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Pr[i].push_back(to_rational_function(substitute(P[i][j], zero_y), s.vars));

  auto a = char_poly(Pr);
  auto delta = hurwitz_determinants(a);
  auto product = [&](const RationalFunction& q, const std::string& what) {
    Polynomial p = q.numerator() * q.denominator();
    guard(p, what);
    return primitive_or_zero(p);
  };
  s.inequalities.push_back(product(a.back(), "a" + std::to_string(n)));
  for (std::size_t j = 0; j < n; ++j) s.inequalities.push_back(product(delta[j], "Delta" + std::to_string(j + 1)));
  return s;
}

// ---------------------------------------------------------------------------
// Airfoil parameter regions.

struct RegionResult {
  std::string label = "none";         // first satisfied condition set, or "none"
  std::vector<std::string> satisfied;  // every satisfied condition set
  std::vector<int> signs;              // signs of R1..R6
  bool side_condition = false;         // (Minf - 10) R1 ... R6 != 0

  /// Number of Jacobi stable fixed points the matched region implies.
  int implied_count() const {
    if (label == "C1" || label == "C2" || label == "C3") return 1;
    if (label == "C4" || label == "C5") return 2;
    return -1;
  }
};

/// Polynomials R1..R6 of the airfoil stability conditions, exact.
inline std::vector<Rational> airfoil_polynomials(const Rational& Minf, const Rational& V) {
  // Literals above the range of long go through mpz.
  Rational M = Minf;
  Rational V2 = V * V, V3 = V2 * V, V4 = V3 * V, V5 = V4 * V, V6 = V5 * V;
  Rational M2 = M * M, M3 = M2 * M, M4 = M3 * M, M5 = M4 * M;
  auto big = [](const char* s) { return Rational(mpz_class(s)); };
  std::vector<Rational> r(6);
  r[0] = -9450 * V2 * M - 43 * V2 + 135 * V * M + 621900 * M2;
  r[1] = 1800 * V4 * M + 1500 * V3 * M2 - 15660000 * V2 * M3 + 4 * V4 + 20 * V3 * M - 123675 * V2 * M2 +
         297000 * V * M3 + 769590000 * M4;
  r[2] = -V2 + 50 * M;
  r[3] = V2 * M - 5000;
  r[4] = -18900 * V4 * M2 + 43 * V4 * M - 135 * V3 * M2 + 795600 * V2 * M3 + 47250000 * V2 * M - 215000 * V2 +
         675000 * V * M - 1615500000 * M2;
  r[5] = 3600 * V6 * M2 + 3000 * V5 * M3 - 31320000 * V4 * M4 - 4 * V6 * M - 20 * V5 * M2 - 146325 * V4 * M3 -
         522000 * V3 * M4 + 1579410000 * V2 * M5 - 4500000 * V4 * M - 532500000 * V3 * M2 +
         big("155250000000") * V2 * M3 + 20000 * V4 + 100000 * V3 * M + 56625000 * V2 * M2 +
         big("28485000000") * V * M3 - big("7829550000000") * M4;
  return r;
}

inline RegionResult airfoil_region_from_signs(const std::vector<int>& s, bool side) {
  RegionResult res;
  res.signs = s;
  res.side_condition = side;
  if (!side) return res;
  auto pos = [&](int i) { return s[i - 1] > 0; };
  auto negv = [&](int i) { return s[i - 1] < 0; };
  const bool c[5] = {
      pos(1) && pos(2) && pos(4) && pos(5) && pos(6),
      pos(1) && pos(2) && pos(3) && negv(4),
      pos(1) && pos(2) && pos(3) && pos(4) && negv(5) && pos(6),
      negv(1) && negv(3) && negv(4) && pos(5) && pos(6),
      pos(1) && negv(2) && negv(3) && negv(4) && pos(5) && pos(6),
  };
  for (int k = 0; k < 5; ++k)
    if (c[k]) res.satisfied.push_back("C" + std::to_string(k + 1));
  if (!res.satisfied.empty()) res.label = res.satisfied.front();
  return res;
}

/// Region label of (Minf, V) among the condition sets C1..C5, decided with
/// exact signs.
inline RegionResult airfoil_region_conditions(const Rational& Minf, const Rational& V) {
  auto r = airfoil_polynomials(Minf, V);
  std::vector<int> s;
  bool side = sgn(Minf - 10) != 0;
  for (const auto& q : r) {
    s.push_back(sgn(q));
    if (sgn(q) == 0) side = false;
  }
  return airfoil_region_from_signs(s, side);
}

inline RegionResult airfoil_region_conditions(double Minf, double V) {
  if (!std::isfinite(Minf) || !std::isfinite(V)) throw std::invalid_argument("non-finite airfoil parameters");
  return airfoil_region_conditions(Rational(Minf), Rational(V));
}

}  // namespace kcc
