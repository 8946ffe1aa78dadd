#pragma once

// Differential invariants of x_i'' + 2 G^i(x, y) = 0: the nonlinear and
// Berwald connections, the deviation curvature tensor, the first invariant,
// torsion, Riemann-Christoffel and Douglas tensors, and the deviation
// (Jacobi) system. All tensors are dense, indexed from zero, and left
// uncanonicalized; canonicalize entries at comparison or output time.

#include <sstream>
#include <string>
#include <vector>

#include "kcc/calculus.hpp"
#include "kcc/canonical.hpp"
#include "kcc/model.hpp"

namespace kcc {

using ExprVector = std::vector<Expr>;
using ExprMatrix = std::vector<ExprVector>;
using ExprTensor3 = std::vector<ExprMatrix>;
using ExprTensor4 = std::vector<ExprTensor3>;

inline ExprMatrix zero_matrix(std::size_t rows, std::size_t cols) {
  return ExprMatrix(rows, ExprVector(cols, constant(0)));
}

/// N^i_j = dG^i/dy_j.
inline ExprMatrix nonlinear_connection(const Model& m) {
  const std::size_t n = m.dim();
  ExprMatrix N = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) N[i][j] = differentiate(m.G[i], m.velocities[j]);
  return N;
}

/// G^i_{jl} = dN^i_j/dy_l.
inline ExprTensor3 berwald_connection(const Model& m, const ExprMatrix& N) {
  const std::size_t n = m.dim();
  ExprTensor3 B(n, zero_matrix(n, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) B[i][j][l] = differentiate(N[i][j], m.velocities[l]);
  return B;
}

/// Deviation curvature tensor for a given nonlinear connection:
///   P^i_j = -2 dG^i/dx_j + sum_l ( y_l dN^i_j/dx_l + N^i_l N^l_j - 2 G^l G^i_{jl} ).
/// Taking N as a parameter lets callers probe a perturbed connection.
inline ExprMatrix deviation_curvature(const Model& m, const ExprMatrix& N) {
  const std::size_t n = m.dim();
  ExprTensor3 B = berwald_connection(m, N);
  ExprMatrix P = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> terms{mul({constant(-2), differentiate(m.G[i], m.coords[j])})};
      for (std::size_t l = 0; l < n; ++l) {
        terms.push_back(mul({symbol(m.velocities[l]), differentiate(N[i][j], m.coords[l])}));
        terms.push_back(mul({N[i][l], N[l][j]}));
        terms.push_back(mul({constant(-2), m.G[l], B[i][j][l]}));
      }
      P[i][j] = add(terms);
    }
  }
  return P;
}

inline ExprMatrix kcc_invariant(const Model& m) { return deviation_curvature(m, nonlinear_connection(m)); }

/// epsilon_i = 2 G^i - N^i_j y_j.
inline ExprVector first_invariant(const Model& m) {
  const std::size_t n = m.dim();
  ExprMatrix N = nonlinear_connection(m);
  ExprVector eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> terms{mul({constant(2), m.G[i]})};
    for (std::size_t j = 0; j < n; ++j) terms.push_back(neg(mul({N[i][j], symbol(m.velocities[j])})));
    eps[i] = add(terms);
  }
  return eps;
}

struct HigherInvariants {
  ExprTensor3 torsion;  // P^i_{jk}
  ExprTensor4 riemann;  // P^i_{jkl}
  ExprTensor4 douglas;  // D^i_{jkl}
};

inline HigherInvariants higher_invariants(const Model& m, const ExprMatrix& P, const ExprTensor3& berwald) {
  const std::size_t n = m.dim();
  HigherInvariants h;
  h.torsion.assign(n, zero_matrix(n, n));
  h.riemann.assign(n, ExprTensor3(n, zero_matrix(n, n)));
  h.douglas.assign(n, ExprTensor3(n, zero_matrix(n, n)));
  const Expr third = constant(Rational(1, 3));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        h.torsion[i][j][k] = mul({third, sub(differentiate(P[i][j], m.velocities[k]),
                                             differentiate(P[i][k], m.velocities[j]))});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          h.riemann[i][j][k][l] = differentiate(h.torsion[i][j][k], m.velocities[l]);
          h.douglas[i][j][k][l] = differentiate(berwald[i][j][k], m.velocities[l]);
        }
  return h;
}

inline HigherInvariants higher_invariants(const Model& m) {
  ExprMatrix N = nonlinear_connection(m);
  return higher_invariants(m, deviation_curvature(m, N), berwald_connection(m, N));
}

struct KccInvariants {
  ExprMatrix N;
  ExprTensor3 berwald;
  ExprMatrix P;
  ExprVector epsilon;
  ExprTensor3 torsion;
  ExprTensor4 riemann;
  ExprTensor4 douglas;
};

inline KccInvariants compute_invariants(const Model& m) {
  KccInvariants k;
  k.N = nonlinear_connection(m);
  k.berwald = berwald_connection(m, k.N);
  k.P = deviation_curvature(m, k.N);
  k.epsilon = first_invariant(m);
  HigherInvariants h = higher_invariants(m, k.P, k.berwald);
  k.torsion = std::move(h.torsion);
  k.riemann = std::move(h.riemann);
  k.douglas = std::move(h.douglas);
  return k;
}

/// xi'' = A21 xi + A22 xi' with A21 = -2 dG/dx and A22 = -2 N, and the
/// first-order block matrix A = [[0, E], [A21, A22]].
struct DeviationSystem {
  ExprMatrix A21;
  ExprMatrix A22;
  ExprMatrix A;

  std::size_t dim() const { return A21.size(); }

  /// Printable residuals xi_i'' + 2 N^i_j xi_j' + 2 dG^i/dx_j xi_j = 0 with
  /// coefficients in canonical form over `vars`.
  std::vector<std::string> equations(const std::vector<std::string>& vars) const {
    const std::size_t n = dim();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::ostringstream os;
      os << "xi" << i + 1 << "''";
      auto emit = [&](const Expr& coeff, const std::string& what) {
        CanonicalRational c = canonicalize(neg(coeff), vars);
        if (c.is_zero()) return;
        os << " + (" << c.to_string() << ")*" << what;
      };
      for (std::size_t j = 0; j < n; ++j) emit(A22[i][j], "xi" + std::to_string(j + 1) + "'");
      for (std::size_t j = 0; j < n; ++j) emit(A21[i][j], "xi" + std::to_string(j + 1));
      os << " = 0";
      out.push_back(os.str());
    }
    return out;
  }
};

inline DeviationSystem kcc_deviation(const Model& m) {
  const std::size_t n = m.dim();
  ExprMatrix N = nonlinear_connection(m);
  DeviationSystem d;
  d.A21 = zero_matrix(n, n);
  d.A22 = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      d.A21[i][j] = mul({constant(-2), differentiate(m.G[i], m.coords[j])});
      d.A22[i][j] = mul({constant(-2), N[i][j]});
    }
  d.A = zero_matrix(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    d.A[i][n + i] = constant(1);
    for (std::size_t j = 0; j < n; ++j) {
      d.A[n + i][j] = d.A21[i][j];
      d.A[n + i][n + j] = d.A22[i][j];
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Conversion from M(x, y) x'' + f(x, y) = 0 to standard form.

namespace detail {

inline ExprMatrix minor_of(const ExprMatrix& a, std::size_t row, std::size_t col) {
  ExprMatrix m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == row) continue;
    ExprVector r;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != col) r.push_back(a[i][j]);
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace detail

/// Laplace expansion along the first row, skipping literal zeros.
inline Expr symbolic_determinant(const ExprMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return constant(1);
  if (n == 1) return a[0][0];
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_zero()) continue;
    Expr cof = symbolic_determinant(detail::minor_of(a, 0, j));
    terms.push_back(mul({constant(j % 2 == 0 ? 1 : -1), a[0][j], cof}));
  }
  return add(terms);
}

inline constexpr std::size_t kMaxSymbolicInverse = 4;

/// Solves M x'' + f = 0 for x'' symbolically via adjugate and determinant
/// and returns the model with G = (1/2) M^{-1} f, each G^i brought to
/// canonical form over the model's declaration order.
inline Model to_standard_form(std::string name, std::vector<std::string> coords, std::vector<std::string> params,
                              const ExprMatrix& mass, const ExprVector& force,
                              std::map<std::string, Rational> defaults = {}) {
  const std::size_t n = force.size();
  if (n == 0) throw ModelError("empty force vector");
  if (n > kMaxSymbolicInverse)
    throw ModelError("symbolic mass-matrix inverse supports n <= " + std::to_string(kMaxSymbolicInverse));
  if (mass.size() != n) throw ModelError("mass matrix and force vector dimensions differ");
  for (const auto& r : mass)
    if (r.size() != n) throw ModelError("mass matrix is not square");
  if (coords.size() != n) throw ModelError("variable count does not match the mass matrix");

  Model shell;
  shell.coords = coords;
  shell.velocities = velocity_names(n);
  shell.params = params;
  const auto order = shell.var_order();

  Expr det = symbolic_determinant(mass);
  if (canonicalize(det, order).is_zero()) throw ModelError("mass matrix is symbolically singular");

  ExprVector G(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < n; ++j) {
      // adj(M)_{ij} = (-1)^{i+j} det(minor(M, j, i))
      Expr cof = n == 1 ? constant(1) : symbolic_determinant(detail::minor_of(mass, j, i));
      if ((i + j) % 2 == 1) cof = neg(cof);
      terms.push_back(mul({cof, force[j]}));
    }
    Expr gi = mul({constant(Rational(1, 2)), div(add(terms), det)});
    G[i] = canonicalize(gi, order).to_expr();
  }
  return make_model(std::move(name), std::move(coords), std::move(params), std::move(G), std::move(defaults));
}

}  // namespace kcc
