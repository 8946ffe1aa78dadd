#pragma once

// Time-domain checks: fixed-step RK4 trajectories of x'' + 2G = 0 and of the
// deviation equations, the matrix-exponential deviation solution, the
// focusing diagnostic and a finite-perturbation estimate of the deviation.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include "kcc/evaluate.hpp"
#include "kcc/kcc.hpp"
#include "kcc/stability.hpp"

namespace kcc {

struct Trace {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::string> names;
  double step = 0.0;
  std::string method;

  std::size_t size() const { return times.size(); }
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline constexpr double kDenominatorFloor = 1e-10;

using VectorField = std::function<void(double t, const std::vector<double>& s, std::vector<double>& ds)>;

/// Classical fourth-order Runge-Kutta with constant step; the last step
/// lands on round(tEnd / dt) * dt.
inline Trace rk4(const VectorField& f, std::vector<double> s0, double t_end, double dt, std::vector<std::string> names) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step size must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("end time must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (steps == 0) throw std::invalid_argument("end time is shorter than one step");
  const std::size_t d = s0.size();
  Trace tr;
  tr.names = std::move(names);
  tr.step = dt;
  tr.method = "rk4";
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(s0);
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  std::vector<double> s = std::move(s0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    f(t, s, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    f(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    f(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + dt * k3[i];
    f(t + dt, tmp, k4);
    for (std::size_t i = 0; i < d; ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tr.times.push_back(static_cast<double>(k + 1) * dt);
    tr.states.push_back(s);
  }
  return tr;
}

namespace detail {

inline std::vector<std::string> state_names(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> v = a;
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

}  // namespace detail

/// Trajectory of x' = y, y' = -2G(mu, x, y) from (x0, y0).
inline Trace integrate(const Model& m, const Binding& mu, const std::vector<double>& x0, const std::vector<double>& y0,
                       double t_end, double dt) {
  const std::size_t n = m.dim();
  if (x0.size() != n || y0.size() != n) throw std::invalid_argument("initial state dimension differs from the model");
  Binding fixed = detail::fixed_params(m, mu);
  auto slots = detail::state_names(m.coords, m.velocities);
  std::vector<CompiledExpr> G;
  for (const auto& g : m.G) G.emplace_back(g, slots, fixed);
  VectorField f = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    for (std::size_t i = 0; i < n; ++i) {
      double min_den = 0.0;
      double gi = G[i].eval(s, min_den);
      if (min_den <= kDenominatorFloor) {
        std::ostringstream msg;
        msg << "denominator of G" << i + 1 << " fell below " << kDenominatorFloor << " at t = " << t;
        throw IntegrationError(msg.str(), t);
      }
      ds[i] = s[n + i];
      ds[n + i] = -2.0 * gi;
    }
  };
  std::vector<double> s0 = x0;
  s0.insert(s0.end(), y0.begin(), y0.end());
  return rk4(f, s0, t_end, dt, slots);
}

/// Deviation matrices evaluated at a point (x, y).
struct DeviationAtPoint {
  Eigen::MatrixXd A21;
  Eigen::MatrixXd A22;
  Eigen::MatrixXd A;  // [[0, E], [A21, A22]]
};

inline Eigen::MatrixXd to_eigen(const NumMatrix& a) {
  Eigen::MatrixXd m(a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j];
  return m;
}

inline DeviationAtPoint deviation_blocks(const Eigen::MatrixXd& A21, const Eigen::MatrixXd& A22) {
  const Eigen::Index n = A21.rows();
  DeviationAtPoint d{A21, A22, Eigen::MatrixXd::Zero(2 * n, 2 * n)};
  d.A.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  d.A.bottomLeftCorner(n, n) = A21;
  d.A.bottomRightCorner(n, n) = A22;
  return d;
}

inline DeviationAtPoint evaluate_deviation(const DeviationSystem& sys, const Model& m, const Binding& mu,
                                           const std::vector<double>& x, const std::vector<double>& y) {
  return deviation_blocks(to_eigen(evaluate_matrix(sys.A21, m, mu, x, y)),
                          to_eigen(evaluate_matrix(sys.A22, m, mu, x, y)));
}

inline std::vector<std::string> deviation_names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("xi" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) v.push_back("dxi" + std::to_string(i));
  return v;
}

namespace detail {

inline void require_nonzero(const std::vector<double>& W) {
  bool nonzero = false;
  for (double w : W) {
    if (!std::isfinite(w)) throw std::invalid_argument("initial deviation velocity is not finite");
    if (w != 0.0) nonzero = true;
  }
  if (!nonzero) throw std::invalid_argument("initial deviation velocity W must be nonzero");
}

}  // namespace detail

/// RK4 on xi'' = A21 xi + A22 xi' from xi(0) = 0, xi'(0) = W.
inline Trace integrate_deviation(const DeviationAtPoint& d, const std::vector<double>& W, double t_end, double dt) {
  const std::size_t n = static_cast<std::size_t>(d.A21.rows());
  if (W.size() != n) throw std::invalid_argument("W dimension differs from the model");
  detail::require_nonzero(W);
  const Eigen::MatrixXd A = d.A;
  VectorField f = [&](double, const std::vector<double>& s, std::vector<double>& ds) {
    Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(s.size()));
    Eigen::Map<Eigen::VectorXd> out(ds.data(), static_cast<Eigen::Index>(ds.size()));
    out.noalias() = A * sv;
  };
  std::vector<double> s0(n, 0.0);
  s0.insert(s0.end(), W.begin(), W.end());
  return rk4(f, s0, t_end, dt, deviation_names(n));
}

inline Trace integrate_deviation(const Model& m, const Binding& mu, const std::vector<double>& xbar,
                                 const std::vector<double>& W, double t_end, double dt) {
  detail::require_nonzero(W);
  std::vector<double> y(m.dim(), 0.0);
  return integrate_deviation(evaluate_deviation(kcc_deviation(m), m, mu, xbar, y), W, t_end, dt);
}

/// exp(A) by scaling and squaring with a Taylor series truncated once the
/// next term falls below tol relative to the partial sum.
inline Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A, double tol = 1e-12) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("matrix_exp: matrix is not square");
  if (!A.allFinite()) throw std::domain_error("matrix_exp: non-finite entry");
  double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  Eigen::MatrixXd B = A / std::ldexp(1.0, s);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < 60; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= tol * 1e-3 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

/// (xi, xi')(t) = exp(A t) (0, W) at each requested time.
inline Trace matrix_exp_solution(const DeviationAtPoint& d, const std::vector<double>& W, const std::vector<double>& times) {
  const std::size_t n = static_cast<std::size_t>(d.A21.rows());
  if (W.size() != n) throw std::invalid_argument("W dimension differs from the model");
  detail::require_nonzero(W);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v0(static_cast<Eigen::Index>(n + i)) = W[i];
  Trace tr;
  tr.names = deviation_names(n);
  tr.method = "expm";
  tr.step = times.size() > 1 ? times[1] - times[0] : 0.0;
  for (double t : times) {
    Eigen::VectorXd v = matrix_exp(d.A * t) * v0;
    tr.times.push_back(t);
    tr.states.emplace_back(v.data(), v.data() + v.size());
  }
  return tr;
}

inline std::vector<double> uniform_times(double t_end, double dt) {
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
  std::vector<double> t;
  for (std::size_t k = 0; k <= steps; ++k) t.push_back(static_cast<double>(k) * dt);
  return t;
}

// ---------------------------------------------------------------------------
// Focusing diagnostic.

enum class Focusing { Bunching, Dispersing, Mixed };

inline const char* to_string(Focusing f) {
  switch (f) {
    case Focusing::Bunching:
      return "Bunching";
    case Focusing::Dispersing:
      return "Dispersing";
    case Focusing::Mixed:
      return "Mixed";
  }
  return "?";
}

struct FocusingProfile {
  std::vector<double> times;
  std::vector<double> norm_sq;  // <xi, xi> / <W, W>
  std::vector<double> t_sq;
  Focusing verdict = Focusing::Mixed;
  std::size_t probe_samples = 0;
};

struct FocusingOptions {
  double t_probe = 0.5;
  unsigned samples = 100;
  double rel_tol = 1e-9;  // strictness margin of the comparison with t^2
};

/// Adapted squared norm along a deviation trace and the verdict near 0+:
/// Bunching when it stays below t^2 at every probe sample in (0, t_probe],
/// Dispersing when it stays above, Mixed otherwise.
inline FocusingProfile focusing_profile(const Trace& dev, const std::vector<double>& W, const FocusingOptions& opt = {}) {
  const std::size_t n = W.size();
  detail::require_nonzero(W);
  if (dev.size() == 0 || dev.states.front().size() < n) throw std::invalid_argument("deviation trace does not match W");
  double ww = 0.0;
  for (double w : W) ww += w * w;

  FocusingProfile p;
  for (std::size_t k = 0; k < dev.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += dev.states[k][i] * dev.states[k][i];
    p.times.push_back(dev.times[k]);
    p.norm_sq.push_back(s / ww);
    p.t_sq.push_back(dev.times[k] * dev.times[k]);
  }

  // Probe samples: the trace points nearest to the uniform grid in (0, t_probe].
  std::vector<std::size_t> probe;
  for (unsigned k = 1; k <= opt.samples; ++k) {
    double target = opt.t_probe * k / opt.samples;
    auto it = std::lower_bound(p.times.begin(), p.times.end(), target);
    std::size_t idx = static_cast<std::size_t>(it - p.times.begin());
    if (idx == p.times.size() || (idx > 0 && target - p.times[idx - 1] < p.times[idx] - target)) --idx;
    if (idx == 0 || p.times[idx] > opt.t_probe * (1 + 1e-12)) continue;
    if (!probe.empty() && probe.back() == idx) continue;
    probe.push_back(idx);
  }
  p.probe_samples = probe.size();
  if (probe.size() < 3) throw std::invalid_argument("degenerate trace: fewer than 3 samples in the probe window");

  bool below = true;
  bool above = true;
  for (auto idx : probe) {
    double a = p.norm_sq[idx];
    double b = p.t_sq[idx];
    if (!(a < b * (1 - opt.rel_tol))) below = false;
    if (!(a > b * (1 + opt.rel_tol))) above = false;
  }
  p.verdict = below ? Focusing::Bunching : above ? Focusing::Dispersing : Focusing::Mixed;
  return p;
}

/// (x~(t) - x(t)) / eta where x~ starts from the same state with the
/// velocity displaced by eta W; returned as a trace over (xi, xi').
inline Trace perturbation_oracle(const Model& m, const Binding& mu, const Trace& base, const std::vector<double>& W,
                                 double eta, double t_end, double dt) {
  const std::size_t n = m.dim();
  if (eta == 0.0 || !std::isfinite(eta)) throw std::invalid_argument("perturbation size eta must be nonzero");
  if (W.size() != n) throw std::invalid_argument("W dimension differs from the model");
  if (base.size() == 0) throw std::invalid_argument("empty base trajectory");
  const auto& s0 = base.states.front();
  std::vector<double> x0(s0.begin(), s0.begin() + static_cast<long>(n));
  std::vector<double> y0(s0.begin() + static_cast<long>(n), s0.end());
  for (std::size_t i = 0; i < n; ++i) y0[i] += eta * W[i];
  Trace pert = integrate(m, mu, x0, y0, t_end, dt);
  if (pert.size() != base.size()) throw std::invalid_argument("base trajectory grid differs from the requested one");
  Trace out;
  out.names = deviation_names(n);
  out.step = dt;
  out.method = "perturbation";
  for (std::size_t k = 0; k < pert.size(); ++k) {
    std::vector<double> v(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) v[i] = (pert.states[k][i] - base.states[k][i]) / eta;
    out.times.push_back(pert.times[k]);
    out.states.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV export.

inline void write_trace_csv(std::ostream& os, const Trace& tr) {
  os << std::setprecision(17);
  os << "t";
  for (const auto& n : tr.names) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << tr.times[k];
    for (double v : tr.states[k]) os << ',' << v;
    os << '\n';
  }
}

inline void write_focusing_csv(std::ostream& os, const FocusingProfile& p) {
  os << std::setprecision(17);
  os << "t,norm_sq,t_sq\n";
  for (std::size_t k = 0; k < p.times.size(); ++k) os << p.times[k] << ',' << p.norm_sq[k] << ',' << p.t_sq[k] << '\n';
}

}  // namespace kcc
