#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "kcc/models.hpp"
#include "kcc/numerics.hpp"

using namespace kcc;

namespace {

Binding binding(const std::map<std::string, Rational>& mu) {
  Binding b;
  for (const auto& [k, v] : mu) b[k] = v;
  return b;
}

Model oscillator() { return make_model("osc", {"x1"}, {}, {parse("1/8*x1")}); }

DeviationAtPoint quarter_identity(std::size_t n) {
  return deviation_blocks(-0.25 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

}  // namespace

TEST_CASE("integrate: harmonic oscillator", "[integrate]") {
  const double w = 0.3;
  Trace tr = integrate(oscillator(), {}, {0.0}, {w}, 10.0, 1e-3);
  REQUIRE(tr.size() == 10001);
  CHECK(tr.times.back() == Catch::Approx(10.0).epsilon(1e-15));
  double err = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) err = std::max(err, std::fabs(tr.states[k][0] - 2 * w * std::sin(tr.times[k] / 2)));
  CHECK(err < 1e-8);
  CHECK(tr.names == std::vector<std::string>{"x1", "y1"});
}

TEST_CASE("integrate: fourth-order convergence", "[integrate]") {
  auto error_at = [](double dt) {
    Trace tr = integrate(oscillator(), {}, {0.0}, {1.0}, 10.0, dt);
    return std::fabs(tr.states.back()[0] - 2 * std::sin(5.0));
  };
  double e1 = error_at(0.1), e2 = error_at(0.05);
  double order = std::log2(e1 / e2);
  CHECK(order > 3.8);
  CHECK(order < 4.2);
}

TEST_CASE("integrate: wound strings", "[integrate]") {
  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  Trace still = integrate(m, mu, {2.0, 1.0}, {0.0, 0.0}, 1.0, 1e-2);
  for (const auto& s : still.states) {
    CHECK(s[0] == 2.0);
    CHECK(s[1] == 1.0);
  }
  Trace tr = integrate(m, mu, {2.0, 1.0}, {1e-5, 2e-5}, 50.0, 1e-3);
  double dev = 0.0;
  for (const auto& s : tr.states) dev = std::max({dev, std::fabs(s[0] - 2.0), std::fabs(s[1] - 1.0)});
  CHECK(dev < 1e-3);
  CHECK(dev > 0.0);
}

TEST_CASE("integrate: argument and singularity errors", "[integrate]") {
  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  CHECK_THROWS_AS(integrate(m, mu, {2.0, 1.0}, {0.0, 0.0}, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(m, mu, {2.0, 1.0}, {0.0, 0.0}, 1.0, -1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate(m, mu, {2.0, 1.0}, {0.0, 0.0}, 0.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate(m, mu, {2.0}, {0.0, 0.0}, 1.0, 1e-3), std::invalid_argument);
  // x1 moves at unit speed onto the pole of G2 at x1 = 0.
  Model pole = make_model("pole", {"x1", "x2"}, {}, {constant(0), parse("1/(2*x1)")});
  try {
    integrate(pole, {}, {-1.0, 0.0}, {1.0, 0.0}, 5.0, 1e-3);
    FAIL("no error");
  } catch (const IntegrationError& e) {
    CHECK(e.time() == Catch::Approx(1.0).margin(2e-3));
  }
}

TEST_CASE("deviation: closed form at the wound-strings fixed point", "[deviation]") {
  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  DeviationAtPoint d = evaluate_deviation(kcc_deviation(m), m, mu, {-2.0, 1.0}, {0.0, 0.0});
  CHECK((d.A21 + 0.25 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(d.A22.cwiseAbs().maxCoeff() < 1e-12);

  std::vector<double> W{1e-5, 1e-4};
  Trace tr = integrate_deviation(m, mu, {-2.0, 1.0}, W, 10.0, 1e-3);
  double err = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i)
      err = std::max(err, std::fabs(tr.states[k][i] - 2 * W[i] * std::sin(tr.times[k] / 2)) / std::fabs(W[i]));
  CHECK(err < 1e-8);
  CHECK(tr.names == std::vector<std::string>{"xi1", "xi2", "dxi1", "dxi2"});
}

TEST_CASE("matrix exponential", "[expm]") {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 4);
  CHECK((matrix_exp(Z) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  DeviationAtPoint zero = deviation_blocks(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2));
  std::vector<double> W{0.5, -2.0};
  Trace lin = matrix_exp_solution(zero, W, uniform_times(3.0, 0.25));
  for (std::size_t k = 0; k < lin.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i) CHECK(lin.states[k][i] == Catch::Approx(W[i] * lin.times[k]).margin(1e-14));

  Eigen::MatrixXd A(3, 3);
  A << -1.0, 2.0, 0.5, 0.3, -0.7, 1.1, -2.0, 0.4, 0.2;
  Eigen::MatrixXd lhs = matrix_exp(A * 1.7);
  Eigen::MatrixXd rhs = matrix_exp(A * 0.9) * matrix_exp(A * 0.8);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());

  Trace closed = matrix_exp_solution(quarter_identity(2), W, uniform_times(10.0, 0.5));
  for (std::size_t k = 0; k < closed.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(std::fabs(closed.states[k][i] - 2 * W[i] * std::sin(closed.times[k] / 2)) < 1e-12);

  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  DeviationAtPoint d = evaluate_deviation(kcc_deviation(m), m, mu, {2.0, -1.0}, {0.0, 0.0});
  std::vector<double> Wm{1e-5, 1e-4};
  Trace rk = integrate_deviation(d, Wm, 10.0, 1e-3);
  Trace ex = matrix_exp_solution(d, Wm, rk.times);
  double err = 0.0;
  for (std::size_t k = 0; k < rk.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i) err = std::max(err, std::fabs(rk.states[k][i] - ex.states[k][i]));
  CHECK(err < 1e-7);

  CHECK_THROWS(matrix_exp(Eigen::MatrixXd::Zero(2, 3)));
}

TEST_CASE("focusing diagnostic", "[focusing]") {
  std::vector<double> W{1e-5, 1e-4};
  Trace tr = integrate_deviation(quarter_identity(2), W, 1.0, 1e-3);
  FocusingProfile p = focusing_profile(tr, W);
  CHECK(p.verdict == Focusing::Bunching);
  CHECK(p.probe_samples == 100);
  for (std::size_t k = 0; k < p.times.size(); ++k)
    CHECK(std::fabs(p.norm_sq[k] - 4 * std::pow(std::sin(p.times[k] / 2), 2)) < 1e-10);

  // xi = W t gives norm_sq = t^2 exactly on the boundary.
  DeviationAtPoint zero = deviation_blocks(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2));
  CHECK(focusing_profile(integrate_deviation(zero, W, 1.0, 1e-3), W).verdict == Focusing::Mixed);

  DeviationAtPoint repel = deviation_blocks(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2));
  CHECK(focusing_profile(integrate_deviation(repel, W, 1.0, 1e-3), W).verdict == Focusing::Dispersing);

  Trace coarse = integrate_deviation(zero, W, 1.0, 0.25);
  CHECK_THROWS_AS(focusing_profile(coarse, W), std::invalid_argument);
  CHECK_THROWS_AS(focusing_profile(tr, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("perturbation oracle", "[oracle]") {
  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  std::vector<double> W{0.6, 0.8};
  Trace base = integrate(m, mu, {-2.0, 1.0}, {0.0, 0.0}, 5.0, 1e-3);
  Trace orc = perturbation_oracle(m, mu, base, W, 1e-6, 5.0, 1e-3);
  Trace dev = integrate_deviation(m, mu, {-2.0, 1.0}, W, 5.0, 1e-3);
  double err = 0.0;
  for (std::size_t k = 0; k < dev.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i) err = std::max(err, std::fabs(orc.states[k][i] - dev.states[k][i]));
  CHECK(err < 1e-4);

  // Linear system: the oracle is exact up to rounding for any eta.
  Model tr = tractor_seat();
  Binding tmu = binding(tractor_case(9));
  std::vector<double> Wt{1e-5, 1e-4, 1e-4};
  Trace tbase = integrate(tr, tmu, {0, 0, 0}, {0, 0, 0}, 1.0, 1e-4);
  Trace tdev = integrate_deviation(tr, tmu, {0, 0, 0}, Wt, 1.0, 1e-4);
  for (double eta : {1e-3, 1.0, 1e3}) {
    Trace o = perturbation_oracle(tr, tmu, tbase, Wt, eta, 1.0, 1e-4);
    double e = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k)
      for (std::size_t i = 0; i < 3; ++i) {
        e = std::max(e, std::fabs(o.states[k][i] - tdev.states[k][i]));
        scale = std::max(scale, std::fabs(tdev.states[k][i]));
      }
    CHECK(e <= 1e-9 * scale);
  }

  CHECK_THROWS_AS(perturbation_oracle(m, mu, base, W, 0.0, 5.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate_deviation(m, mu, {-2.0, 1.0}, {0.0, 0.0}, 5.0, 1e-3), std::invalid_argument);
}

TEST_CASE("CSV output is deterministic", "[csv]") {
  Model m = wound_strings();
  Binding mu = binding(m.defaults);
  auto render = [&] {
    std::ostringstream os;
    write_trace_csv(os, integrate(m, mu, {2.0, 1.0}, {1e-5, 2e-5}, 2.0, 1e-2));
    std::vector<double> W{1e-5, 1e-4};
    write_focusing_csv(os, focusing_profile(integrate_deviation(m, mu, {-2.0, 1.0}, W, 1.0, 1e-3), W));
    return os.str();
  };
  std::string a = render();
  CHECK(a == render());
  CHECK(a.rfind("t,x1,x2,y1,y2\n", 0) == 0);
  CHECK(a.find("t,norm_sq,t_sq\n") != std::string::npos);
}
