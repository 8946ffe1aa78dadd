#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kcc/calculus.hpp"
#include "kcc/canonical.hpp"
#include "kcc/evaluate.hpp"
#include "kcc/models.hpp"
#include "kcc/parse.hpp"
#include "support.hpp"

using namespace kcc;

namespace {

Rational exact(const Expr& e, const Binding& b) { return std::get<Rational>(evaluate(e, b)); }

}  // namespace

TEST_CASE("parse builds the expected trees", "[parse]") {
  Expr e = parse("x1^2 + 2*x2");
  REQUIRE(e.kind() == Kind::Add);
  REQUIRE(e.args().size() == 2);
  CHECK(structurally_equal(e.args()[0], pow(symbol("x1"), 2)));
  CHECK(structurally_equal(e.args()[1], mul({constant(2), symbol("x2")})));

  Expr f = parse("a^2*(1 - y1^2)");
  REQUIRE(f.kind() == Kind::Mul);
  CHECK(structurally_equal(f.args()[0], pow(symbol("a"), 2)));
  const Expr& s = f.args()[1];
  REQUIRE(s.kind() == Kind::Add);
  CHECK(s.args()[0].is_one());
  CHECK(structurally_equal(s.args()[1], neg(pow(symbol("y1"), 2))));
}

TEST_CASE("rational and decimal literals are exact", "[parse]") {
  CHECK(parse("83/4").value() == Rational(83, 4));
  CHECK(parse("0.25").value() == Rational(1, 4));
  CHECK(parse("-1.5").value() == Rational(-3, 2));
  CHECK(parse_rational("2017/256") == Rational(2017, 256));
  CHECK(parse("2^-2").value() == Rational(1, 4));
}

TEST_CASE("parse errors carry location and expected tokens", "[parse]") {
  try {
    parse("x^y");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("non-integer exponent") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("x^(2)"), ParseError);
  CHECK_THROWS_AS(parse("x^1.5"), ParseError);
  try {
    parse("1 +\n (x *");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("x y"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("3 $ 4"), ParseError);
}

TEST_CASE("eager simplifications", "[expr]") {
  Expr x = symbol("x");
  CHECK(structurally_equal(x + constant(0), x));
  CHECK(structurally_equal(x * constant(1), x));
  CHECK((x * constant(0)).is_zero());
  CHECK(structurally_equal(constant(2) + constant(3), constant(5)));
  CHECK(structurally_equal(pow(x, 1), x));
  CHECK(pow(x, 0).is_one());
  CHECK(structurally_equal(pow(pow(x, 2), 3), pow(x, 6)));
  CHECK((x + (x + x)).args().size() == 3);
  CHECK(div(constant(0), x).is_zero());
}

TEST_CASE("differentiate: basic rules", "[calculus]") {
  Expr e = parse("a^2*(1 - y1^2)");
  CHECK(semantically_equal(differentiate(e, "y1"), parse("-2*a^2*y1")));
  CHECK(differentiate(constant(5), "v").is_zero());
  CHECK(differentiate(parse("x*y + 3"), "z").is_zero());
  CHECK(semantically_equal(differentiate(parse("1/(x^2 + 1)"), "x"), parse("-2*x/(x^2 + 1)^2")));
  CHECK(semantically_equal(differentiate(parse("x^-3"), "x"), parse("-3*x^-4")));
  CHECK(semantically_equal(differentiate(parse("(x + y)/(x - y)"), "x"), parse("-2*y/(x - y)^2")));
}

TEST_CASE("differentiate wound-strings G1 against finite differences", "[calculus]") {
  Model m = wound_strings();
  Expr d = differentiate(m.G[0], "x1");
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(5, 30);
  const Rational h(1, 1000000);
  for (int k = 0; k < 10; ++k) {
    Binding b{{"a", testing::ratio(pick(rng), 20)}, {"C", testing::ratio(pick(rng), 10)}, {"m", testing::ratio(-pick(rng), 10)},
              {"x1", testing::ratio(pick(rng), 7)},  {"x2", testing::ratio(pick(rng), 9)},  {"y1", testing::ratio(pick(rng), 31)},
              {"y2", testing::ratio(pick(rng), 29)}};
    Rational sym = exact(d, b);
    Binding lo = b, hi = b;
    lo["x1"] = std::get<Rational>(b["x1"]) - h;
    hi["x1"] = std::get<Rational>(b["x1"]) + h;
    Rational fd = (exact(m.G[0], hi) - exact(m.G[0], lo)) / (2 * h);
    double rel = std::fabs(Rational(fd - sym).get_d()) / std::fabs(sym.get_d());
    CHECK(rel < 1e-7);
  }
}

TEST_CASE("substitute", "[calculus]") {
  CHECK(substitute(parse("x1*y1"), {{"y1", constant(0)}}).is_zero());
  Expr e = parse("x1 + y2");
  CHECK(structurally_equal(substitute(e, {}), e));
  CHECK(semantically_equal(substitute(parse("x^2 + y"), {{"x", parse("y + 1")}}), parse("y^2 + 3*y + 1")));

  // Wound strings at y = 0: the numerator is -1/2 times the fixed-point
  // polynomial.
  Model m = wound_strings();
  Expr g = substitute(m.G[0], {{"y1", constant(0)}, {"y2", constant(0)}});
  auto vars = std::vector<std::string>{"x1", "x2", "a", "C", "m"};
  CanonicalRational c = canonicalize(g, vars);
  Polynomial g11 = canonicalize(parse("C^2*a^4*x1^4 + 2*C^2*a^2*m^2*x1^2*x2^2 + C^2*m^4*x2^4 - a^2*x1^4*x2^2"), vars).num;
  CHECK(c.num == g11.scaled(Rational(-1, 2)));
  CHECK(equivalent(c, canonicalize(parse("-(C^2*a^4*x1^4 + 2*C^2*a^2*m^2*x1^2*x2^2 + C^2*m^4*x2^4 - a^2*x1^4*x2^2)"
                                         "/(2*x1^3*(a^2*x1^2 + m^2*x2^2)*x2^2)"),
                                   vars)));
}

TEST_CASE("canonicalize", "[canonical]") {
  Expr q = parse("(x1^2 - x2^2)/(x1 - x2)");
  CHECK(semantically_equal(q, parse("x1 + x2")));
  CHECK(canonicalize(parse("0/(x1*x2)")).is_zero());
  CHECK_THROWS_AS(canonicalize(parse("1/(x - x)")), CanonicalizeError);

  CanonicalRational c = canonicalize(parse("(6*x + 4)/(2*y)"), {"x", "y"});
  CHECK(c.den.terms().front().coeff > 0);
  CHECK(c.den.content() == 1);

  // Graded lexicographic order over the declared variables.
  CHECK(canonicalize(parse("x2 + x1^2 + x1"), {"x1", "x2"}).to_string() == "x1^2 + x1 + x2");
  CHECK(canonicalize(parse("x2 + x1^2 + x1"), {"x2", "x1"}).to_string() == "x1^2 + x2 + x1");
}

TEST_CASE("evaluate", "[evaluate]") {
  CHECK(exact(parse("x1^2 + x2"), {{"x1", Rational(2)}, {"x2", Rational(1)}}) == 5);
  Model m = wound_strings();
  Binding b{{"a", Rational(1, 2)}, {"C", Rational(1)}, {"m", Rational(-1)}, {"x1", Rational(2)},
            {"x2", Rational(1)},   {"y1", Rational(0)}, {"y2", Rational(0)}};
  CHECK(exact(m.G[0], b) == 0);
  CHECK(exact(m.G[1], b) == 0);
  try {
    evaluate(parse("1/x1"), {{"x1", Rational(0)}});
    FAIL("no error");
  } catch (const ZeroDenominatorError& e) {
    CHECK(e.subexpression() == "x1");
  }
  CHECK_THROWS_AS(evaluate(parse("x + y"), {{"x", Rational(1)}}), UnboundSymbolError);
  Value v = evaluate(parse("x/3"), {{"x", 1.0}});
  REQUIRE(std::holds_alternative<double>(v));
  CHECK(std::get<double>(v) == Catch::Approx(1.0 / 3.0));
  CHECK(std::holds_alternative<Rational>(evaluate(parse("x/3"), {{"x", Rational(1)}, {"y", 1.0}})));
}

TEST_CASE("compiled evaluation is bit-for-bit reproducible", "[evaluate]") {
  Model m = wound_strings();
  Binding fixed{{"a", Rational(1, 2)}, {"C", Rational(1)}, {"m", Rational(-1)}};
  CompiledExpr c1(m.G[0], {"x1", "x2", "y1", "y2"}, fixed);
  CompiledExpr c2(m.G[0], {"x1", "x2", "y1", "y2"}, fixed);
  std::vector<double> s{1.3, -0.7, 0.2, 0.1};
  double a = c1(s);
  double b = c2(s);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  CHECK(a == Catch::Approx(evaluate_double(m.G[0], {{"a", 0.5}, {"C", 1.0}, {"m", -1.0}, {"x1", 1.3}, {"x2", -0.7},
                                                   {"y1", 0.2}, {"y2", 0.1}}))
                 .epsilon(1e-12));
  CHECK_THROWS_AS(c1(std::vector<double>{0.0, 1.0, 0.0, 0.0}), ZeroDenominatorError);
}

TEST_CASE("property: derivatives match finite differences on 200 random expressions", "[property][calculus]") {
  testing::ExprGenerator gen(2024);
  const Rational h(1, 1000000);
  int checked = 0;
  int attempts = 0;
  while (checked < 200 && attempts < 20000) {
    ++attempts;
    Expr e = gen(4);
    auto syms = free_symbols(e);
    if (syms.empty()) continue;
    const std::string v = syms[std::uniform_int_distribution<std::size_t>(0, syms.size() - 1)(gen.rng())];
    Binding b;
    for (const auto& s : gen.vars()) {
      Rational r = gen.small_rational();
      b[s] = r + Rational(1, 3);
    }
    Expr d = differentiate(e, v);
    try {
      // Keep clear of poles so the difference quotient is well defined.
      std::vector<double> pt;
      for (const auto& s : gen.vars()) pt.push_back(to_double(b[s]));
      double min_den = 0.0;
      CompiledExpr(e, gen.vars()).eval(pt, min_den);
      if (min_den < 0.05) continue;
      Rational sym = exact(d, b);
      auto shifted = [&](const Rational& dx) {
        Binding s = b;
        s[v] = std::get<Rational>(b[v]) + dx;
        return exact(e, s);
      };
      Rational d1 = (shifted(h) - shifted(-h)) / (2 * h);
      Rational d2 = (shifted(2 * h) - shifted(-2 * h)) / (4 * h);
      Rational richardson = (4 * d1 - d2) / 3;
      double scale = std::max(1.0, std::fabs(sym.get_d()));
      CHECK(std::fabs(Rational(d1 - sym).get_d()) / scale < 1e-6);
      CHECK(std::fabs(Rational(richardson - sym).get_d()) / scale < 1e-6);
      ++checked;
    } catch (const EvalError&) {
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("property: canonicalize is idempotent and printing round-trips", "[property][canonical]") {
  testing::ExprGenerator gen(99);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 150; ++k) {
    Expr e = gen(3);
    auto vars = gen.vars();
    CanonicalRational c;
    try {
      c = canonicalize(e, vars);
    } catch (const CanonicalizeError&) {
      continue;
    }
    CanonicalRational again = canonicalize(parse(c.to_string()), vars);
    CHECK(again.num == c.num);
    CHECK(again.den == c.den);
    CHECK(equivalent(canonicalize(parse(to_string(e)), vars), c));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("property: semantic equality is an equivalence relation", "[property][canonical]") {
  testing::ExprGenerator gen(5);
  std::vector<Expr> pool;
  while (pool.size() < 30) {
    Expr e = gen(3);
    try {
      canonicalize(e, gen.vars());
    } catch (const CanonicalizeError&) {
      continue;
    }
    pool.push_back(e);
    // Equal-by-construction partners.
    pool.push_back(parse("(" + to_string(e) + ")*(u^2 + 1)/(1 + u^2)"));
    pool.push_back(add({e, parse("v - v")}));
  }
  auto eq = [&](const Expr& a, const Expr& b) {
    return equivalent(canonicalize(a, gen.vars()), canonicalize(b, gen.vars()));
  };
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(eq(pool[i], pool[i]));
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      bool ij = eq(pool[i], pool[j]);
      CHECK(ij == eq(pool[j], pool[i]));
      if (!ij) continue;
      for (std::size_t k = j + 1; k < pool.size(); ++k)
        if (eq(pool[j], pool[k])) CHECK(eq(pool[i], pool[k]));
    }
  }
}
