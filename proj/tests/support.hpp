#pragma once

#include <random>
#include <string>
#include <vector>

#include "kcc/expr.hpp"
#include "kcc/evaluate.hpp"

namespace kcc::testing {

/// Canonical n/d; mpq_class(n, d) does not reduce.
inline Rational ratio(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Random rational-function expressions over a fixed symbol set.
class ExprGenerator {
 public:
  explicit ExprGenerator(unsigned seed, std::vector<std::string> vars = {"u", "v", "w"})
      : rng_(seed), vars_(std::move(vars)) {}

  Expr operator()(int depth = 4) { return gen(depth); }

  Rational small_rational() {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
    return ratio(num(rng_), den(rng_));
  }

  std::mt19937& rng() { return rng_; }
  const std::vector<std::string>& vars() const { return vars_; }

 private:
  Expr leaf() {
    std::uniform_int_distribution<int> pick(0, 3);
    if (pick(rng_) == 0) return constant(small_rational());
    std::uniform_int_distribution<std::size_t> v(0, vars_.size() - 1);
    return symbol(vars_[v(rng_)]);
  }

  Expr gen(int depth) {
    if (depth <= 0) return leaf();
    std::uniform_int_distribution<int> op(0, 5);
    switch (op(rng_)) {
      case 0:
        return leaf();
      case 1:
      case 2: {
        std::uniform_int_distribution<int> k(2, 3);
        std::vector<Expr> a;
        for (int i = k(rng_); i > 0; --i) a.push_back(gen(depth - 1));
        return add(a);
      }
      case 3: {
        std::uniform_int_distribution<int> k(2, 3);
        std::vector<Expr> a;
        for (int i = k(rng_); i > 0; --i) a.push_back(gen(depth - 1));
        return mul(a);
      }
      case 4: {
        std::uniform_int_distribution<long> e(-2, 3);
        return pow(gen(depth - 1), e(rng_));
      }
      default:
        return div(gen(depth - 1), gen(depth - 1));
    }
  }

  std::mt19937 rng_;
  std::vector<std::string> vars_;
};

}  // namespace kcc::testing
