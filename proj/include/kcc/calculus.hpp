#pragma once

#include <map>
#include <string>
#include <unordered_map>

#include "kcc/expr.hpp"

namespace kcc {

namespace detail {

class Differentiator {
 public:
  explicit Differentiator(std::string var) : var_(std::move(var)) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.id(), d);
    keep_.push_back(e);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant:
        return constant(0);
      case Kind::Symbol:
        return constant(e.name() == var_ ? 1 : 0);
      case Kind::Add: {
        std::vector<Expr> terms;
        terms.reserve(e.args().size());
        for (const auto& a : e.args()) terms.push_back((*this)(a));
        return add(terms);
      }
      case Kind::Mul: {
        const auto& f = e.args();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < f.size(); ++i) {
          Expr di = (*this)(f[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> prod(f.begin(), f.end());
          prod[i] = di;
          terms.push_back(mul(prod));
        }
        return add(terms);
      }
      case Kind::Pow: {
        const Expr& b = e.args().front();
        Expr db = (*this)(b);
        if (db.is_zero()) return constant(0);
        return mul({constant(e.exponent()), pow(b, e.exponent() - 1), db});
      }
      case Kind::Div: {
        const Expr& u = e.args()[0];
        const Expr& w = e.args()[1];
        Expr du = (*this)(u);
        Expr dw = (*this)(w);
        if (dw.is_zero()) return div(du, w);
        Expr rhs = mul({u, dw});
        if (du.is_zero()) return neg(div(rhs, pow(w, 2)));
        return div(sub(mul({du, w}), rhs), pow(w, 2));
      }
    }
    return constant(0);
  }

  std::string var_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;  // pins memo keys for the lifetime of the pass
};

}  // namespace detail

/// Partial derivative of e with respect to the symbol v. The result shares
/// subtrees with e and is not canonicalized.
inline Expr differentiate(const Expr& e, const std::string& v) { return detail::Differentiator(v)(e); }

/// Replaces every bound symbol; unbound symbols are left in place.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  if (bindings.empty()) return e;
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Expr r;
    switch (x.kind()) {
      case Kind::Constant:
        r = x;
        break;
      case Kind::Symbol: {
        auto it = bindings.find(x.name());
        r = it == bindings.end() ? x : it->second;
        break;
      }
      case Kind::Add:
      case Kind::Mul: {
        std::vector<Expr> args;
        args.reserve(x.args().size());
        for (const auto& a : x.args()) args.push_back(go(a));
        r = x.kind() == Kind::Add ? add(args) : mul(args);
        break;
      }
      case Kind::Pow:
        r = pow(go(x.args().front()), x.exponent());
        break;
      case Kind::Div:
        r = div(go(x.args()[0]), go(x.args()[1]));
        break;
    }
    memo.emplace(x.id(), r);
    return r;
  };
  return go(e);
}

}  // namespace kcc
