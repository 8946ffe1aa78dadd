#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "kcc/expr.hpp"

namespace kcc {

/// A bound value: exact rational or floating point.
using Value = std::variant<Rational, double>;
using Binding = std::map<std::string, Value>;

inline double to_double(const Value& v) {
  if (const auto* r = std::get_if<Rational>(&v)) return r->get_d();
  return std::get<double>(v);
}

inline bool is_exact(const Value& v) { return std::holds_alternative<Rational>(v); }

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundSymbolError : public EvalError {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : EvalError("unbound symbol '" + name + "'"), symbol_(name) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

class ZeroDenominatorError : public EvalError {
 public:
  explicit ZeroDenominatorError(const std::string& subexpr)
      : EvalError("denominator evaluates to zero in " + subexpr), subexpression_(subexpr) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

namespace detail {

class Evaluator {
 public:
  explicit Evaluator(const Binding& b) : binding_(b) {}

  Value operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Value v = compute(e);
    memo_.emplace(e.id(), v);
    return v;
  }

 private:
  static Value plus(const Value& a, const Value& b) {
    if (is_exact(a) && is_exact(b)) return Rational(std::get<Rational>(a) + std::get<Rational>(b));
    return to_double(a) + to_double(b);
  }
  static Value times(const Value& a, const Value& b) {
    if (is_exact(a) && is_exact(b)) return Rational(std::get<Rational>(a) * std::get<Rational>(b));
    return to_double(a) * to_double(b);
  }
  static bool zero(const Value& v) {
    if (const auto* r = std::get_if<Rational>(&v)) return sgn(*r) == 0;
    return std::get<double>(v) == 0.0;
  }

  Value compute(const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant:
        return e.value();
      case Kind::Symbol: {
        auto it = binding_.find(e.name());
        if (it == binding_.end()) throw UnboundSymbolError(e.name());
        return it->second;
      }
      case Kind::Add: {
        Value acc = Rational(0);
        for (const auto& a : e.args()) acc = plus(acc, (*this)(a));
        return acc;
      }
      case Kind::Mul: {
        Value acc = Rational(1);
        for (const auto& a : e.args()) acc = times(acc, (*this)(a));
        return acc;
      }
      case Kind::Pow: {
        Value b = (*this)(e.args().front());
        long k = e.exponent();
        if (k < 0 && zero(b)) throw ZeroDenominatorError(kcc::to_string(e));
        if (const auto* r = std::get_if<Rational>(&b)) return rational_pow(*r, k);
        return std::pow(std::get<double>(b), static_cast<double>(k));
      }
      case Kind::Div: {
        Value d = (*this)(e.args()[1]);
        if (zero(d)) throw ZeroDenominatorError(kcc::to_string(e.args()[1]));
        Value n = (*this)(e.args()[0]);
        if (is_exact(n) && is_exact(d)) return Rational(std::get<Rational>(n) / std::get<Rational>(d));
        return to_double(n) / to_double(d);
      }
    }
    return Rational(0);
  }

  const Binding& binding_;
  std::unordered_map<const Node*, Value> memo_;
};

}  // namespace detail

/// Evaluates e under b. The result is exact when every binding the
/// evaluation touches is rational, floating otherwise.
inline Value evaluate(const Expr& e, const Binding& b) { return detail::Evaluator(b)(e); }

inline double evaluate_double(const Expr& e, const Binding& b) { return to_double(evaluate(e, b)); }

/// Flattened, common-subexpression-shared program for repeated floating
/// evaluation. Symbols are resolved to slots once at compile time; symbols
/// listed in `fixed` are folded to constants.
class CompiledExpr {
 public:
  CompiledExpr() = default;

  CompiledExpr(const Expr& e, const std::vector<std::string>& slots, const Binding& fixed = {}) {
    std::map<std::string, std::size_t> slot_of;
    for (std::size_t i = 0; i < slots.size(); ++i) slot_of.emplace(slots[i], i);
    std::unordered_map<const Node*, std::size_t> reg;
    root_ = emit(e, slot_of, fixed, reg);
  }

  /// Value at `x`; throws ZeroDenominatorError when a denominator's
  /// magnitude drops to `den_floor` or below.
  double operator()(std::span<const double> x, double den_floor = 0.0) const {
    double min_den = std::numeric_limits<double>::infinity();
    double v = run(x, min_den);
    if (min_den <= den_floor) throw ZeroDenominatorError("compiled expression (|den| = " + std::to_string(min_den) + ")");
    return v;
  }

  /// Value and the smallest denominator magnitude met along the way.
  double eval(std::span<const double> x, double& min_den) const {
    min_den = std::numeric_limits<double>::infinity();
    return run(x, min_den);
  }

 private:
  enum class Op : std::uint8_t { Const, Slot, Add, Mul, PowInt, Div };
  struct Instr {
    Op op;
    double c = 0.0;
    long k = 0;
    std::size_t a = 0;
    std::vector<std::size_t> args;
  };

  std::size_t emit(const Expr& e, const std::map<std::string, std::size_t>& slot_of, const Binding& fixed,
                   std::unordered_map<const Node*, std::size_t>& reg) {
    if (auto it = reg.find(e.id()); it != reg.end()) return it->second;
    Instr in;
    switch (e.kind()) {
      case Kind::Constant:
        in.op = Op::Const;
        in.c = e.value().get_d();
        break;
      case Kind::Symbol: {
        if (auto f = fixed.find(e.name()); f != fixed.end()) {
          in.op = Op::Const;
          in.c = to_double(f->second);
        } else {
          auto s = slot_of.find(e.name());
          if (s == slot_of.end()) throw UnboundSymbolError(e.name());
          in.op = Op::Slot;
          in.a = s->second;
        }
        break;
      }
      case Kind::Add:
      case Kind::Mul:
        in.op = e.kind() == Kind::Add ? Op::Add : Op::Mul;
        for (const auto& a : e.args()) in.args.push_back(emit(a, slot_of, fixed, reg));
        break;
      case Kind::Pow:
        in.op = Op::PowInt;
        in.k = e.exponent();
        in.a = emit(e.args().front(), slot_of, fixed, reg);
        break;
      case Kind::Div:
        in.op = Op::Div;
        in.args = {emit(e.args()[0], slot_of, fixed, reg), emit(e.args()[1], slot_of, fixed, reg)};
        break;
    }
    code_.push_back(std::move(in));
    std::size_t idx = code_.size() - 1;
    reg.emplace(e.id(), idx);
    return idx;
  }

  double run(std::span<const double> x, double& min_den) const {
    thread_local std::vector<double> r;
    r.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      switch (in.op) {
        case Op::Const:
          r[i] = in.c;
          break;
        case Op::Slot:
          r[i] = x[in.a];
          break;
        case Op::Add: {
          double s = 0.0;
          for (auto a : in.args) s += r[a];
          r[i] = s;
          break;
        }
        case Op::Mul: {
          double p = 1.0;
          for (auto a : in.args) p *= r[a];
          r[i] = p;
          break;
        }
        case Op::PowInt: {
          double b = r[in.a];
          if (in.k < 0) min_den = std::min(min_den, std::fabs(b));
          r[i] = int_pow(b, in.k);
          break;
        }
        case Op::Div: {
          double d = r[in.args[1]];
          min_den = std::min(min_den, std::fabs(d));
          r[i] = r[in.args[0]] / d;
          break;
        }
      }
    }
    return code_.empty() ? 0.0 : r[root_];
  }

  static double int_pow(double b, long k) {
    bool inv = k < 0;
    unsigned long e = inv ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
    double result = 1.0;
    while (e) {
      if (e & 1UL) result *= b;
      b *= b;
      e >>= 1U;
    }
    return inv ? 1.0 / result : result;
  }

  std::vector<Instr> code_;
  std::size_t root_ = 0;
};

}  // namespace kcc
