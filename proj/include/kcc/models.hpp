#pragma once

// Built-in models and the line-oriented model file format:
//
//   model <name>
//   mode kcc|linear-accel
//   params p1[=rational] p2 ...
//   vars x1 x2 ...
//   G1 = <expr>                  (kcc mode, one per dimension)
//   M[i][j] = <expr>, f[i] = ...  (linear-accel mode, M x'' + f = 0)
//
// Velocities y1..yn are implied. '#' starts a comment.

#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "kcc/kcc.hpp"
#include "kcc/model.hpp"
#include "kcc/parse.hpp"

namespace kcc {

inline Model wound_strings() {
  return make_model(
      "wound_strings", {"x1", "x2"}, {"a", "C", "m"},
      {parse("x1/(2*a^2*x1^2 + 2*m^2*x2^2)*(a^2*(1 - y1^2) - y2^2 - C^2*(a^2*x1^2 + m^2*x2^2)^2/(x1^4*x2^2))"),
       parse("x2/(2*a^2*x1^2 + 2*m^2*x2^2)*(m^2*(a^2*(1 - y1^2) - y2^2) - a^2*C^2*(a^2*x1^2 + m^2*x2^2)^2/(x1^2*x2^4))")},
      {{"a", Rational(1, 2)}, {"C", 1}, {"m", -1}});
}

inline Model airfoil() {
  return make_model(
      "airfoil", {"x1", "x2"}, {"Minf", "V"},
      {parse("1/(2100*V^2*Minf)*(6*V^2*Minf^2*x2^3 - 6000*Minf*x2^3 + 30*V^2*x2 + 30*V^2*y1 + 19*V^2*y2"
             " + 240*V*Minf*y1 - 60*V*Minf*y2 + 1200*Minf*x1 - 300*Minf*x2)"),
       parse("-1/(5250*V^2*Minf)*(18*V^2*Minf^2*x2^3 - 60000*Minf*x2^3 + 90*V^2*x2 + 90*V^2*y1 + 85*V^2*y2"
             " + 300*V*Minf*y1 - 600*V*Minf*y2 + 1500*Minf*x1 - 3000*Minf*x2)")},
      {{"Minf", Rational(2017, 256)}, {"V", Rational(83, 4)}});
}

inline const std::vector<std::string>& tractor_params() {
  static const std::vector<std::string> p{"M1", "M2", "M3", "K1", "K2", "K3", "C1", "C2", "C3"};
  return p;
}

/// Table A case (1..9) with K3 = C3 = 1000.
inline std::map<std::string, Rational> tractor_case(int k) {
  struct Row {
    Rational M2, M3, K1, C1;
  };
  static const Row rows[9] = {
      {Rational(325, 7), Rational(130, 7), 22600, 920}, {Rational(325, 7), Rational(130, 7), 15000, 750},
      {Rational(325, 7), Rational(130, 7), 25000, 750}, {Rational(325, 7), Rational(130, 7), 20000, 500},
      {Rational(325, 7), Rational(130, 7), 20000, 750}, {Rational(325, 7), Rational(130, 7), 20000, 1000},
      {36, 14, 20000, 750},                             {46, 19, 20000, 750},
      {57, 23, 20000, 750},
  };
  if (k < 1 || k > 9) throw ModelError("Table A has cases 1..9");
  const Row& r = rows[k - 1];
  return {{"M1", Rational(31, 5)}, {"M2", r.M2},  {"M3", r.M3},  {"K1", r.K1},  {"K2", 37730},
          {"K3", 1000},            {"C1", r.C1},  {"C2", 159},   {"C3", 1000}};
}

/// Mass matrix and force vector of the seat-operator equations, M x'' + f = 0.
inline std::pair<ExprMatrix, ExprVector> tractor_linear_accel() {
  ExprMatrix M = zero_matrix(3, 3);
  M[0][0] = symbol("M1");
  M[1][1] = symbol("M2");
  M[2][2] = symbol("M3");
  ExprVector f{parse("C1*y1 + K1*x1 - C2*(y2 - y1) - K2*(x2 - x1)"),
               parse("C2*(y2 - y1) + K2*(x2 - x1) - C3*(y3 - y2) - K3*(x3 - x2)"),
               parse("-C3*(y3 - y2) - K3*(x3 - x2)")};
  return {M, f};
}

inline Model tractor_seat() {
  return make_model("tractor_seat", {"x1", "x2", "x3"}, tractor_params(),
                    {parse("1/2*((K1 + K2)/M1*x1 - K2/M1*x2 + (C1 + C2)/M1*y1 - C2/M1*y2)"),
                     parse("1/2*(-K2/M2*x1 + (K2 + K3)/M2*x2 - K3/M2*x3 - C2/M2*y1 + (C2 + C3)/M2*y2 - C3/M2*y3)"),
                     parse("1/2*(K3/M3*x2 - K3/M3*x3 + C3/M3*y2 - C3/M3*y3)")},
                    tractor_case(1));
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"wound_strings", "airfoil", "tractor_seat"};
  return names;
}

inline bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

inline Model builtin(const std::string& name) {
  if (name == "wound_strings") return wound_strings();
  if (name == "airfoil") return airfoil();
  if (name == "tractor_seat") return tractor_seat();
  throw ModelError("unknown built-in model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Model files.

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> w;
  for (std::string t; is >> t;) w.push_back(t);
  return w;
}

inline bool valid_identifier(const std::string& s) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
  return std::regex_match(s, re);
}

}  // namespace detail

/// Parses model file text. `origin` names the source in error messages.
inline Model load_string(const std::string& text, const std::string& origin = "<model>") {
  std::string name;
  std::string mode = "kcc";
  std::vector<std::string> params;
  std::map<std::string, Rational> defaults;
  std::vector<std::string> vars;
  std::map<std::size_t, std::pair<Expr, int>> G;
  std::map<std::pair<std::size_t, std::size_t>, Expr> M;
  std::map<std::size_t, Expr> f;

  static const std::regex g_re(R"(G([0-9]+))");
  static const std::regex m_re(R"(M\[([0-9]+)\]\[([0-9]+)\])");
  static const std::regex f_re(R"(f\[([0-9]+)\])");

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> ModelError {
    return ModelError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto expr_at = [&](const std::string& src, std::size_t col0) {
    try {
      return parse(src);
    } catch (const ParseError& e) {
      throw ModelError(origin + ":" + std::to_string(lineno) + ":" + std::to_string(col0 + e.column()) + ": " +
                       e.what());
    }
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    if (detail::trim(line).empty()) continue;
    auto eq = line.find('=');
    auto w = detail::words(line);
    const std::string& head = w.front();
    if (head == "model") {
      if (w.size() != 2) throw fail("expected 'model <name>'");
      name = w[1];
    } else if (head == "mode") {
      if (w.size() != 2 || (w[1] != "kcc" && w[1] != "linear-accel")) throw fail("expected 'mode kcc|linear-accel'");
      mode = w[1];
    } else if (head == "params") {
      for (std::size_t k = 1; k < w.size(); ++k) {
        std::string p = w[k];
        auto e = p.find('=');
        std::string pname = p.substr(0, e);
        if (!detail::valid_identifier(pname)) throw fail("bad parameter name '" + pname + "'");
        params.push_back(pname);
        if (e != std::string::npos) {
          try {
            defaults[pname] = parse_rational(p.substr(e + 1));
          } catch (const std::exception&) {
            throw fail("bad default value for parameter '" + pname + "'");
          }
        }
      }
    } else if (head == "vars") {
      for (std::size_t k = 1; k < w.size(); ++k) {
        if (!detail::valid_identifier(w[k])) throw fail("bad variable name '" + w[k] + "'");
        vars.push_back(w[k]);
      }
    } else if (eq != std::string::npos) {
      std::string lhs = detail::trim(line.substr(0, eq));
      std::string rhs = line.substr(eq + 1);
      std::size_t col0 = eq + 1;
      std::smatch mt;
      if (std::regex_match(lhs, mt, g_re)) {
        std::size_t i = std::stoul(mt[1]);
        if (i == 0) throw fail("equation indices start at 1");
        if (G.count(i)) throw fail("duplicate definition of " + lhs);
        G.emplace(i, std::make_pair(expr_at(rhs, col0), lineno));
      } else if (std::regex_match(lhs, mt, m_re)) {
        std::size_t i = std::stoul(mt[1]), j = std::stoul(mt[2]);
        if (i == 0 || j == 0) throw fail("matrix indices start at 1");
        if (M.count({i, j})) throw fail("duplicate definition of " + lhs);
        M.emplace(std::make_pair(i, j), expr_at(rhs, col0));
      } else if (std::regex_match(lhs, mt, f_re)) {
        std::size_t i = std::stoul(mt[1]);
        if (i == 0) throw fail("vector indices start at 1");
        if (f.count(i)) throw fail("duplicate definition of " + lhs);
        f.emplace(i, expr_at(rhs, col0));
      } else {
        throw fail("unknown definition '" + lhs + "'");
      }
    } else {
      throw fail("unrecognized line '" + detail::trim(line) + "'");
    }
  }

  lineno = 0;
  if (name.empty()) throw fail("missing 'model <name>' line");
  if (vars.empty()) throw fail("missing 'vars' line");
  const std::size_t n = vars.size();
  for (const auto& v : velocity_names(n))
    for (const auto& d : vars)
      if (d == v) throw fail("variable name '" + d + "' clashes with an implied velocity");

  if (mode == "kcc") {
    if (!M.empty() || !f.empty()) throw fail("M[i][j] and f[i] lines need 'mode linear-accel'");
    if (G.size() != n || G.rbegin()->first != n)
      throw fail("expected G1..G" + std::to_string(n) + " for " + std::to_string(n) + " variables");
    std::vector<Expr> g;
    for (const auto& [i, e] : G) g.push_back(e.first);
    return make_model(name, vars, params, g, defaults);
  }
  if (!G.empty()) throw fail("G lines need 'mode kcc'");
  ExprMatrix mass = zero_matrix(n, n);
  for (const auto& [ij, e] : M) {
    if (ij.first > n || ij.second > n) throw fail("mass-matrix index out of range for " + std::to_string(n) + " variables");
    mass[ij.first - 1][ij.second - 1] = e;
  }
  if (f.size() != n || f.rbegin()->first != n) throw fail("expected f[1]..f[" + std::to_string(n) + "]");
  ExprVector force;
  for (const auto& [i, e] : f) force.push_back(e);
  // Undeclared symbols are caught before the symbolic inverse.
  Model probe;
  probe.name = name;
  probe.coords = vars;
  probe.velocities = velocity_names(n);
  probe.params = params;
  probe.defaults = defaults;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> row = mass[i];
    row.push_back(force[i]);
    probe.G.push_back(add(row));
  }
  probe.validate();
  return to_standard_form(name, vars, params, mass, force, defaults);
}

inline Model load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_string(ss.str(), path);
}

/// Model file text in kcc mode.
inline std::string to_model_file(const Model& m) {
  std::ostringstream os;
  os << "model " << m.name << "\nmode kcc\nparams";
  for (const auto& p : m.params) {
    os << ' ' << p;
    if (auto it = m.defaults.find(p); it != m.defaults.end()) os << '=' << it->second.get_str();
  }
  os << "\nvars";
  for (const auto& x : m.coords) os << ' ' << x;
  os << '\n';
  for (std::size_t i = 0; i < m.dim(); ++i) os << 'G' << i + 1 << " = " << m.G[i] << '\n';
  return os.str();
}

/// A built-in name or a path to a model file.
inline Model resolve_model(const std::string& source) {
  if (is_builtin(source)) return builtin(source);
  if (source.find('/') == std::string::npos && source.find('.') == std::string::npos)
    throw ModelError("unknown built-in model '" + source + "'");
  return load(source);
}

}  // namespace kcc
