#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcc/expr.hpp"

namespace kcc {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n second-order ODEs x_i'' + 2 G^i(mu; x, y) = 0 with y = x'.
struct Model {
  std::string name;
  std::vector<std::string> coords;      // x_1..x_n
  std::vector<std::string> velocities;  // y_1..y_n
  std::vector<std::string> params;
  std::map<std::string, Rational> defaults;
  std::vector<Expr> G;

  std::size_t dim() const { return G.size(); }

  /// Declaration order: coordinates, velocities, parameters.
  std::vector<std::string> var_order() const {
    std::vector<std::string> v = coords;
    v.insert(v.end(), velocities.begin(), velocities.end());
    v.insert(v.end(), params.begin(), params.end());
    return v;
  }

  /// Coordinates followed by parameters (the y = 0 slice).
  std::vector<std::string> position_param_order() const {
    std::vector<std::string> v = coords;
    v.insert(v.end(), params.begin(), params.end());
    return v;
  }

  void validate() const {
    const std::size_t n = G.size();
    if (n == 0) throw ModelError("model '" + name + "' has no equations");
    if (coords.size() != n || velocities.size() != n)
      throw ModelError("model '" + name + "': dimension mismatch between variables and equations");
    auto names = var_order();
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ModelError("model '" + name + "': duplicate symbol declaration");
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& s : free_symbols(G[i])) {
        if (!std::binary_search(sorted.begin(), sorted.end(), s))
          throw ModelError("model '" + name + "': undeclared symbol '" + s + "' in G" + std::to_string(i + 1));
      }
    }
    for (const auto& [p, v] : defaults)
      if (std::find(params.begin(), params.end(), p) == params.end())
        throw ModelError("model '" + name + "': default given for unknown parameter '" + p + "'");
  }
};

inline std::vector<std::string> velocity_names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("y" + std::to_string(i));
  return v;
}

inline Model make_model(std::string name, std::vector<std::string> coords, std::vector<std::string> params,
                        std::vector<Expr> G, std::map<std::string, Rational> defaults = {}) {
  Model m;
  m.name = std::move(name);
  m.velocities = velocity_names(coords.size());
  m.coords = std::move(coords);
  m.params = std::move(params);
  m.G = std::move(G);
  m.defaults = std::move(defaults);
  m.validate();
  return m;
}

}  // namespace kcc
