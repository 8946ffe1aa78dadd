// kcc: KCC invariants, Jacobi stability and deviation simulations from the
// command line.
//
// Exit codes: 0 success, 1 usage, 2 model error, 3 indeterminate
// classification, 4 integration aborted.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kcc/models.hpp"
#include "kcc/numerics.hpp"
#include "kcc/stability.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace kcc;

enum Exit { kOk = 0, kUsage = 1, kModel = 2, kIndeterminate = 3, kIntegration = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string model = "wound_strings";
  std::string params;
  std::string out;
  std::string format = "text";
  double tol = kDefaultTolerance;
  std::string box;
  unsigned seeds = 9;
  double dt = 1e-3;
  double tend = 10.0;
  std::string W;
  std::string point;
  std::string y0;
  bool exit_k = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

Rational parse_value(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError("bad number '" + text + "' for " + what);
  }
}

std::vector<double> parse_vector(const std::string& text, std::size_t n, const std::string& what) {
  auto parts = split(text, ',');
  if (parts.size() != n) throw UsageError(what + " needs " + std::to_string(n) + " comma-separated values");
  std::vector<double> v;
  for (const auto& p : parts) {
    // Accept exponent notation as well as exact rationals.
    try {
      std::size_t used = 0;
      double d = std::stod(p, &used);
      if (used == p.size()) {
        v.push_back(d);
        continue;
      }
    } catch (const std::exception&) {
    }
    v.push_back(parse_value(p, what).get_d());
  }
  return v;
}

Binding bind_params(const Model& m, const std::string& text) {
  Binding b;
  for (const auto& [k, v] : m.defaults) b[k] = v;
  for (const auto& kv : split(text, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("parameter binding '" + kv + "' is not of the form name=value");
    std::string name = kv.substr(0, eq);
    if (std::find(m.params.begin(), m.params.end(), name) == m.params.end())
      throw UsageError("model '" + m.name + "' has no parameter '" + name + "'");
    b[name] = parse_value(kv.substr(eq + 1), name);
  }
  for (const auto& p : m.params)
    if (!b.count(p)) throw UsageError("parameter '" + p + "' is not bound");
  return b;
}

SearchBox parse_box(const std::string& text, std::size_t n) {
  if (text.empty()) return SearchBox::cube(n, -10, 10);
  auto parts = split(text, ',');
  if (parts.size() != 1 && parts.size() != n) throw UsageError("--box needs one lo:hi interval or one per variable");
  SearchBox box;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& iv = parts.size() == 1 ? parts[0] : parts[k];
    auto c = iv.find(':', 1);
    if (c == std::string::npos) throw UsageError("bad interval '" + iv + "', expected lo:hi");
    double lo = parse_value(iv.substr(0, c), "--box").get_d();
    double hi = parse_value(iv.substr(c + 1), "--box").get_d();
    if (!(lo < hi)) throw UsageError("empty interval '" + iv + "'");
    box.bounds.emplace_back(lo, hi);
  }
  return box;
}

std::string canon(const Expr& e, const std::vector<std::string>& vars) { return canonicalize(e, vars).to_string(); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string index_label(const std::string& name, const std::vector<std::size_t>& idx) {
  std::string s = name;
  for (auto i : idx) s += "[" + std::to_string(i + 1) + "]";
  return s;
}

// Flat (label, canonical string) listing and nested JSON of a tensor.
struct Dump {
  std::vector<std::pair<std::string, std::string>> lines;
  json nested;
};

Dump dump(const std::string& name, const ExprVector& v, const std::vector<std::string>& vars) {
  Dump d;
  d.nested = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string s = canon(v[i], vars);
    d.lines.emplace_back(index_label(name, {i}), s);
    d.nested.push_back(s);
  }
  return d;
}

template <class T>
Dump dump(const std::string& name, const std::vector<T>& t, const std::vector<std::string>& vars) {
  Dump d;
  d.nested = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    Dump inner = dump(name, t[i], vars);
    for (auto& [label, s] : inner.lines) d.lines.emplace_back(name + "[" + std::to_string(i + 1) + "]" + label.substr(name.size()), s);
    d.nested.push_back(inner.nested);
  }
  return d;
}

void emit_dumps(const Config& cfg, const Model& m, const std::vector<std::pair<std::string, Dump>>& dumps,
                std::ostream& os) {
  if (cfg.format == "json") {
    json j;
    j["model"] = m.name;
    j["variables"] = m.var_order();
    for (const auto& [key, d] : dumps) j[key] = d.nested;
    os << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    os << "entry,expression\n";
    for (const auto& [key, d] : dumps)
      for (const auto& [label, s] : d.lines) os << label << ",\"" << s << "\"\n";
  } else {
    os << "# model " << m.name << ", variables:";
    for (const auto& v : m.var_order()) os << ' ' << v;
    os << '\n';
    for (const auto& [key, d] : dumps) {
      os << "\n# " << key << '\n';
      for (const auto& [label, s] : d.lines) os << label << " = " << s << '\n';
    }
  }
}

// Output goes to --out when given (a file), stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_invariants(const Config& cfg) {
  Model m = resolve_model(cfg.model);
  auto vars = m.var_order();
  KccInvariants k = compute_invariants(m);
  DeviationSystem d = kcc_deviation(m);
  std::vector<std::pair<std::string, Dump>> dumps{
      {"N", dump("N", k.N, vars)},          {"Berwald", dump("G", k.berwald, vars)},
      {"P", dump("P", k.P, vars)},          {"epsilon", dump("eps", k.epsilon, vars)},
      {"torsion", dump("T", k.torsion, vars)}, {"riemann", dump("R", k.riemann, vars)},
      {"douglas", dump("D", k.douglas, vars)}, {"A21", dump("A21", d.A21, vars)},
      {"A22", dump("A22", d.A22, vars)}};
  Sink sink(cfg.out);
  emit_dumps(cfg, m, dumps, sink.stream());
  return kOk;
}

std::vector<double> base_point(const Config& cfg, const Model& m, const Binding& mu) {
  if (!cfg.point.empty()) return parse_vector(cfg.point, m.dim(), "--point");
  auto fps = find_fixed_points(m, mu, parse_box(cfg.box, m.dim()), {cfg.seeds});
  if (fps.empty()) throw UsageError("no fixed point found in the search box; pass --point");
  return fps.front().x;
}

int cmd_deviation(const Config& cfg) {
  Model m = resolve_model(cfg.model);
  auto vars = m.var_order();
  DeviationSystem d = kcc_deviation(m);
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  std::vector<std::pair<std::string, Dump>> dumps{{"A21", dump("A21", d.A21, vars)}, {"A22", dump("A22", d.A22, vars)}};
  if (cfg.format != "text") {
    emit_dumps(cfg, m, dumps, os);
    return kOk;
  }
  os << "# deviation equations of " << m.name << '\n';
  for (const auto& e : d.equations(vars)) os << e << '\n';
  emit_dumps(cfg, m, dumps, os);
  if (!cfg.point.empty()) {
    Binding mu = bind_params(m, cfg.params);
    auto x = parse_vector(cfg.point, m.dim(), "--point");
    auto at = evaluate_deviation(d, m, mu, x, std::vector<double>(m.dim(), 0.0));
    os << "\n# at x = (" << cfg.point << "), y = 0\nA21 =\n" << at.A21 << "\nA22 =\n" << at.A22 << '\n';
  }
  return kOk;
}

int cmd_fixed_points(const Config& cfg) {
  Model m = resolve_model(cfg.model);
  Binding mu = bind_params(m, cfg.params);
  auto fps = find_fixed_points(m, mu, parse_box(cfg.box, m.dim()), {cfg.seeds});
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  if (cfg.format == "json") {
    json j = json::array();
    for (const auto& f : fps) j.push_back({{"x", f.x}, {"residual", f.residual}, {"denom_margin", f.denom_margin}});
    os << j.dump(2) << '\n';
  } else {
    os << std::setprecision(17);
    for (std::size_t i = 0; i < m.dim(); ++i) os << m.coords[i] << ',';
    os << "residual,denom_margin\n";
    for (const auto& f : fps) {
      for (double v : f.x) os << v << ',';
      os << f.residual << ',' << f.denom_margin << '\n';
    }
    if (cfg.format == "text") os << "count=" << fps.size() << '\n';
  }
  return kOk;
}

json report_json(const StabilityReport& r) {
  json e = json::array();
  for (const auto& z : r.eigenvalues) e.push_back({z.real(), z.imag()});
  return {{"x", r.fixed_point.x},        {"a", r.char_poly},
          {"hurwitz", r.hurwitz},        {"eigenvalues", e},
          {"verdict", to_string(r.verdict)}, {"margin_flags", r.margin_flags},
          {"residual", r.fixed_point.residual}, {"denom_margin", r.fixed_point.denom_margin}};
}

int cmd_classify(const Config& cfg) {
  Model m = resolve_model(cfg.model);
  Binding mu = bind_params(m, cfg.params);
  FixedPointOptions opt;
  opt.seeds = cfg.seeds;
  StableCount c = count_stable(m, mu, parse_box(cfg.box, m.dim()), cfg.tol, opt);
  std::optional<RegionResult> region;
  if (m.name == "airfoil" && mu.count("Minf") && mu.count("V") && is_exact(mu["Minf"]) && is_exact(mu["V"]))
    region = airfoil_region_conditions(std::get<Rational>(mu["Minf"]), std::get<Rational>(mu["V"]));

  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  const std::size_t n = m.dim();
  if (cfg.format == "json") {
    json j;
    j["model"] = m.name;
    j["fixed_points"] = json::array();
    for (const auto& r : c.reports) j["fixed_points"].push_back(report_json(r));
    if (region) j["region"] = region->label;
    j["k"] = c.k;
    os << j.dump(2) << '\n';
  } else {
    bool csv = cfg.format == "csv";
    if (!csv) os << "# " << m.name << ": " << c.reports.size() << " fixed point(s)\n";
    for (std::size_t i = 0; i < n; ++i) os << m.coords[i] << ',';
    for (std::size_t i = 1; i <= n; ++i) os << 'a' << i << ',';
    for (std::size_t i = 1; i <= n; ++i) os << "Delta" << i << ',';
    os << "verdict\n";
    os << std::setprecision(csv ? 17 : 10);
    for (const auto& r : c.reports) {
      for (double v : r.fixed_point.x) os << v << ',';
      for (double v : r.char_poly) os << v << ',';
      for (double v : r.hurwitz) os << v << ',';
      os << to_string(r.verdict) << '\n';
    }
    if (!csv) {
      for (const auto& r : c.reports)
        for (const auto& f : r.margin_flags) os << "# warning: near-margin " << f << '\n';
      if (region) os << "region=" << region->label << '\n';
      if (c.indeterminate) os << "# warning: " << c.indeterminate << " indeterminate verdict(s)\n";
    }
    os << "k=" << c.k << '\n';
  }
  if (c.indeterminate) return kIndeterminate;
  return cfg.exit_k ? 10 + c.k : kOk;
}

int cmd_conditions(const Config& cfg) {
  Model m = resolve_model(cfg.model);
  SemiAlgebraicSystem s = assemble_semialgebraic(m);
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  if (cfg.format == "json") {
    json j;
    j["variables"] = s.vars;
    auto strs = [&](const std::vector<Polynomial>& ps) {
      json a = json::array();
      for (const auto& p : ps) a.push_back(p.to_string(s.vars));
      return a;
    };
    j["equations"] = strs(s.equations);
    j["inequations"] = strs(s.inequations);
    j["inequalities"] = strs(s.inequalities);
    os << j.dump(2) << '\n';
  } else {
    if (cfg.format == "text") {
      os << "# variables:";
      for (const auto& v : s.vars) os << ' ' << v;
      os << "\n# EQ p = 0, NEQ p != 0, GT p > 0\n";
    }
    for (const auto& l : s.lines()) os << l << '\n';
  }
  return kOk;
}

std::vector<double> deviation_w(const Config& cfg, std::size_t n) {
  if (cfg.W.empty()) {
    std::vector<double> w(n, 1e-4);
    w[0] = 1e-5;
    return w;
  }
  return parse_vector(cfg.W, n, "--W");
}

void check_time_grid(const Config& cfg) {
  if (!(cfg.dt > 0)) throw UsageError("--dt must be positive");
  if (!(cfg.tend > 0)) throw UsageError("--tend must be positive");
  if (cfg.tend / cfg.dt > 1e8) throw UsageError("--tend / --dt exceeds 1e8 steps");
}

int cmd_simulate(const Config& cfg) {
  check_time_grid(cfg);
  Model m = resolve_model(cfg.model);
  Binding mu = bind_params(m, cfg.params);
  const std::size_t n = m.dim();
  auto x = base_point(cfg, m, mu);
  auto W = deviation_w(cfg, n);
  auto y0 = cfg.y0.empty() ? W : parse_vector(cfg.y0, n, "--y0");

  Trace traj = integrate(m, mu, x, y0, cfg.tend, cfg.dt);
  Trace dev = integrate_deviation(m, mu, x, W, cfg.tend, cfg.dt);
  FocusingProfile prof = focusing_profile(dev, W);

  std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, auto&& fn) {
    std::ofstream f(dir / name);
    if (!f) throw UsageError("cannot write '" + (dir / name).string() + "'");
    fn(f);
  };
  write("trajectory.csv", [&](std::ostream& o) { write_trace_csv(o, traj); });
  write("deviation.csv", [&](std::ostream& o) { write_trace_csv(o, dev); });
  write("focusing.csv", [&](std::ostream& o) { write_focusing_csv(o, prof); });
  std::cout << "wrote " << (dir / "trajectory.csv").string() << ", deviation.csv, focusing.csv\n";
  std::cout << "focusing=" << to_string(prof.verdict) << '\n';
  return kOk;
}

int cmd_focusing(const Config& cfg) {
  check_time_grid(cfg);
  Model m = resolve_model(cfg.model);
  Binding mu = bind_params(m, cfg.params);
  auto x = base_point(cfg, m, mu);
  auto W = deviation_w(cfg, m.dim());
  Trace dev = integrate_deviation(m, mu, x, W, cfg.tend, cfg.dt);
  FocusingProfile prof = focusing_profile(dev, W);
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  if (cfg.format == "csv") {
    write_focusing_csv(os, prof);
  } else if (cfg.format == "json") {
    json j{{"point", x}, {"W", W}, {"verdict", to_string(prof.verdict)}, {"probe_samples", prof.probe_samples}};
    os << j.dump(2) << '\n';
  } else {
    os << "point=(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << fmt(x[i]);
    os << ")\nfocusing=" << to_string(prof.verdict) << '\n';
  }
  return kOk;
}

int cmd_region(const Config& cfg) {
  const Model af = airfoil();
  Rational M = af.defaults.at("Minf"), V = af.defaults.at("V");
  for (const auto& kv : split(cfg.params, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("parameter binding '" + kv + "' is not of the form name=value");
    std::string name = kv.substr(0, eq);
    Rational v = parse_value(kv.substr(eq + 1), name);
    if (name == "Minf") {
      M = v;
    } else if (name == "V") {
      V = v;
    } else {
      throw UsageError("region takes only Minf and V");
    }
  }
  RegionResult r = airfoil_region_conditions(M, V);
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  if (cfg.format == "json") {
    json j{{"region", r.label}, {"satisfied", r.satisfied}, {"R_signs", r.signs}, {"side_condition", r.side_condition}};
    os << j.dump(2) << '\n';
  } else {
    os << "R1..R6 signs:";
    for (int s : r.signs) os << ' ' << (s > 0 ? '+' : s < 0 ? '-' : '0');
    os << "\nside condition (Minf-10)*R1*...*R6 != 0: " << (r.side_condition ? "holds" : "fails") << '\n';
    os << "satisfied:";
    for (const auto& s : r.satisfied) os << ' ' << s;
    os << "\nregion=" << r.label << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KCC invariants and Jacobi stability of second-order systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--model", cfg.model, "built-in name (wound_strings, airfoil, tractor_seat) or model file");
  app.add_option("--params", cfg.params, "parameter bindings, e.g. a=1/2,C=1,m=-1");
  app.add_option("--out", cfg.out, "output file (directory for simulate)");
  app.add_option("--tol", cfg.tol, "sign tolerance for stability decisions")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Config&);
  };
  const Cmd cmds[] = {
      {"invariants", "print N, Berwald, P, epsilon and the higher tensors", cmd_invariants},
      {"deviation", "print the deviation equations and matrices", cmd_deviation},
      {"fixed-points", "locate fixed points numerically", cmd_fixed_points},
      {"classify", "classify every fixed point and count the stable ones", cmd_classify},
      {"conditions", "print the polynomial system of stable fixed points", cmd_conditions},
      {"simulate", "write trajectory, deviation and focusing CSV files", cmd_simulate},
      {"focusing", "focusing verdict of the deviation near t = 0+", cmd_focusing},
      {"region", "airfoil condition set of (Minf, V)", cmd_region},
  };
  int (*selected)(const Config&) = nullptr;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&selected, &c] { selected = c.run; });
    std::string n = c.name;
    if (n == "fixed-points" || n == "classify" || n == "simulate" || n == "focusing") {
      sub->add_option("--box", cfg.box, "search box lo:hi or lo:hi,lo:hi,...");
      sub->add_option("--seeds", cfg.seeds, "seed grid nodes per axis")->check(CLI::Range(1u, 100u));
    }
    if (n == "simulate" || n == "focusing") {
      sub->add_option("--dt", cfg.dt, "RK4 step");
      sub->add_option("--tend", cfg.tend, "end time");
      sub->add_option("--W", cfg.W, "initial deviation velocity, comma-separated");
      sub->add_option("--y0", cfg.y0, "initial trajectory velocity (defaults to W)");
    }
    if (n == "simulate" || n == "focusing" || n == "deviation") sub->add_option("--point", cfg.point, "base point x");
    if (n == "classify") sub->add_flag("--exit-k", cfg.exit_k, "exit with 10 + k on success");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return selected(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IntegrationError& e) {
    std::cerr << "error: integration aborted: " << e.what() << '\n';
    return kIntegration;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const ParseError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const CanonicalizeError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kModel;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kModel;
  }
}
