#include "panel/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "panel/errors.hpp"
#include "panel/field_io.hpp"

namespace panel {

namespace {

namespace pt = boost::property_tree;
using std::numbers::pi;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"scenario", {"name"}},
    {"grid", {"nx", "ny", "lx", "ly"}},
    {"model", {"U", "closure", "k", "alpha", "lambda", "load", "pressure"}},
    {"run", {"T", "dt", "nonlinear"}},
    {"delay", {"n_theta", "n_s"}},
    {"initial", {"shape", "amplitude", "velocity", "mx", "my", "modes", "seed", "file", "prehistory"}},
    {"output", {"stride", "snapshot_stride", "checkpoint"}},
    {"sweep", {"parameter", "values", "start", "stop", "count", "tol", "max_iter", "stability",
               "branch_switch"}},
    {"compare", {"U_values", "T"}},
    {"kjc", {"U", "alpha_lp", "homogeneity_points", "nodes", "time_steps", "dt"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Reads keys, values and their line numbers.
class Reader {
public:
  Reader(const std::string& text, std::string origin) : origin_(std::move(origin)) {
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree_);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("syntax", origin_ + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    std::istringstream lines(text);
    std::string line, section;
    for (int n = 1; std::getline(lines, line); ++n) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t.front() == '[') {
        section = trim(t.substr(1, t.find(']') - 1));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = section + "." + trim(t.substr(0, eq));
      line_[key] = n;
      order_.push_back(key);
    }
    for (const auto& [sec, sub] : tree_) {
      auto known = kKnownKeys.find(sec);
      if (known == kKnownKeys.end()) throw ConfigError(sec, origin_ + ": unknown section [" + sec + "]");
      for (const auto& [key, _] : sub)
        if (!known->second.count(key)) fail(sec + "." + key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = line_.find(key);
    const std::string where = it == line_.end() ? origin_ : origin_ + ":" + std::to_string(it->second);
    throw ConfigError(key, where + ": " + what);
  }

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }
  bool has_section(const std::string& s) const { return tree_.find(s) != tree_.not_found(); }

  std::string str(const std::string& key, const std::optional<std::string>& def = std::nullopt) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v) {
      if (!def) fail(key, "required field is missing");
      return *def;
    }
    return trim(*v);
  }

  double num(const std::string& key, std::optional<double> def = std::nullopt) const {
    if (!has(key)) {
      if (!def) fail(key, "required field is missing");
      return *def;
    }
    const std::string s = str(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + s + "'");
    }
  }

  int integer(const std::string& key, std::optional<int> def = std::nullopt) const {
    const double v = num(key, def ? std::optional<double>(*def) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected an integer");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        fail(key, "expected a comma-separated list of numbers, got '" + item + "'");
      }
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& k : order_) out.emplace_back(k, str(k));
    return out;
  }

private:
  std::string origin_;
  pt::ptree tree_;
  std::map<std::string, int> line_;
  std::vector<std::string> order_;
};

double hump(double x, double y, int m, int n, double lx, double ly) {
  return std::pow(std::sin(m * pi * x / lx) * std::sin(n * pi * y / ly), 2);
}

PlateField shape_field(const ScenarioConfig& cfg) {
  const Grid& g = cfg.grid;
  const InitialSpec& in = cfg.initial;
  if (in.shape == "zero") return PlateField(g);
  if (in.shape == "bump") {
    PlateField f = PlateField::from_function(
        g, [&](double x, double y) { return hump(x, y, in.mx, in.my, g.lx(), g.ly()); }, Bc::Clamped);
    f.zero_boundary();
    return f;
  }
  if (in.shape == "random") {
    std::mt19937_64 rng(in.seed);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::vector<double> coef;
    for (int m = 1; m <= in.modes; ++m)
      for (int n = 1; n <= in.modes; ++n) coef.push_back(c(rng) / (m * n));
    PlateField f = PlateField::from_function(g, [&](double x, double y) {
      double s = 0.0;
      std::size_t q = 0;
      // sin(pi x) sin(m pi x) keeps zero value and slope on the edges.
      for (int m = 1; m <= in.modes; ++m)
        for (int n = 1; n <= in.modes; ++n)
          s += coef[q++] * std::sin(pi * x / g.lx()) * std::sin(m * pi * x / g.lx()) *
               std::sin(pi * y / g.ly()) * std::sin(n * pi * y / g.ly());
      return s;
    }, Bc::Clamped);
    f.zero_boundary();
    const double mx = norm_max(f);
    return mx > 0.0 ? (1.0 / mx) * f : f;
  }
  if (in.shape == "file") {
    PlateField f = read_field(cfg.source.parent_path() / in.file);
    if (!(f.grid() == g)) throw ConfigError("initial.file", in.file + ": grid does not match [grid]");
    f.set_bc(Bc::Clamped);
    f.zero_boundary();
    return f;
  }
  throw ConfigError("initial.shape", "unknown shape '" + in.shape + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  const Reader r(text, origin);

  const int nx = r.integer("grid.nx"), ny = r.integer("grid.ny");
  const double lx = r.num("grid.lx", 1.0), ly = r.num("grid.ly", 1.0);
  if (nx < 5) r.fail("grid.nx", "must be at least 5");
  if (ny < 5) r.fail("grid.ny", "must be at least 5");
  if (!(lx > 0.0)) r.fail("grid.lx", "must be positive");
  if (!(ly > 0.0)) r.fail("grid.ly", "must be positive");
  ScenarioConfig cfg{Grid(nx, ny, lx, ly)};
  cfg.name = r.str("scenario.name", std::filesystem::path(origin).stem().string());
  cfg.echo = r.echo();

  ModelParams& p = cfg.params;
  p.U = r.num("model.U");
  try {
    p.closure = closure_from_string(r.str("model.closure"));
  } catch (const DomainError& e) {
    r.fail("model.closure", e.what());
  }
  p.k = r.num("model.k", 0.0);
  p.alpha = r.num("model.alpha", 0.0);
  cfg.lambda = r.num("model.lambda", 0.0);
  cfg.load = r.str("model.load", std::string("uniaxial"));
  cfg.pressure = r.num("model.pressure", 0.0);
  if (cfg.load == "uniaxial") {
    p.F0 = cfg.lambda * uniaxial_load(cfg.grid);
  } else if (cfg.load == "biaxial") {
    p.F0 = PlateField::from_function(cfg.grid, [&](double x, double y) {
      return -0.5 * cfg.lambda * (x * x + y * y);
    });
  } else {
    r.fail("model.load", "expected uniaxial or biaxial");
  }
  p.p0 = PlateField::from_function(cfg.grid, [&](double, double) { return cfg.pressure; });
  if (!std::isfinite(p.U) || p.U < 0.0) r.fail("model.U", "must be nonnegative");
  if (std::abs(p.U - 1.0) < 1e-12) r.fail("model.U", "U = 1 is excluded");
  if (p.closure == Closure::PistonLowFreq && !(p.U > 1.0))
    r.fail("model.U", "piston_lowfreq requires U > 1");
  if (p.k < 0.0) r.fail("model.k", "must be nonnegative");
  if (p.alpha < 0.0) r.fail("model.alpha", "must be nonnegative");

  cfg.T = r.num("run.T", 0.0);
  cfg.dt = r.num("run.dt", 0.0);
  cfg.nonlinear = r.flag("run.nonlinear", true);
  if (cfg.T < 0.0) r.fail("run.T", "must be nonnegative");
  if (cfg.dt < 0.0) r.fail("run.dt", "must be nonnegative");
  cfg.n_theta = r.integer("delay.n_theta", 32);
  cfg.n_s = r.integer("delay.n_s", 0);
  if (cfg.n_theta < 4) r.fail("delay.n_theta", "must be at least 4");
  if (cfg.n_s < 0) r.fail("delay.n_s", "must be nonnegative");

  InitialSpec& in = cfg.initial;
  in.shape = r.str("initial.shape", std::string("zero"));
  in.amplitude = r.num("initial.amplitude", 0.0);
  in.velocity = r.num("initial.velocity", 0.0);
  in.mx = r.integer("initial.mx", 1);
  in.my = r.integer("initial.my", 1);
  in.modes = r.integer("initial.modes", 4);
  in.seed = static_cast<std::uint64_t>(r.integer("initial.seed", 1));
  in.file = r.str("initial.file", std::string());
  in.prehistory = r.str("initial.prehistory", std::string("flat"));
  if (!(in.shape == "zero" || in.shape == "bump" || in.shape == "random" || in.shape == "file"))
    r.fail("initial.shape", "expected zero, bump, random or file");
  if (in.shape == "file" && in.file.empty()) r.fail("initial.file", "required for shape = file");
  if (in.mx < 1) r.fail("initial.mx", "must be positive");
  if (in.my < 1) r.fail("initial.my", "must be positive");
  if (in.modes < 1) r.fail("initial.modes", "must be positive");
  if (!(in.prehistory == "flat" || in.prehistory == "rest"))
    r.fail("initial.prehistory", "expected flat or rest");

  cfg.output.stride = r.integer("output.stride", 1);
  cfg.output.snapshot_stride = r.integer("output.snapshot_stride", 0);
  cfg.output.checkpoint = r.flag("output.checkpoint", true);
  if (cfg.output.stride < 1) r.fail("output.stride", "must be positive");
  if (cfg.output.snapshot_stride < 0) r.fail("output.snapshot_stride", "must be nonnegative");

  if (r.has_section("sweep")) {
    SweepSpec s;
    try {
      s.parameter = sweep_parameter_from_string(r.str("sweep.parameter"));
    } catch (const ConfigError& e) {
      r.fail("sweep.parameter", e.what());
    }
    if (r.has("sweep.values")) {
      s.values = r.list("sweep.values");
    } else {
      const double a = r.num("sweep.start"), b = r.num("sweep.stop");
      const int n = r.integer("sweep.count");
      if (n < 2) r.fail("sweep.count", "must be at least 2");
      for (int i = 0; i < n; ++i) s.values.push_back(a + (b - a) * i / (n - 1));
    }
    s.tol = r.num("sweep.tol", 1e-10);
    s.max_iter = r.integer("sweep.max_iter", 50);
    s.stability = r.flag("sweep.stability", true);
    s.branch_switch = r.flag("sweep.branch_switch", true);
    if (!(s.tol > 0.0)) r.fail("sweep.tol", "must be positive");
    cfg.sweep = s;
  }

  if (r.has("compare.U_values")) cfg.compare.U_values = r.list("compare.U_values");
  for (double U : cfg.compare.U_values)
    if (!(U >= 0.0) || std::abs(U - 1.0) < 1e-12) r.fail("compare.U_values", "every U must be nonnegative and differ from 1");
  cfg.compare.T = r.num("compare.T", 0.0);

  KjcProbeSpec& k = cfg.kjc;
  k.U = r.num("kjc.U", 0.6);
  k.alpha_lp = r.num("kjc.alpha_lp", 0.5);
  k.homogeneity_points = r.integer("kjc.homogeneity_points", 1000);
  if (r.has("kjc.nodes")) {
    k.nodes.clear();
    for (double v : r.list("kjc.nodes")) {
      if (v < 8 || v != std::floor(v)) r.fail("kjc.nodes", "node counts must be integers >= 8");
      k.nodes.push_back(static_cast<int>(v));
    }
  }
  k.time_steps = r.integer("kjc.time_steps", 32);
  k.dt = r.num("kjc.dt", 0.25);
  if (!(k.U > 0.0 && k.U < 1.0)) r.fail("kjc.U", "requires 0 < U < 1");
  if (!(k.alpha_lp > 0.0)) r.fail("kjc.alpha_lp", "must be positive");
  if (k.time_steps < 4) r.fail("kjc.time_steps", "must be at least 4");
  if (!(k.dt > 0.0)) r.fail("kjc.dt", "must be positive");
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg = parse_scenario(ss.str(), path.string());
  cfg.source = path;
  return cfg;
}

ScenarioConfig with_flow_speed(const ScenarioConfig& cfg, double U, Closure closure) {
  ScenarioConfig out = cfg;
  out.params.U = U;
  out.params.closure = closure;
  out.params.validate();
  return out;
}

PlateState initial_state(const ScenarioConfig& cfg) {
  const PlateField shape = shape_field(cfg);
  PlateState s = PlateState::zero(cfg.grid);
  const double a = cfg.initial.shape == "file" ? 1.0 : cfg.initial.amplitude;
  s.u = a * shape;
  s.v = cfg.initial.velocity * shape;
  return s;
}

DelayQuadrature delay_quadrature(const ScenarioConfig& cfg, double dt) {
  DelayQuadrature q;
  q.n_theta = cfg.n_theta;
  if (cfg.params.closure != Closure::DelayedPotential) return q;
  q.t_star = delay_horizon(cfg.grid, cfg.params.U);
  q.n_s = cfg.n_s > 0 ? cfg.n_s : std::max(4, static_cast<int>(std::lround(q.t_star / dt)));
  return q;
}

double effective_dt(const ScenarioConfig& cfg) {
  if (cfg.dt > 0.0) return cfg.dt;
  DelayQuadrature q = delay_quadrature(cfg, 1.0);
  return default_dt(cfg.grid, cfg.params, q);
}

IntegratorOptions integrator_options(const ScenarioConfig& cfg) {
  IntegratorOptions o;
  o.nonlinear = cfg.nonlinear;
  o.quad = delay_quadrature(cfg, effective_dt(cfg));
  return o;
}

HistoryBuffer initial_history(const ScenarioConfig& cfg, const TimeIntegrator& ti,
                              const PlateState& s0) {
  if (cfg.initial.prehistory == "flat") return ti.flat_prehistory(s0);
  HistoryBuffer h = ti.flat_prehistory(PlateState::zero(cfg.grid, s0.t));
  // Replace the last entry (the rest state at t0) by the initial state.
  std::vector<PlateState> states;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) states.push_back({h[i].u, h[i].v, h[i].t});
  states.push_back(s0);
  return HistoryBuffer::restore(h.horizon(), h.dt(), states);
}

}  // namespace panel
