#include "commands.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>

#include "panel/errors.hpp"
#include "panel/field_io.hpp"
#include "panel/kjc.hpp"
#include "panel/plate_ops.hpp"

#ifndef PANEL_VERSION
#define PANEL_VERSION "0.0.0"
#endif

namespace panel::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output", "cannot create " + dir.string());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output", dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

json config_echo(const ScenarioConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.echo) j[k] = v;
  return j;
}

json tolerances() {
  return {{"airy_solve_residual", 1e-10},
          {"newton_residual_default", 1e-10},
          {"newton_gmres_tolerance", 1e-12},
          {"kjc_gmres_tolerance", kjc::DownwashOptions{}.gmres_tol},
          {"kjc_eta_max", kjc::DownwashOptions{}.eta_max},
          {"history_time_tolerance", 1e-9}};
}

json manifest_base(const std::string& command, const ScenarioConfig& cfg, const RunOptions& opts) {
  json m;
  m["tool"] = "panelflutter";
  m["version"] = version();
  m["command"] = command;
  m["scenario"] = cfg.name;
  m["config_file"] = cfg.source.string();
  m["config"] = config_echo(cfg);
  m["threads"] = opts.threads;
  m["seed"] = cfg.initial.seed;
  m["tolerances"] = tolerances();
  return m;
}

void write_manifest(json m, const RunOptions& opts, Clock::time_point start) {
  if (!opts.omit_timing)
    m["timing"] = {{"wall_seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
  std::ofstream f(opts.out / "manifest.json");
  if (!f) throw ConfigError("output", "cannot write manifest in " + opts.out.string());
  f << m.dump(2) << '\n';
}

constexpr const char* kTrajectoryHeader =
    "step,t,h2_norm,ut_norm,forcing_norm,e_pl,kinetic,bending,airy,inplane_work,"
    "pressure_work,diss_cum,balance_residual,balance_cum";

std::string trajectory_row(long step, const DiagnosticsRow& r, double balance_cum) {
  const EnergyRecord& e = r.energy;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", step, num(e.t), num(r.h2_norm),
                     num(r.ut_norm), num(r.forcing_norm), num(e.e_pl), num(e.kinetic),
                     num(e.bending), num(e.airy), num(e.inplane_work), num(e.pressure_work),
                     num(e.diss_cum), num(e.balance_residual), num(balance_cum));
}

PlateField unit_load(const ScenarioConfig& cfg) {
  if (cfg.load == "biaxial")
    return PlateField::from_function(cfg.grid, [](double x, double y) { return -0.5 * (x * x + y * y); });
  return uniaxial_load(cfg.grid);
}

}  // namespace

std::string version() { return PANEL_VERSION; }

ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOptions& opts) {
  if (opts.seed) {
    cfg.initial.seed = *opts.seed;
    cfg.echo.emplace_back("cli.seed", std::to_string(*opts.seed));
  }
  return cfg;
}

// ---------------------------------------------------------------------------

SimulationResult simulate(const ScenarioConfig& cfg_in, const RunOptions& opts) {
  const auto start = Clock::now();
  const ScenarioConfig cfg = apply_overrides(cfg_in, opts);
  if (!(cfg.T > 0.0)) throw ConfigError("run.T", "simulate requires T > 0");
  prepare_dir(opts.out);

  const double dt = effective_dt(cfg);
  const IntegratorOptions io = integrator_options(cfg);
  TimeIntegrator ti(cfg.params, dt, io);

  PlateState s0 = PlateState::zero(cfg.grid);
  HistoryBuffer history;
  long step0 = 0;
  double diss0 = 0.0, bal0 = 0.0;
  if (opts.resume) {
    Checkpoint c = read_checkpoint(*opts.resume);
    if (!(c.state.u.grid() == cfg.grid)) throw ConfigError("resume", "checkpoint grid differs from [grid]");
    s0 = c.state;
    history = std::move(c.history);
    step0 = c.step;
    diss0 = c.diss_cum;
    bal0 = c.balance_cum;
  } else {
    s0 = initial_state(cfg);
    history = initial_history(cfg, ti, s0);
  }

  const long total = std::lround(cfg.T / dt);
  long n = total - step0;
  if (opts.max_steps) n = std::min(n, *opts.max_steps);
  if (n <= 0) throw ConfigError("run.T", "no steps left to integrate");

  const int snap = cfg.output.snapshot_stride;
  const Trajectory tr = ti.run(s0, history, static_cast<double>(n) * dt,
                               snap > 0 ? snap : static_cast<int>(n) + 1, diss0, step0);

  SimulationResult res(cfg.grid);
  res.first_step = step0;
  res.rows = tr.rows;
  res.final_state = tr.final_state;
  res.dt = dt;
  res.finished = step0 + n == total;

  // Trajectory CSV: the first row of a resumed segment was written by the previous one.
  const fs::path csv = opts.out / "trajectory.csv";
  std::ofstream f(csv, opts.resume ? std::ios::app : std::ios::trunc);
  if (!f) throw ConfigError("output", "cannot write " + csv.string());
  if (!opts.resume) f << kTrajectoryHeader << '\n';
  double bal = bal0;
  for (std::size_t i = 0; i < tr.rows.size(); ++i) {
    const long step = step0 + static_cast<long>(i);
    bal += tr.rows[i].energy.balance_residual;
    if (i == 0 && opts.resume) continue;
    if (step % cfg.output.stride == 0 || step == total) f << trajectory_row(step, tr.rows[i], bal) << '\n';
  }
  res.balance_cum = bal;

  std::vector<std::string> outputs{"trajectory.csv"};
  if (snap > 0) {
    fs::create_directories(opts.out / "snapshots");
    for (const PlateState& s : tr.states) {
      const long step = std::lround(s.t / dt);
      write_field(opts.out / "snapshots" / fmt::format("u_{:08d}", step), s.u, s.t);
    }
    outputs.push_back("snapshots/");
  }
  if (cfg.output.checkpoint) {
    write_checkpoint(opts.out / "checkpoint", tr.final_state, history,
                     tr.rows.back().energy.diss_cum, bal, step0 + n);
    outputs.push_back("checkpoint.json");
    outputs.push_back("checkpoint.bin");
  }

  json m = manifest_base("simulate", cfg, opts);
  m["effective"] = {{"dt", dt},
                    {"steps_total", total},
                    {"nonlinear", cfg.nonlinear},
                    {"closure", to_string(cfg.params.closure)},
                    {"t_star", io.quad.t_star},
                    {"n_theta", io.quad.n_theta},
                    {"n_s", io.quad.n_s}};
  m["segment"] = {{"first_step", step0},
                  {"last_step", step0 + n},
                  {"resumed_from", opts.resume ? opts.resume->string() : std::string()},
                  {"finished", res.finished}};
  const DiagnosticsRow& last = tr.rows.back();
  m["results"] = {{"final_t", tr.final_state.t},
                  {"final_h2_norm", last.h2_norm},
                  {"final_ut_norm", last.ut_norm},
                  {"diss_cum", last.energy.diss_cum},
                  {"balance_cum", bal}};
  m["outputs"] = outputs;
  write_manifest(m, opts, start);
  return res;
}

// ---------------------------------------------------------------------------

EquilibriumBranch equilibria(const ScenarioConfig& cfg_in, const RunOptions& opts) {
  const auto start = Clock::now();
  const ScenarioConfig cfg = apply_overrides(cfg_in, opts);
  if (!cfg.sweep) throw ConfigError("sweep", "equilibria requires a [sweep] section");
  const SweepSpec& sw = *cfg.sweep;
  prepare_dir(opts.out);

  ContinuationSpec spec(cfg.grid);
  spec.parameter = sw.parameter;
  spec.values = sw.values;
  spec.tol = sw.tol;
  spec.max_iter = sw.max_iter;
  spec.compute_stability = sw.stability;
  spec.branch_switch = sw.branch_switch;
  spec.seed = cfg.initial.seed;
  spec.load_shape = unit_load(cfg);
  spec.pressure_shape = cfg.params.p0;
  if (sw.parameter == SweepParameter::PressureScale && cfg.pressure == 0.0)
    throw ConfigError("model.pressure", "a p0_scale sweep needs a nonzero pressure");

  const EquilibriumBranch br = continuation(cfg.params, spec);

  std::ofstream f(opts.out / "branch.csv");
  if (!f) throw ConfigError("output", "cannot write branch.csv");
  f << "index,parameter,value,h2_norm,max_abs,residual,iterations,converged,min_real,"
       "switched_from,note\n";
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const BranchPoint& p = br.points[i];
    f << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", i, to_string(br.parameter), num(p.value),
                     num(norm_h2(p.u)), num(norm_max(p.u)), num(p.residual), p.iterations,
                     p.converged ? 1 : 0, p.min_real ? num(*p.min_real) : "",
                     p.switched_from ? num(*p.switched_from) : "", p.note);
  }
  if (!br.points.empty()) write_field(opts.out / "equilibrium_last", br.points.back().u);

  json m = manifest_base("equilibria", cfg, opts);
  const auto onset = branch_onset(br);
  const auto crossing = stability_crossing(br);
  m["results"] = {{"points", br.points.size()},
                  {"onset", onset ? json(*onset) : json(nullptr)},
                  {"stability_crossing", crossing ? json(*crossing) : json(nullptr)},
                  {"all_residuals_within_tol",
                   std::all_of(br.points.begin(), br.points.end(),
                               [&](const BranchPoint& p) { return p.residual <= sw.tol; })}};
  m["outputs"] = {"branch.csv", "equilibrium_last.json", "equilibrium_last.bin"};
  write_manifest(m, opts, start);
  return br;
}

// ---------------------------------------------------------------------------

void kjc_probe(const ScenarioConfig& cfg_in, const RunOptions& opts) {
  using namespace kjc;
  const auto start = Clock::now();
  const ScenarioConfig cfg = apply_overrides(cfg_in, opts);
  const KjcProbeSpec& k = cfg.kjc;
  prepare_dir(opts.out);
  json results;

  {  // |r sqrt(eta)| over the characteristic strip, literal and scaled.
    std::ofstream f(opts.out / "kjc_r_strip.csv");
    f << "strip,z_U,eta,abs_r_sqrt_eta\n";
    double lo = INFINITY, hi = 0.0, slo = INFINITY, shi = 0.0;
    for (int j = 0; j <= 40; ++j) {
      const double eta = std::pow(10.0, 2.0 + 4.0 * j / 40.0);
      for (int i = 0; i <= 40; ++i) {
        const double zu = 0.99 + 0.02 * i / 40.0;
        const double v = std::abs(r_symbol(zu - k.U, eta, k.alpha_lp, k.U)) * std::sqrt(eta);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        f << fmt::format("literal,{},{},{}\n", num(zu), num(eta), num(v));
        const double zs = 1.0 + (-1.0 + 2.0 * i / 40.0) * k.alpha_lp / eta;
        const double w = std::abs(r_symbol(zs - k.U, eta, k.alpha_lp, k.U)) * std::sqrt(eta);
        slo = std::min(slo, w);
        shi = std::max(shi, w);
        f << fmt::format("scaled,{},{},{}\n", num(zs), num(eta), num(w));
      }
    }
    results["r_strip"] = {{"literal_min", lo}, {"literal_max", hi}, {"scaled_min", slo}, {"scaled_max", shi}};
  }
  {  // Limits.
    std::ofstream f(opts.out / "kjc_r_limits.csv");
    f << "case,z,eta,r_re,r_im,limit_re,limit_im,abs_error\n";
    double worst = 0.0;
    auto row = [&](const char* name, double z, double eta, cplx lim) {
      const cplx r = r_symbol(z, eta, k.alpha_lp, k.U);
      worst = std::max(worst, std::abs(r - lim));
      f << fmt::format("{},{},{},{},{},{},{},{}\n", name, num(z), num(eta), num(r.real()), num(r.imag()),
                       num(lim.real()), num(lim.imag()), num(std::abs(r - lim)));
    };
    for (double eta : {0.5, 10.0, 1000.0}) {
      row("z_plus", 1e6, eta, r_limit_plus);
      row("z_minus", -1e6, eta, r_limit_minus);
    }
    row("z_zero", 0.0, 1e9, r_limit_zero(k.U));
    results["r_limits_max_error"] = worst;
  }
  {  // Homogeneity: dyadic scalings are exact, so that column is zero.
    std::mt19937_64 rng(cfg.initial.seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0), s(0.05, 3.0), lam(0.1, 10.0);
    std::uniform_int_distribution<int> ex(-6, 6);
    std::ofstream f(opts.out / "kjc_homogeneity.csv");
    f << "index,lambda_dyadic,defect_dyadic,lambda,defect_relative,denominator_condition\n";
    double worst_dyadic = 0.0, worst = 0.0;
    for (int i = 0; i < k.homogeneity_points; ++i) {
      SymbolPoint q;
      q.eta_x = u(rng);
      q.eta_y = u(rng);
      q.tau = cplx(s(rng), u(rng));
      q.U = k.U;
      const double ld = std::ldexp(1.0, ex(rng)), l = lam(rng);
      SymbolPoint a = q, b = q;
      a.eta_x *= ld, a.eta_y *= ld, a.tau *= ld;
      b.eta_x *= l, b.eta_y *= l, b.tau *= l;
      const cplx m = multiplier_m(q);
      const double dd = std::abs(multiplier_m(a) - m);
      const double cond = (std::abs(q.tau) + q.U * std::abs(q.eta_x)) / std::abs(q.tau + cplx(0.0, q.U * q.eta_x));
      const double dr = std::abs(multiplier_m(b) - m) / std::max(1.0, std::abs(m));
      worst_dyadic = std::max(worst_dyadic, dd);
      worst = std::max(worst, dr / cond);
      f << fmt::format("{},{},{},{},{},{}\n", i, num(ld), num(dd), num(l), num(dr), num(cond));
    }
    results["homogeneity"] = {{"max_defect_dyadic", worst_dyadic}, {"max_conditioned_defect", worst}};
  }
  {  // Finite Hilbert round trip against node count.
    std::ofstream f(opts.out / "kjc_hilbert_roundtrip.csv");
    f << "nodes,interior_residual,homogeneous_image\n";
    json rows = json::array();
    for (int n : k.nodes) {
      const IntervalFunction h = IntervalFunction::chebyshev(
          n, [](double t) { return cplx(std::pow(std::abs(t - 0.3), 2.5) + t + std::sin(3 * t)); });
      const IntervalFunction back = finite_hilbert(finite_hilbert_invert(h, 1.5));
      double r = 0.0;
      const Eigen::VectorXd x = h.x();
      for (int i = 0; i < n; ++i)
        if (std::abs(x[i]) <= 0.9) r = std::max(r, std::abs(back.samples()[i] - h.samples()[i]));
      const IntervalFunction hom =
          IntervalFunction::chebyshev(n, [](double) { return cplx(1.0); }, Endpoint::InverseSqrt);
      const double z = finite_hilbert(hom).samples().cwiseAbs().maxCoeff();
      f << fmt::format("{},{},{}\n", n, num(r), num(z));
      rows.push_back({{"nodes", n}, {"residual", r}, {"homogeneous_image", z}});
    }
    results["hilbert_roundtrip"] = rows;
  }
  {  // Downwash to potential round trip and duality pairing.
    std::ofstream f(opts.out / "kjc_downwash_roundtrip.csv");
    f << "nodes,time_steps,max_error,pairing_re,pairing_im\n";
    json rows = json::array();
    for (int n : {16, 32, 64}) {
      TimeSeries psi;
      for (int s = 0; s < k.time_steps; ++s) {
        const double amp = std::exp(-std::pow(s * k.dt - 0.375 * k.time_steps * k.dt, 2));
        psi.push_back(IntervalFunction::chebyshev(
            n, [&](double x) { return cplx(amp * (x + 0.5 * x * x * x - 0.3 * (2 * x * x - 1))); },
            Endpoint::InverseSqrt));
      }
      const TimeSeries back =
          downwash_to_potential(kjc_forward(psi, k.dt, k.U, k.alpha_lp), k.dt, k.U, k.alpha_lp);
      double e = 0.0;
      for (std::size_t s = 0; s < psi.size(); ++s)
        e = std::max(e, (back[s].samples() - psi[s].samples()).cwiseAbs().maxCoeff());
      const cplx p = pairing(back[psi.size() / 3], [](double x) {
        return std::pow(std::cos(std::numbers::pi * x / 2), 2) * std::sin(2 * x);
      });
      f << fmt::format("{},{},{},{},{}\n", n, k.time_steps, num(e), num(p.real()), num(p.imag()));
      rows.push_back({{"nodes", n}, {"max_error", e}});
    }
    results["downwash_roundtrip"] = rows;
  }

  json m = manifest_base("kjc-probe", cfg, opts);
  m["results"] = results;
  m["outputs"] = {"kjc_r_strip.csv", "kjc_r_limits.csv", "kjc_homogeneity.csv",
                  "kjc_hilbert_roundtrip.csv", "kjc_downwash_roundtrip.csv"};
  write_manifest(m, opts, start);
}

// ---------------------------------------------------------------------------

ClosureDistance closure_distance(const ScenarioConfig& cfg, double U, Closure a, Closure b) {
  const ScenarioConfig ca = with_flow_speed(cfg, U, a);
  const ScenarioConfig cb = with_flow_speed(cfg, U, b);
  const ScenarioConfig cd = with_flow_speed(cfg, U, Closure::DelayedPotential);

  ClosureDistance out;
  out.U = U;
  out.t_star = delay_horizon(cfg.grid, U);
  // One step for both closures, fine enough to resolve the delay window.
  out.dt = cfg.dt > 0.0 ? std::min(cfg.dt, out.t_star / 8.0) : effective_dt(cd);
  IntegratorOptions io;
  io.nonlinear = cfg.nonlinear;
  io.quad = delay_quadrature(cd, out.dt);
  const double T = cfg.compare.T > 0.0 ? cfg.compare.T : cfg.T;
  if (!(T > 0.0)) throw ConfigError("compare.T", "closure comparison needs a positive horizon");
  out.steps = std::lround(T / out.dt);

  TimeIntegrator ta(ca.params, out.dt, io), tb(cb.params, out.dt, io);
  PlateState sa = initial_state(cfg), sb = sa;
  HistoryBuffer ha = initial_history(ca, ta, sa), hb = initial_history(cb, tb, sb);
  out.sup_norm = norm_h2(sa.u);
  for (long n = 0; n < out.steps; ++n) {
    sa = ta.step(sa, ha);
    sb = tb.step(sb, hb);
    const double d = norm_h2(sa.u - sb.u);
    out.sup_distance = std::max(out.sup_distance, d);
    out.sup_norm = std::max(out.sup_norm, norm_h2(sa.u));
    out.terminal_distance = d;
  }
  return out;
}

ClosureComparison compare_closures(const ScenarioConfig& cfg_in, const RunOptions& opts) {
  const auto start = Clock::now();
  const ScenarioConfig cfg = apply_overrides(cfg_in, opts);
  prepare_dir(opts.out);
  std::vector<double> Us = cfg.compare.U_values;
  std::sort(Us.begin(), Us.end());

  ClosureComparison cmp;
  cmp.rows.resize(Us.size());
  // Independent runs, one per worker; results land in fixed slots.
  const std::size_t workers = std::max<std::size_t>(1, static_cast<std::size_t>(opts.threads));
  for (std::size_t b = 0; b < Us.size(); b += workers) {
    std::vector<std::future<ClosureDistance>> jobs;
    for (std::size_t i = b; i < std::min(Us.size(), b + workers); ++i)
      jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, [&, i] {
        return closure_distance(cfg, Us[i], Closure::PistonClassical, Closure::DelayedPotential);
      }));
    for (std::size_t i = 0; i < jobs.size(); ++i) cmp.rows[b + i] = jobs[i].get();
  }
  cmp.monotone_decreasing = true;
  for (std::size_t i = 1; i < cmp.rows.size(); ++i)
    if (cmp.rows[i].sup_distance > cmp.rows[i - 1].sup_distance) cmp.monotone_decreasing = false;

  std::ofstream f(opts.out / "closures.csv");
  if (!f) throw ConfigError("output", "cannot write closures.csv");
  f << "U,t_star,dt,steps,sup_distance,terminal_distance,sup_norm_classical,relative_sup_distance\n";
  json rows = json::array();
  for (const ClosureDistance& r : cmp.rows) {
    const double rel = r.sup_norm > 0.0 ? r.sup_distance / r.sup_norm : 0.0;
    f << fmt::format("{},{},{},{},{},{},{},{}\n", num(r.U), num(r.t_star), num(r.dt), r.steps,
                     num(r.sup_distance), num(r.terminal_distance), num(r.sup_norm), num(rel));
    rows.push_back({{"U", r.U}, {"t_star", r.t_star}, {"sup_distance", r.sup_distance},
                    {"terminal_distance", r.terminal_distance}});
  }
  json m = manifest_base("compare-closures", cfg, opts);
  m["results"] = {{"rows", rows}};
  m["checks"] = {{{"id", 11},
                  {"name", "closure distance monotone decreasing in U"},
                  {"asserted", false},
                  {"observed", cmp.monotone_decreasing}}};
  m["outputs"] = {"closures.csv"};
  write_manifest(m, opts, start);
  return cmp;
}

// ---------------------------------------------------------------------------

bool selftest() {
  bool all = true;
  auto report = [&](const std::string& name, bool ok, double value) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << fmt::format("{:.3g}", value) << ")\n";
    all = all && ok;
  };
  auto attempt = [&](const std::string& name, const std::function<std::pair<bool, double>()>& f) {
    try {
      const auto [ok, v] = f();
      report(name, ok, v);
    } catch (const std::exception& e) {
      std::cout << "FAIL " << name << " (" << e.what() << ")\n";
      all = false;
    }
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Grid g(11, 11);
  auto random_field = [&](double amp) {
    PlateField u(g);
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) u(i, j) = amp * d(rng);
    return u;
  };

  attempt("bracket symmetry", [&] {
    const PlateField u = random_field(1.0), w = random_field(1.0);
    const double e = norm_max(vk_bracket(u, w) - vk_bracket(w, u)) / norm_max(vk_bracket(u, w));
    return std::pair{e < 1e-12, e};
  });
  attempt("force is the potential gradient", [&] {
    const PlateField u = random_field(0.3), h = random_field(1.0);
    const PlateField F0 = PlateField::from_function(g, [](double x, double y) { return -5 * y * y + x * y; });
    const double eps = 1e-6;
    const double fd = (vk_potential(u + eps * h, F0) - vk_potential(u - eps * h, F0)) / (2 * eps);
    const double an = inner(vk_force(u, F0), h);
    const double e = std::abs(fd - an) / std::abs(an);
    return std::pair{e < 1e-5, e};
  });
  attempt("airy solve residual", [&] {
    const PlateField u = random_field(1.0);
    const PlateField v = airy_solve(u, u);
    const double e = norm_max(biharmonic_apply(v) + vk_bracket(u, u)) / norm_max(vk_bracket(u, u));
    return std::pair{e < 1e-10, e};
  });
  attempt("finite Hilbert round trip", [&] {
    const auto h = kjc::IntervalFunction::chebyshev(128, [](double t) { return kjc::cplx(std::exp(t) * std::cos(2 * t)); });
    const auto back = kjc::finite_hilbert(kjc::finite_hilbert_invert(h, 1.5));
    const double e = (back.samples() - h.samples()).cwiseAbs().maxCoeff();
    return std::pair{e < 1e-8, e};
  });
  attempt("split run is bitwise identical", [&] {
    ModelParams p(g);
    p.U = 1.5;
    p.F0 = 20.0 * uniaxial_load(g);
    PlateState s0 = PlateState::zero(g);
    s0.u = random_field(0.05);
    TimeIntegrator a(p, 0.005);
    HistoryBuffer ha = a.flat_prehistory(s0);
    const Trajectory full = a.run(s0, ha, 0.2);
    TimeIntegrator b(p, 0.005);
    HistoryBuffer hb = b.flat_prehistory(s0);
    const Trajectory first = b.run(s0, hb, 0.1);
    TimeIntegrator c(p, 0.005);
    const Trajectory second = c.run(first.final_state, hb, 0.1, 1, first.rows.back().energy.diss_cum);
    const PlateField diff = full.final_state.u - second.final_state.u;
    bool same = true;
    for (std::size_t k = 0; k < diff.size(); ++k) same = same && full.final_state.u[k] == second.final_state.u[k];
    return std::pair{same, norm_max(diff)};
  });
  attempt("newton keeps the flat state", [&] {
    ModelParams p(g);
    p.closure = Closure::None;
    p.F0 = 30.0 * uniaxial_load(g);
    const NewtonResult r = newton_solve(PlateField(g), p);
    return std::pair{norm_max(r.u) == 0.0, norm_max(r.u)};
  });
  return all;
}

}  // namespace panel::cli
