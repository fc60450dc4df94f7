#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "panel/energy.hpp"
#include "panel/integrator.hpp"
#include "panel/plate_ops.hpp"
#include "test_support.hpp"

using namespace panel;
using namespace testkit;
using std::numbers::pi;

namespace {

double trapezoid(const PlateField& a, const PlateField& b) {
  const Grid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double wx = (i == 0 || i == g.nx() - 1) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == g.ny() - 1) ? 0.5 : 1.0;
      s += wx * wy * a(i, j) * b(i, j);
    }
  return s * g.hx() * g.hy();
}

// Cumulative balance residual over [0,T] for a family of step sizes.
std::vector<double> residuals(const ModelParams& p, const PlateState& s0, bool nonlinear,
                              double T, std::initializer_list<double> dts) {
  std::vector<double> out;
  for (double dt : dts) {
    IntegratorOptions o;
    o.nonlinear = nonlinear;
    TimeIntegrator ti(p, dt, o);
    HistoryBuffer h;
    out.push_back(std::abs(ti.run(s0, h, T).cumulative_residual()));
  }
  return out;
}

}  // namespace

TEST_CASE("zero state has zero energy") {
  Grid g(9, 9);
  ModelParams p(g);
  EnergyRecord e = plate_energy(PlateState::zero(g), p);
  CHECK(e.e_pl == 0.0);
  CHECK(e.kinetic == 0.0);
  CHECK(e.bending == 0.0);
  CHECK(e.airy == 0.0);
  CHECK(e.inplane_work == 0.0);
  CHECK(e.pressure_work == 0.0);
}

TEST_CASE("kinetic energy of a Dirichlet eigenfunction") {
  Grid g(13, 17, 1.0, 1.4);
  const int m = 2, n = 3;
  PlateField v = PlateField::from_function(g, [&](double x, double y) {
    return std::sin(m * pi * x / g.lx()) * std::sin(n * pi * y / g.ly());
  }, Bc::Clamped);
  v.zero_boundary();
  const double lam = 4 / (g.hx() * g.hx()) * std::pow(std::sin(m * pi * g.hx() / (2 * g.lx())), 2) +
                     4 / (g.hy() * g.hy()) * std::pow(std::sin(n * pi * g.hy() / (2 * g.ly())), 2);
  const double alpha = 0.03;
  CHECK(kinetic_energy(v, alpha) ==
        doctest::Approx(0.5 * (1 + alpha * lam) * trapezoid(v, v)).epsilon(1e-12));
}

TEST_CASE("energy components match dense-quadrature oracles") {
  std::mt19937_64 rng(17);
  Grid g(17, 17);
  ModelParams p(g);
  p.alpha = 0.02;
  p.F0 = smooth_free(g, rng, 3.0);
  p.p0 = smooth_free(g, rng, 2.0);
  PlateState s = PlateState::zero(g);
  s.u = random_clamped(g, rng, 0.1);
  s.v = random_clamped(g, rng);
  EnergyRecord e = plate_energy(s, p);

  const double area = g.hx() * g.hy();
  const Eigen::MatrixXd B = oracle::dense_biharmonic(g);
  const Eigen::MatrixXd L = oracle::dense_dirichlet_laplacian(g);
  const Eigen::VectorXd u = oracle::interior(s.u), v = oracle::interior(s.v);
  const Eigen::VectorXd airy = B.partialPivLu().solve(-oracle::symmetric_bracket(s.u, s.u));
  const double kinetic = 0.5 * area * (v.dot(v) - p.alpha * v.dot(L * v));
  const double bending = 0.5 * area * u.dot(B * u);
  const double airy_e = 0.25 * area * airy.dot(B * airy);
  const double inplane = -u.dot(oracle::weak_load_matrix(p.F0) * u);
  const double pressure = trapezoid(p.p0, s.u);

  CHECK(e.kinetic == doctest::Approx(kinetic).epsilon(1e-12));
  CHECK(e.bending == doctest::Approx(bending).epsilon(1e-12));
  CHECK(e.airy == doctest::Approx(airy_e).epsilon(1e-12));
  CHECK(e.inplane_work == doctest::Approx(inplane).epsilon(1e-12));
  CHECK(e.pressure_work == doctest::Approx(pressure).epsilon(1e-12));
  CHECK(e.e_pl == doctest::Approx(kinetic + bending + airy_e + inplane + pressure).epsilon(1e-12));
}

TEST_CASE("balance residual converges at second order: conservative plate") {
  std::mt19937_64 rng(1);
  Grid g(9, 9);
  ModelParams p(g);
  p.closure = Closure::None;
  p.F0 = PlateField::from_function(g, [](double, double y) { return -20 * y * y; });
  PlateState s0 = PlateState::zero(g);
  s0.u = smooth_clamped(g, rng, 2, 0.3);
  auto r = residuals(p, s0, true, 1.0, {0.004, 0.002, 0.001});
  const double o = std::log2(r[1] / r[2]);
  MESSAGE("conservative residuals " << r[0] << " " << r[1] << " " << r[2] << " order " << o);
  CHECK(o >= 1.9);
}

TEST_CASE("balance residual converges at second order: pure damping, energy decreasing") {
  std::mt19937_64 rng(2);
  Grid g(9, 9);
  ModelParams p(g);
  p.closure = Closure::None;
  p.k = 0.5;
  PlateState s0 = PlateState::zero(g);
  s0.u = smooth_clamped(g, rng, 2, 0.3);
  auto r = residuals(p, s0, false, 1.0, {0.004, 0.002, 0.001});
  CHECK(std::log2(r[1] / r[2]) >= 1.9);

  TimeIntegrator ti(p, 0.002, IntegratorOptions{false, {}, {}});
  HistoryBuffer h;
  Trajectory tr = ti.run(s0, h, 1.0);
  for (std::size_t n = 1; n < tr.rows.size(); ++n)
    CHECK(tr.rows[n].energy.e_pl < tr.rows[n - 1].energy.e_pl);
}

TEST_CASE("balance residual converges at second order: piston with pressure") {
  std::mt19937_64 rng(3);
  Grid g(9, 9);
  ModelParams p(g);
  p.closure = Closure::PistonClassical;
  p.U = 1.5;
  p.k = 0.1;
  p.p0 = PlateField::from_function(g, [](double, double) { return 3.0; });
  PlateState s0 = PlateState::zero(g);
  s0.u = smooth_clamped(g, rng, 2, 0.1);
  auto r = residuals(p, s0, true, 1.0, {0.004, 0.002, 0.001});
  CHECK(std::log2(r[1] / r[2]) >= 1.9);
}

TEST_CASE("steady state has zero residual") {
  Grid g(9, 9);
  ModelParams p(g);
  p.closure = Closure::None;
  p.p0 = PlateField::from_function(g, [](double x, double y) { return 1 + x * y; });
  PlateState s0 = PlateState::zero(g);
  s0.u = biharmonic_solve(p.p0);
  TimeIntegrator ti(p, 0.01, IntegratorOptions{false, {}, {}});
  HistoryBuffer h;
  Trajectory tr = ti.run(s0, h, 0.2);
  for (const auto& r : tr.rows) CHECK(std::abs(r.energy.balance_residual) < 1e-13);
}

TEST_CASE("dissipation integral of a synthetic exponential") {
  const double k = 0.7, wn = 1.3, dt = 1e-3, T = 2.0;
  std::vector<double> norms;
  for (int n = 0; n <= std::lround(T / dt); ++n) norms.push_back(std::exp(-n * dt) * wn);
  const double exact = k * wn * wn / 2 * (1 - std::exp(-2 * T));
  CHECK(dissipation_integral(norms, dt, k) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(dissipation_integral(std::vector<double>(10, 0.0), dt, k) == 0.0);
}

TEST_CASE("plate energy stays above a per-configuration lower bound") {
  std::mt19937_64 rng(4);
  Grid g(9, 9);
  ModelParams p(g);
  p.closure = Closure::PistonClassical;
  p.U = 0.5;
  p.k = 0.2;
  p.F0 = PlateField::from_function(g, [](double, double y) { return -40 * y * y; });
  p.p0 = PlateField::from_function(g, [](double, double) { return 5.0; });

  // Estimate inf of the potential part by preconditioned descent from random starts.
  double floor_est = 0.0;
  for (int rep = 0; rep < 6; ++rep) {
    PlateField u = smooth_clamped(g, rng, 2, 0.5);
    auto V = [&](const PlateField& w) { return plate_energy(PlateState{w, PlateField(g), 0.0}, p).e_pl; };
    double tau = 0.5, cur = V(u);
    for (int it = 0; it < 300 && tau > 1e-12; ++it) {
      PlateField v = airy_solve(u, u);
      PlateField grad = biharmonic_apply(u) - vk_bracket(u, v) - 2.0 * vk_bracket(u, p.F0) + p.p0;
      grad.zero_boundary();
      const PlateField dir = biharmonic_solve(grad);
      PlateField trial = u;
      trial.axpy(-tau, dir);
      const double val = V(trial);
      if (val < cur) {
        u = trial;
        cur = val;
        tau = std::min(1.0, 1.5 * tau);
      } else {
        tau *= 0.5;
      }
    }
    floor_est = std::min(floor_est, cur);
  }
  PlateState s0 = PlateState::zero(g);
  s0.u = smooth_clamped(g, rng, 2, 0.3);
  TimeIntegrator ti(p, 0.005, {});
  HistoryBuffer h;
  Trajectory tr = ti.run(s0, h, 5.0);
  double lowest = 0.0;
  for (const auto& r : tr.rows) lowest = std::min(lowest, r.energy.e_pl);
  MESSAGE("estimated floor " << floor_est << ", lowest along run " << lowest);
  CHECK(lowest >= floor_est - 1e-9 * std::abs(floor_est));
}
