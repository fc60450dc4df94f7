#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "panel/aero.hpp"
#include "panel/errors.hpp"
#include "test_support.hpp"

using namespace panel;
using namespace testkit;
using std::numbers::pi;

namespace {

// Exit time by bisection on the membership predicate along the ray.
double bisect_exit(double x, double y, double vx, double vy, double lx, double ly) {
  auto inside = [&](double s) {
    const double px = x + vx * s, py = y + vy * s;
    return px >= 0 && px <= lx && py >= 0 && py <= ly;
  };
  double hi = 1.0;
  while (inside(hi)) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

double horizon_oracle(const Grid& g, double U, int n_theta) {
  double t = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double th = 2 * pi * (k + 0.5) / n_theta;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        t = std::max(t, bisect_exit(g.x(i), g.y(j), -(U + std::sin(th)), -std::cos(th), g.lx(),
                                    g.ly()));
  }
  return t;
}

// Smooth history whose second derivatives vanish on the boundary.
double bump4(double x, double y) { return std::pow(std::sin(pi * x) * std::sin(pi * y), 4); }

HistoryBuffer analytic_history(const Grid& g, double t_end, double span, double dt,
                               double scale = 1.0) {
  HistoryBuffer h(span);
  const long n = std::lround(span / dt);
  for (long k = -n - 2; k <= 0; ++k) {
    const double t = t_end + k * dt;
    PlateState s = PlateState::zero(g, t);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x(i), y = g.y(j);
        s.u(i, j) = scale * (bump4(x, y) * std::cos(1.3 * t) +
                             0.5 * bump4(x, y) * std::sin(pi * x) * std::sin(0.7 * t + 0.2));
      }
    h.push(s);
  }
  return h;
}

ModelParams params_for(const Grid& g, double U, Closure c = Closure::DelayedPotential) {
  ModelParams p(g);
  p.U = U;
  p.closure = c;
  return p;
}

}  // namespace

TEST_CASE("delay horizon matches the bisection oracle") {
  Grid g(17, 17);
  for (double U : {1.5, 2.0, 4.0, 0.5}) {
    const double got = delay_horizon(g, U);
    const double want = horizon_oracle(g, U, 2560);
    CHECK(std::abs(got - want) <= 0.02 * want);
  }
  CHECK(delay_horizon(g, 2.0) <= std::sqrt(2.0) + 1e-12);
}

TEST_CASE("delay horizon is nonincreasing in U above one and scales like 1/U") {
  Grid g(21, 21);
  double prev = std::numeric_limits<double>::infinity();
  for (double U = 1.05; U < 20; U *= 1.1) {
    const double t = delay_horizon(g, U);
    CHECK(t <= prev + 1e-14);
    prev = t;
  }
  const double c4 = 4 * delay_horizon(g, 4), c16 = 16 * delay_horizon(g, 16);
  CHECK(c16 <= c4);
  CHECK(c16 >= 0.5 * c4);
}

TEST_CASE("delay horizon degenerates correctly") {
  CHECK_THROWS_AS(delay_horizon(Grid(9, 9), 1.0), DomainError);
  CHECK(delay_horizon(Grid(9, 9, 1e-6, 1e-6), 2.0) < 1e-5);
}

TEST_CASE("zero history gives exactly zero potential") {
  Grid g(13, 13);
  HistoryBuffer h = HistoryBuffer::flat(PlateState::zero(g, 1.0), 0.5, 0.05);
  DelayQuadrature q{16, 8, 0.5};
  auto out = delayed_potential(h, 1.0, params_for(g, 2.0), q);
  CHECK(norm_max(out) == 0.0);
}

TEST_CASE("constant history gives a time-independent potential") {
  std::mt19937_64 rng(3);
  Grid g(13, 13);
  PlateState s = PlateState::zero(g, 0.0);
  s.u = smooth_clamped(g, rng);
  HistoryBuffer h = HistoryBuffer::flat(s, 2.0, 0.1);
  for (int k = 1; k <= 10; ++k) {
    s.t = k * 0.1;
    h.push(s);
  }
  auto p = params_for(g, 2.0);
  DelayQuadrature q{16, 7, 1.0};
  auto a = delayed_potential(h, 1.0, p, q);
  auto b = delayed_potential(h, 0.73, p, q);
  auto c = stationary_potential(s.u, p, q);
  CHECK(norm_max(a - b) <= 1e-13 * norm_max(a));
  CHECK(norm_max(a - c) <= 1e-13 * norm_max(a));
}

TEST_CASE("delayed potential is linear in the history") {
  std::mt19937_64 rng(5);
  Grid g(11, 11);
  HistoryBuffer h1(1.0), h2(1.0), h3(1.0);
  const double a = 1.7, b = -0.4;
  for (int k = 0; k <= 12; ++k) {
    PlateState s1 = PlateState::zero(g, k * 0.1), s2 = s1;
    s1.u = random_clamped(g, rng);
    s2.u = random_clamped(g, rng);
    PlateState s3 = s1;
    s3.u = a * s1.u + b * s2.u;
    h1.push(s1);
    h2.push(s2);
    h3.push(s3);
  }
  auto p = params_for(g, 1.5);
  DelayQuadrature q{12, 9, 0.95};
  auto lhs = delayed_potential(h3, 1.2, p, q);
  auto rhs = a * delayed_potential(h1, 1.2, p, q) + b * delayed_potential(h2, 1.2, p, q);
  CHECK(norm_max(lhs - rhs) <= 1e-13 * norm_max(lhs));
}

TEST_CASE("short history raises underflow") {
  Grid g(9, 9);
  HistoryBuffer h = HistoryBuffer::flat(PlateState::zero(g, 0.0), 0.2, 0.1);
  DelayQuadrature q{8, 4, 1.0};
  CHECK_THROWS_AS(delayed_potential(h, 0.0, params_for(g, 2.0), q), HistoryUnderflow);
  CHECK_THROWS_AS(delayed_potential(HistoryBuffer(), 0.0, params_for(g, 2.0), q),
                  HistoryUnderflow);
}

TEST_CASE("delayed potential quadrature self-converges at second order") {
  Grid g(33, 33);
  const double U = 2.0;
  const double ts = delay_horizon(g, U);
  const int finest = 128;
  HistoryBuffer h = analytic_history(g, 3.0, ts, ts / finest);
  auto p = params_for(g, U);
  std::vector<PlateField> qs;
  for (int n : {16, 32, 64, 128}) qs.push_back(delayed_potential(h, 3.0, p, {n, n, ts}));
  const double d1 = norm_l2(qs[0] - qs[1]), d2 = norm_l2(qs[1] - qs[2]),
               d3 = norm_l2(qs[2] - qs[3]);
  const double o1 = std::log2(d1 / d2), o2 = std::log2(d2 / d3);
  MESSAGE("observed orders " << o1 << " " << o2);
  CHECK(o2 >= 1.9);
}

TEST_CASE("delayed potential stays bounded under grid refinement") {
  std::vector<double> peaks;
  for (int n : {17, 33, 65}) {
    Grid g(n, n);
    const double ts = delay_horizon(g, 2.0);
    HistoryBuffer h = analytic_history(g, 2.0, ts, ts / 32);
    peaks.push_back(norm_max(delayed_potential(h, 2.0, params_for(g, 2.0), {32, 32, ts})));
  }
  CHECK(peaks[2] <= 1.2 * peaks[0]);
  CHECK(peaks[2] >= 0.8 * peaks[0]);
}

TEST_CASE("potential norm against the windowed H2 integral stays bounded in U") {
  Grid g(17, 17);
  std::vector<double> ratio;
  for (double U : {2.0, 4.0, 8.0}) {
    const double ts = delay_horizon(g, U);
    const double dt = ts / 32;
    HistoryBuffer h = analytic_history(g, 2.0, ts, dt);
    auto q = delayed_potential(h, 2.0, params_for(g, U), {32, 32, ts});
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      if (h[k].t < 2.0 - ts - 1e-12) continue;
      const double a = norm_h2(h[k].u), b = norm_h2(h[k + 1].u);
      integral += 0.5 * dt * (a * a + b * b);
    }
    ratio.push_back(std::pow(norm_l2(q), 2) * U / integral);
  }
  MESSAGE("|q|^2 U / int |Lap u|^2 for U = 2,4,8: " << ratio[0] << " " << ratio[1] << " "
                                                   << ratio[2]);
  CHECK(ratio[2] <= 10 * ratio[0]);
}

TEST_CASE("classical piston") {
  std::mt19937_64 rng(1);
  Grid g(9, 9);
  auto p = params_for(g, 0.0, Closure::PistonClassical);
  p.p0 = smooth_free(g, rng);
  PlateState s = PlateState::zero(g);
  CHECK(norm_max(piston_classical(s, p) - p.p0) == 0.0);
  s.v = random_clamped(g, rng);
  s.u = random_clamped(g, rng);
  CHECK(norm_max(piston_classical(s, p) - (p.p0 - s.v)) == 0.0);

  std::vector<double> errs;
  for (int n : {17, 33}) {
    Grid gn(n, n);
    auto pn = params_for(gn, 2.0, Closure::PistonClassical);
    PlateState sn = PlateState::zero(gn);
    sn.u = PlateField::from_function(
        gn, [](double x, double y) { return std::pow(std::sin(pi * x), 2) * std::sin(pi * y); },
        Bc::Clamped);
    auto out = piston_classical(sn, pn);
    double e = 0.0;
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const double ux = pi * std::sin(2 * pi * gn.x(i)) * std::sin(pi * gn.y(j));
        e = std::max(e, std::abs(out(i, j) + 2.0 * ux));
      }
    errs.push_back(e);
  }
  CHECK(errs[0] / errs[1] > 3.5);
}

TEST_CASE("low-frequency piston coefficients") {
  Grid g(9, 9);
  std::mt19937_64 rng(2);
  auto p = params_for(g, std::sqrt(2.0), Closure::PistonLowFreq);
  PlateState s = PlateState::zero(g);
  s.u = random_clamped(g, rng);
  s.v = random_clamped(g, rng);
  PlateState s_novel = s;
  s_novel.v = PlateField(g);
  CHECK(norm_max(piston_lowfreq(s, p) - piston_lowfreq(s_novel, p)) < 1e-13);
  CHECK(piston_coefficients(p).drift == doctest::Approx(2.0));

  p.U = 1.2;
  CHECK(piston_coefficients(p).damping < 0.0);
  p.U = 2.0;
  CHECK(piston_coefficients(p).damping == doctest::Approx(0.7698003589).epsilon(1e-9));
  PlateState sv = PlateState::zero(g);
  sv.v = random_clamped(g, rng);
  CHECK(norm_max(piston_lowfreq(sv, p) + 0.7698003589195010 * sv.v) < 1e-12);

  p.U = 0.9;
  CHECK_THROWS_AS(piston_lowfreq(s, p), DomainError);
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("parameter validation") {
  Grid g(9, 9);
  ModelParams p(g);
  p.U = 1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.U = 0.5;
  CHECK_NOTHROW(p.validate());
  p.k = -1;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("rhs assembly dispatch") {
  std::mt19937_64 rng(4);
  Grid g(13, 13);
  auto p = params_for(g, 2.0);
  p.p0 = smooth_free(g, rng);
  PlateState s = PlateState::zero(g, 1.0);
  s.u = smooth_clamped(g, rng);
  s.v = random_clamped(g, rng);
  const PlateState before = s;
  const double ts = 0.5;
  DelayQuadrature q{16, 8, ts};

  HistoryBuffer zero_hist = HistoryBuffer::flat(PlateState::zero(g, 1.0), ts, 0.05);
  auto delayed = rhs_assemble(s, zero_hist, p, q);
  auto classical = p;
  classical.closure = Closure::PistonClassical;
  CHECK(norm_max(delayed - rhs_assemble(s, zero_hist, classical, q)) == 0.0);

  HistoryBuffer hist = HistoryBuffer::flat(s, ts, 0.05);
  auto full = rhs_assemble(s, hist, p, q);
  auto parts = p.p0 - s.v - 2.0 * d_x(s.u) - delayed_potential(hist, 1.0, p, q);
  CHECK(norm_max(full - parts) <= 1e-14 * norm_max(full));
  CHECK(norm_max(s.u - before.u) == 0.0);
  CHECK(norm_max(s.v - before.v) == 0.0);

  auto none = p;
  none.closure = Closure::None;
  CHECK(norm_max(rhs_assemble(s, hist, none, q) - p.p0) == 0.0);
}
