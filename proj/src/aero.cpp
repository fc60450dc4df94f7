#include "panel/aero.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "panel/errors.hpp"

namespace panel {

std::string to_string(Closure c) {
  switch (c) {
    case Closure::None: return "none";
    case Closure::PistonClassical: return "piston_classical";
    case Closure::PistonLowFreq: return "piston_lowfreq";
    case Closure::DelayedPotential: return "delayed_potential";
  }
  return "unknown";
}

Closure closure_from_string(const std::string& s) {
  if (s == "none") return Closure::None;
  if (s == "piston_classical") return Closure::PistonClassical;
  if (s == "piston_lowfreq") return Closure::PistonLowFreq;
  if (s == "delayed_potential") return Closure::DelayedPotential;
  throw DomainError("unknown closure '" + s + "'");
}

void ModelParams::validate() const {
  require_same_grid(p0, F0, "ModelParams");
  if (!std::isfinite(U) || U < 0.0) throw DomainError("U must be finite and nonnegative");
  if (std::abs(U - 1.0) < 1e-12) throw DomainError("U = 1 (transonic) is excluded");
  if (!std::isfinite(k) || k < 0.0) throw DomainError("k must be nonnegative");
  if (!std::isfinite(alpha) || alpha < 0.0) throw DomainError("alpha must be nonnegative");
  if (closure == Closure::PistonLowFreq && !(U > 1.0))
    throw DomainError("low-frequency piston closure requires U > 1");
  if (!p0.all_finite() || !F0.all_finite()) throw DomainError("p0 and F0 must be finite");
}

PistonCoefficients piston_coefficients(const ModelParams& p) {
  switch (p.closure) {
    case Closure::None: return {0.0, 0.0};
    case Closure::PistonClassical:
    case Closure::DelayedPotential: return {1.0, p.U};
    case Closure::PistonLowFreq: {
      if (!(p.U > 1.0)) throw DomainError("low-frequency piston closure requires U > 1");
      const double a = p.U * p.U - 1.0;
      return {p.U * (p.U * p.U - 2.0) / std::pow(a, 1.5), p.U * p.U / std::sqrt(a)};
    }
  }
  return {};
}

void DelayQuadrature::validate() const {
  if (n_theta < 8 || n_theta % 2 != 0) throw DomainError("n_theta must be even and >= 8");
  if (n_s < 4) throw DomainError("n_s must be >= 4");
  if (!(t_star > 0.0) || !std::isfinite(t_star)) throw DomainError("t_star must be positive");
}

double delay_horizon(const Grid& g, double U, int n_theta) {
  if (!std::isfinite(U) || U < 0.0) throw DomainError("delay_horizon: U must be nonnegative");
  if (std::abs(U - 1.0) < 1e-12)
    throw DomainError("delay_horizon: U = 1 makes the drift speed vanish (t* infinite)");
  if (n_theta < 4) throw DomainError("delay_horizon: n_theta must be >= 4");
  constexpr double inf = std::numeric_limits<double>::infinity();
  double tmax = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n_theta;
    // Snap axis directions so sin/cos roundoff does not create spurious drift.
    double st = std::sin(th), ct = std::cos(th);
    if (std::abs(st) < 1e-15) st = 0.0;
    if (std::abs(ct) < 1e-15) ct = 0.0;
    const double vx = -(U + st), vy = -ct;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x(i), y = g.y(j);
        const double tx = vx < 0 ? x / -vx : (vx > 0 ? (g.lx() - x) / vx : inf);
        const double ty = vy < 0 ? y / -vy : (vy > 0 ? (g.ly() - y) / vy : inf);
        const double te = std::min(tx, ty);
        if (!std::isfinite(te)) throw DomainError("delay_horizon: characteristic never exits");
        tmax = std::max(tmax, te);
      }
  }
  return tmax;
}

namespace {

// Accumulates w * (M_theta^2 u)(x - shift) for all nodes, bilinear in space,
// zero outside the closed rectangle.
void accumulate_direction(PlateField& q, const PlateField& G, double sx, double sy, double w) {
  const Grid& g = q.grid();
  auto split = [](double a, long& o, double& f) {
    const double fl = std::floor(a);
    o = static_cast<long>(fl);
    f = a - fl;
    if (f < 1e-12) f = 0.0;
    if (f > 1.0 - 1e-12) {
      f = 0.0;
      ++o;
    }
  };
  long ox, oy;
  double fx, fy;
  split(-sx / g.hx(), ox, fx);
  split(-sy / g.hy(), oy, fy);
  const int nx = g.nx(), ny = g.ny();
  for (int j = 0; j < ny; ++j) {
    const long j0 = j + oy;
    if (j0 < 0 || j0 > ny - 1 || (j0 == ny - 1 && fy > 0.0)) continue;
    const int j1 = fy > 0.0 ? static_cast<int>(j0) + 1 : static_cast<int>(j0);
    for (int i = 0; i < nx; ++i) {
      const long i0 = i + ox;
      if (i0 < 0 || i0 > nx - 1 || (i0 == nx - 1 && fx > 0.0)) continue;
      const int ia = static_cast<int>(i0), ib = fx > 0.0 ? ia + 1 : ia;
      const int ja = static_cast<int>(j0);
      const double v = (1 - fx) * (1 - fy) * G(ia, ja) + fx * (1 - fy) * G(ib, ja) +
                       (1 - fx) * fy * G(ia, j1) + fx * fy * G(ib, j1);
      q(i, j) += w * v;
    }
  }
}

template <class HessianAt>
PlateField quadrature_sum(const Grid& g, double U, const DelayQuadrature& quad, HessianAt&& at) {
  quad.validate();
  PlateField q(g, Bc::Free);
  PlateField G(g, Bc::Free);
  const double ds = quad.t_star / quad.n_s;
  for (int l = 0; l <= quad.n_s; ++l) {
    const double s = l * ds;
    const double ws = (l == 0 || l == quad.n_s) ? 0.5 * ds : ds;
    const Hessian h = at(s);
    for (int k = 0; k < quad.n_theta; ++k) {
      const double th = 2.0 * std::numbers::pi * k / quad.n_theta;
      double st = std::sin(th), ct = std::cos(th);
      if (std::abs(st) < 1e-15) st = 0.0;
      if (std::abs(ct) < 1e-15) ct = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n)
        G[n] = st * st * h.xx[n] + 2.0 * st * ct * h.xy[n] + ct * ct * h.yy[n];
      accumulate_direction(q, G, (U + st) * s, ct * s, ws / quad.n_theta);
    }
  }
  return q;
}

}  // namespace

PlateField delayed_potential(const HistoryBuffer& history, double t, const ModelParams& params,
                             const DelayQuadrature& quad) {
  quad.validate();
  if (history.empty()) throw HistoryUnderflow("delayed_potential: history is empty");
  if (!history.covers(t - quad.t_star, t))
    throw HistoryUnderflow("delayed_potential: history does not cover [t - t*, t] at t = " +
                           std::to_string(t));
  const Grid& g = history.back().u.grid();
  require_same_grid(history.back().u, params.p0, "delayed_potential");
  return quadrature_sum(g, params.U, quad, [&](double s) {
    const HistoryBuffer::Bracket b = history.locate(t - s);
    if (b.wb == 0.0) return b.a->d2;
    Hessian h = b.a->d2;
    h.xx *= b.wa;
    h.yy *= b.wa;
    h.xy *= b.wa;
    h.xx.axpy(b.wb, b.b->d2.xx);
    h.yy.axpy(b.wb, b.b->d2.yy);
    h.xy.axpy(b.wb, b.b->d2.xy);
    return h;
  });
}

PlateField stationary_potential(const PlateField& u, const ModelParams& params,
                                const DelayQuadrature& quad) {
  require_same_grid(u, params.p0, "stationary_potential");
  PlateField uc = u;
  uc.set_bc(Bc::Clamped);
  const Hessian h = hessian(uc);
  return quadrature_sum(u.grid(), params.U, quad, [&](double) -> const Hessian& { return h; });
}

namespace {

PlateField drift_term(const PlateField& u) {
  PlateField uc = u;
  uc.set_bc(Bc::Clamped);
  return d_x(uc);
}

}  // namespace

PlateField piston_classical(const PlateState& state, const ModelParams& params) {
  require_same_grid(state.u, params.p0, "piston_classical");
  PlateField out = params.p0;
  out -= state.v;
  if (params.U != 0.0) out.axpy(-params.U, drift_term(state.u));
  return out;
}

PlateField piston_lowfreq(const PlateState& state, const ModelParams& params) {
  require_same_grid(state.u, params.p0, "piston_lowfreq");
  if (!(params.U > 1.0)) throw DomainError("piston_lowfreq requires U > 1");
  const double U = params.U, a = U * U - 1.0;
  const double c = U / std::sqrt(a);
  PlateField out = params.p0;
  out.axpy(-c * (U * U - 2.0) / a, state.v);
  out.axpy(-c * U, drift_term(state.u));
  return out;
}

PlateField rhs_assemble(const PlateState& state, const HistoryBuffer& history,
                        const ModelParams& params, const DelayQuadrature& quad) {
  switch (params.closure) {
    case Closure::None: return params.p0;
    case Closure::PistonClassical: return piston_classical(state, params);
    case Closure::PistonLowFreq: return piston_lowfreq(state, params);
    case Closure::DelayedPotential: {
      PlateField out = piston_classical(state, params);
      out -= delayed_potential(history, state.t, params, quad);
      return out;
    }
  }
  throw DomainError("unknown closure");
}

}  // namespace panel
