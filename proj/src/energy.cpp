#include "panel/energy.hpp"

#include <cmath>

#include "panel/errors.hpp"
#include "panel/plate_ops.hpp"

namespace panel {

double kinetic_energy(const PlateField& w, double alpha) {
  const Grid& g = w.grid();
  double e = 0.5 * inner(w, w);
  if (alpha != 0.0) {
    const double hx = g.hx(), hy = g.hy();
    double s = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 0; i < g.nx() - 1; ++i) {
        const double d = (w(i + 1, j) - w(i, j)) / hx;
        s += d * d;
      }
    for (int j = 0; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) {
        const double d = (w(i, j + 1) - w(i, j)) / hy;
        s += d * d;
      }
    e += 0.5 * alpha * s * hx * hy;
  }
  return e;
}

EnergyRecord plate_energy(const PlateState& s, const ModelParams& p, const PlateField& airy,
                          bool nonlinear) {
  require_same_grid(s.u, p.p0, "plate_energy");
  EnergyRecord r;
  r.t = s.t;
  r.kinetic = kinetic_energy(s.v, p.alpha);
  const double hu = norm_h2(s.u);
  r.bending = 0.5 * hu * hu;
  if (nonlinear) {
    const double hv = norm_h2(airy);
    r.airy = 0.25 * hv * hv;
    r.inplane_work = -inplane_form(p.F0, s.u, s.u);
  }
  r.pressure_work = inner(p.p0, s.u);
  r.e_pl = r.kinetic + r.bending + r.airy + r.inplane_work + r.pressure_work;
  return r;
}

EnergyRecord plate_energy(const PlateState& s, const ModelParams& p, bool nonlinear) {
  if (!nonlinear) return plate_energy(s, p, PlateField(s.u.grid()), false);
  return plate_energy(s, p, airy_solve(s.u, s.u), true);
}

double balance_residual(const EnergyRecord& ea, const EnergyRecord& eb, const PlateState& a,
                        const PlateState& b, const PlateField& pa, const PlateField& pb,
                        double k) {
  const double dt = b.t - a.t;
  const double diss = 0.5 * dt * k * (inner(a.v, a.v) + inner(b.v, b.v));
  const double work = 0.5 * dt * (inner(pa, a.v) + inner(pb, b.v));
  return eb.balance_energy() - ea.balance_energy() + diss - work;
}

double balance_residual(const PlateState& a, const PlateState& b, const PlateField& pa,
                        const PlateField& pb, const ModelParams& p, bool nonlinear) {
  return balance_residual(plate_energy(a, p, nonlinear), plate_energy(b, p, nonlinear), a, b, pa,
                          pb, p.k);
}

double dissipation_integral(const std::vector<double>& ut_norms, double dt, double k) {
  double s = 0.0;
  for (std::size_t n = 1; n < ut_norms.size(); ++n)
    s += 0.5 * dt * k * (ut_norms[n - 1] * ut_norms[n - 1] + ut_norms[n] * ut_norms[n]);
  return s;
}

}  // namespace panel
