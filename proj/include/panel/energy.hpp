#pragma once

#include <vector>

#include "panel/model.hpp"

namespace panel {

/// Energy components of one state.
struct EnergyRecord {
  double t = 0.0;
  double e_pl = 0.0;           ///< sum of the five components below
  double kinetic = 0.0;        ///< 1/2 (|u_t|^2 + alpha |grad u_t|^2)
  double bending = 0.0;        ///< 1/2 |Lap u|^2
  double airy = 0.0;           ///< 1/4 |Lap v(u)|^2
  double inplane_work = 0.0;   ///< -<F0,[u,u]>
  double pressure_work = 0.0;  ///< <p0,u>
  double diss_cum = 0.0;       ///< cumulative trapezoid of k |u_t|^2
  double balance_residual = 0.0;

  /// Conserved quantity of the unforced, undamped plate:
  /// kinetic + bending + Pi(u). Pressure enters through the work term instead.
  double balance_energy() const noexcept { return kinetic + bending + airy + 0.5 * inplane_work; }
};

/// Energy of a state. With `nonlinear` false the Airy and in-plane terms
/// are left at zero (linear plate).
EnergyRecord plate_energy(const PlateState& s, const ModelParams& p, bool nonlinear = true);

/// Same, with the Airy function of s.u supplied.
EnergyRecord plate_energy(const PlateState& s, const ModelParams& p, const PlateField& airy,
                          bool nonlinear = true);

/// 1/2 (|w|^2 + alpha |grad w|^2) with edge differences (w = 0 on the boundary).
double kinetic_energy(const PlateField& w, double alpha);

/// Energy-identity defect over one step [a, b]:
/// E(b) - E(a) + int k|u_t|^2 - int <p, u_t>, trapezoid in time.
/// pa, pb are the complete non-structural loads at the two ends
/// (static pressure, aerodynamic terms and any external source).
double balance_residual(const EnergyRecord& ea, const EnergyRecord& eb, const PlateState& a,
                        const PlateState& b, const PlateField& pa, const PlateField& pb,
                        double k);

/// Convenience form that computes the energies.
double balance_residual(const PlateState& a, const PlateState& b, const PlateField& pa,
                        const PlateField& pb, const ModelParams& p, bool nonlinear = true);

/// Trapezoid accumulation of k |u_t|^2 over uniformly spaced samples of |u_t|.
double dissipation_integral(const std::vector<double>& ut_norms, double dt, double k);

}  // namespace panel
