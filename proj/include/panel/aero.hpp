#pragma once

#include "panel/history.hpp"
#include "panel/model.hpp"

namespace panel {

/// Tensor-product quadrature for the delayed potential.
struct DelayQuadrature {
  int n_theta = 32;
  int n_s = 32;
  double t_star = 0.0;

  void validate() const;
};

/// Memory length of the delayed potential: the largest time a flow
/// characteristic launched from a grid node stays over the plate.
/// `n_theta` directions are swept (a multiple of 4 includes the axes).
double delay_horizon(const Grid& g, double U, int n_theta = 256);

/// Delayed aeroelastic potential q^u(t) from the stored history.
PlateField delayed_potential(const HistoryBuffer& history, double t, const ModelParams& params,
                             const DelayQuadrature& quad);

/// Time-independent potential for a history frozen at u.
PlateField stationary_potential(const PlateField& u, const ModelParams& params,
                                const DelayQuadrature& quad);

/// p0 - u_t - U u_x.
PlateField piston_classical(const PlateState& state, const ModelParams& params);

/// p0 - U/sqrt(U^2-1) ((U^2-2)/(U^2-1) u_t + U u_x); requires U > 1.
PlateField piston_lowfreq(const PlateState& state, const ModelParams& params);

/// Closure dispatch. Delayed: p0 - u_t - U u_x - q^u(t). None: p0.
PlateField rhs_assemble(const PlateState& state, const HistoryBuffer& history,
                        const ModelParams& params, const DelayQuadrature& quad);

}  // namespace panel
