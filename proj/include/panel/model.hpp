#pragma once

#include <string>

#include "panel/grid.hpp"

namespace panel {

/// Aerodynamic closure. None gives the in-vacuo plate (p0 only).
enum class Closure { None, PistonClassical, PistonLowFreq, DelayedPotential };

std::string to_string(Closure c);
Closure closure_from_string(const std::string& s);

/// Physical parameters of one configuration.
struct ModelParams {
  explicit ModelParams(const Grid& g)
      : p0(g, Bc::Free), F0(g, Bc::Free) {}

  double U = 0.0;      ///< flow speed, U >= 0, U != 1
  double k = 0.0;      ///< structural damping
  double alpha = 0.0;  ///< rotational inertia
  PlateField p0;       ///< static pressure
  PlateField F0;       ///< in-plane load (Airy function), untagged
  Closure closure = Closure::PistonClassical;

  const Grid& grid() const noexcept { return p0.grid(); }
  /// Throws DomainError on inadmissible combinations.
  void validate() const;
};

/// Linear piston coefficients: the closure contributes -damping*u_t - drift*u_x.
struct PistonCoefficients {
  double damping = 0.0;
  double drift = 0.0;
};

PistonCoefficients piston_coefficients(const ModelParams& p);

}  // namespace panel
