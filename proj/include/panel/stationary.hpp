#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "panel/aero.hpp"
#include "panel/model.hpp"

namespace panel {

/// Options of the stationary problem.
struct StaticOptions {
  /// Adds the frozen-history delayed potential for the delayed closure.
  bool stationary_potential = false;
  DelayQuadrature quad{};
};

/// R(u) = B u - [u, v(u) + F0] - p0 + d u_x (+ q for the frozen delayed potential),
/// where d is the closure's drift coefficient. Boundary values are zero.
PlateField static_residual(const PlateField& u, const ModelParams& params,
                           const StaticOptions& opts = {});

/// Exact directional derivative J(u) h.
PlateField static_jacobian_apply(const PlateField& u, const PlateField& h,
                                 const ModelParams& params, const StaticOptions& opts = {});

/// Discrete dual norm sqrt(hx hy <R, B^{-1} R>), the residual measure used by the solver.
double residual_norm(const PlateField& r);

struct NewtonResult {
  explicit NewtonResult(PlateField u0) : u(std::move(u0)) {}
  PlateField u;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton iteration with GMRES inner solves preconditioned by B^{-1}.
/// Throws SolverError when max_iter is exceeded and NearBifurcationError when
/// the Jacobian is numerically singular.
NewtonResult newton_solve(const PlateField& u0, const ModelParams& params, double tol = 1e-10,
                          int max_iter = 50, const StaticOptions& opts = {});

/// Dense Jacobian on interior unknowns, assembled column by column.
Eigen::MatrixXd dense_jacobian(const PlateField& u, const ModelParams& params,
                               const StaticOptions& opts = {});

/// Smallest real part of the spectrum of J(u) and the matching (real part of the) eigenvector.
struct StabilityInfo {
  explicit StabilityInfo(const Grid& g) : mode(g) {}
  double min_real = 0.0;
  PlateField mode;
};
StabilityInfo stability(const PlateField& u, const ModelParams& params,
                        const StaticOptions& opts = {});

/// Unit uniaxial compression Airy function -y^2/2.
PlateField uniaxial_load(const Grid& g);

/// Parameters that continuation can sweep.
enum class SweepParameter { Lambda, U, PressureScale };
std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

struct ContinuationSpec {
  explicit ContinuationSpec(const Grid& g) : load_shape(uniaxial_load(g)), pressure_shape(g, Bc::Free) {}
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> values;       ///< monotone
  PlateField load_shape;            ///< F0 = lambda * load_shape (Lambda sweeps)
  PlateField pressure_shape;        ///< p0 = s * pressure_shape (PressureScale sweeps)
  double tol = 1e-10;
  int max_iter = 50;
  bool compute_stability = true;    ///< dense; skipped above 33x33
  /// Escape unstable equilibria along their softest mode.
  bool branch_switch = true;
  std::uint64_t seed = 1;
  StaticOptions statics{};
};

struct BranchPoint {
  explicit BranchPoint(const Grid& g) : u(g) {}
  double value = 0.0;
  PlateField u;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> min_real;
  /// Indicator of the unstable equilibrium abandoned by a branch switch.
  std::optional<double> switched_from;
  std::string note;
};

struct EquilibriumBranch {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<BranchPoint> points;
};

/// Natural-parameter continuation from `start` (zero field if omitted).
EquilibriumBranch continuation(const ModelParams& base, const ContinuationSpec& spec,
                               const std::optional<PlateField>& start = std::nullopt);

/// Onset of the nontrivial branch: root of a quadratic fit of |u|_H2^2 against the
/// parameter over the first `fit_points` points above `threshold`. Empty if none.
std::optional<double> branch_onset(const EquilibriumBranch& branch, double threshold = 1e-6,
                                   int fit_points = 4);

/// Parameter where the stability indicator first changes sign (linear interpolation).
std::optional<double> stability_crossing(const EquilibriumBranch& branch);

}  // namespace panel
