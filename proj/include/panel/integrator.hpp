#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "panel/aero.hpp"
#include "panel/energy.hpp"
#include "panel/history.hpp"

namespace panel {

struct IntegratorOptions {
  /// When false the von Karman force is dropped (linear plate).
  bool nonlinear = true;
  /// Optional external load s(t), sampled at step midpoints.
  std::function<PlateField(double)> source;
  /// Quadrature for the delayed closure (t_star must be set for it).
  DelayQuadrature quad{};
  /// Adds sigma*B to the implicit operator and subtracts it from the
  /// extrapolated load, with sigma bounding the grid-scale stiffness of the
  /// cubic term. Without it, stiff modes of a deformed plate grow.
  bool stabilize = true;
};

/// Loads evaluated at one state.
struct ForcingEval {
  double t = 0.0;
  PlateField airy;   ///< v(u)
  PlateField load;   ///< p0 - drift*u_x - q: non-structural load without the u_t term
  PlateField total;  ///< explicitly advanced part: p0 - q + [u, v(u)]
};

struct DiagnosticsRow {
  double h2_norm = 0.0;
  double ut_norm = 0.0;
  double forcing_norm = 0.0;
  EnergyRecord energy;
};

struct Trajectory {
  explicit Trajectory(const Grid& g) : final_state(PlateState::zero(g)) {}

  double dt = 0.0;
  std::vector<DiagnosticsRow> rows;  ///< every step, including the initial state
  std::vector<PlateState> states;    ///< states on the stride
  PlateState final_state;

  double cumulative_residual() const;
};

/// Default step: 0.25 min(h)^2, capped at t*/8 for the delayed closure.
double default_dt(const Grid& g, const ModelParams& p, const DelayQuadrature& quad);

/// Crank-Nicolson on the linear part, Adams-Bashforth-2 on the rest.
///
/// The linear operator (1-alpha Lap)u_tt + (k + c) u_t + K u with
/// K u = B u - [u,F0] + d u_x (c, d from the closure) is advanced by the
/// trapezoidal rule. The cubic term [u,v(u)], p0 and the delayed potential
/// are extrapolated from the two most recent time levels in the history.
/// sigma*B is moved from the explicit to the implicit side. sigma bounds the
/// stiffness of the linearized cubic term against B at the current state
/// (max|v|/3 + max|u|^2/9) and is rounded up to a power of two,
/// so a step depends only on the state and history it starts from.
class TimeIntegrator {
public:
  TimeIntegrator(ModelParams params, double dt, IntegratorOptions opts = {});

  /// One step from `s`. The history must end at s (it is appended if not)
  /// and receives the new state.
  PlateState step(const PlateState& s, HistoryBuffer& history);

  /// Integrates for T time units from `initial`, recording diagnostics
  /// every step and the states whose global index step_offset + n is a
  /// multiple of `stride`.
  Trajectory run(const PlateState& initial, HistoryBuffer& history, double T, int stride = 1,
                 double diss_offset = 0.0, long step_offset = 0);

  /// Prehistory holding `initial` at every stored time before t0.
  HistoryBuffer flat_prehistory(const PlateState& initial) const;

  /// Explicit load at a state (cached by time and displacement).
  const ForcingEval& forcing(const PlateState& s, const HistoryBuffer& history);

  /// Complete non-structural load at a state, as used in the work term.
  PlateField work_load(const PlateState& s, const ForcingEval& f) const;

  double dt() const noexcept { return dt_; }
  double damping() const noexcept { return damping_; }
  const ModelParams& params() const noexcept { return params_; }
  const IntegratorOptions& options() const noexcept { return opts_; }
  long steps_taken() const noexcept { return steps_; }
  /// Stabilization coefficient used by the most recent step.
  double stabilization() const noexcept { return sigma_; }

private:
  ModelParams params_;
  double dt_;
  IntegratorOptions opts_;
  double damping_;  ///< k + closure u_t coefficient
  double drift_;
  SparseMatrix M_, K_, B_;
  /// Step-matrix factorizations keyed by sigma.
  std::map<double, std::unique_ptr<Eigen::SparseLU<SparseMatrix>>> solvers_;
  double sigma_ = 0.0;
  long steps_ = 0;

  const Eigen::SparseLU<SparseMatrix>& solver(double sigma);

  struct CacheEntry {
    PlateField u;
    ForcingEval eval;
  };
  std::vector<CacheEntry> cache_;
  const HistoryBuffer* cache_owner_ = nullptr;

  ForcingEval evaluate(const PlateState& s, const HistoryBuffer& history) const;
  double horizon() const;
};

}  // namespace panel
