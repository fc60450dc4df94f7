#pragma once

#include <deque>
#include <vector>

#include "panel/grid.hpp"
#include "panel/plate_ops.hpp"

namespace panel {

/// One stored phase point plus the nodal second differences of u.
struct Snapshot {
  double t;
  PlateField u;
  PlateField v;
  Hessian d2;
};

/// Time-ordered snapshots on a uniform step, retaining at least the
/// window [t - horizon, t].
///
/// Not internally synchronized: concurrent const access is safe, push
/// requires exclusive access.
class HistoryBuffer {
public:
  explicit HistoryBuffer(double horizon = 0.0) : horizon_(horizon) {}

  /// A buffer covering [t0 - horizon, t0] with copies of `state`
  /// spaced by dt (the flat prehistory).
  static HistoryBuffer flat(const PlateState& state, double horizon, double dt);

  /// Rebuilds a saved buffer; `dt` is the stored step, so restarted runs match bitwise.
  static HistoryBuffer restore(double horizon, double dt, const std::vector<PlateState>& states);

  /// Appends a state; times must increase by a uniform step.
  void push(const PlateState& s);

  double horizon() const noexcept { return horizon_; }
  void set_horizon(double h) noexcept { horizon_ = h; }

  bool empty() const noexcept { return snaps_.empty(); }
  std::size_t size() const noexcept { return snaps_.size(); }
  const Snapshot& front() const { return snaps_.front(); }
  const Snapshot& back() const { return snaps_.back(); }
  const Snapshot& operator[](std::size_t i) const { return snaps_[i]; }
  /// Snapshot spacing; 0 with fewer than two snapshots.
  double dt() const noexcept { return dt_; }

  /// Snapshot stored at time t (relative tolerance 1e-9 of dt), or nullptr.
  const Snapshot* find(double t) const;

  /// Linear interpolation weights for time t: value = wa*a + wb*b.
  struct Bracket {
    const Snapshot* a;
    const Snapshot* b;
    double wa, wb;
  };
  /// Throws HistoryUnderflow when t is outside the stored range.
  Bracket locate(double t) const;

  bool covers(double t0, double t1) const;

private:
  double horizon_;
  double dt_ = 0.0;
  std::deque<Snapshot> snaps_;
};

}  // namespace panel
