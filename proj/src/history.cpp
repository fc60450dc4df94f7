#include "panel/history.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "panel/errors.hpp"

namespace panel {

namespace {

constexpr double kTimeTol = 1e-9;

}  // namespace

HistoryBuffer HistoryBuffer::flat(const PlateState& state, double horizon, double dt) {
  if (!(dt > 0.0)) throw DomainError("flat prehistory needs dt > 0");
  if (!(horizon >= 0.0)) throw DomainError("flat prehistory needs horizon >= 0");
  HistoryBuffer h(horizon);
  const long m = static_cast<long>(std::ceil(horizon / dt - kTimeTol));
  for (long k = m; k >= 1; --k) {
    PlateState s = state;
    s.t = state.t - static_cast<double>(k) * dt;
    h.push(s);
  }
  h.push(state);
  return h;
}

HistoryBuffer HistoryBuffer::restore(double horizon, double dt,
                                     const std::vector<PlateState>& states) {
  if (!(horizon >= 0.0)) throw DomainError("history restore needs horizon >= 0");
  if (!(dt >= 0.0)) throw DomainError("history restore needs dt >= 0");
  HistoryBuffer h(horizon);
  h.dt_ = dt;
  for (const PlateState& s : states) h.push(s);
  return h;
}

void HistoryBuffer::push(const PlateState& s) {
  require_same_grid(s.u, s.v, "HistoryBuffer::push");
  if (!snaps_.empty()) {
    require_same_grid(s.u, snaps_.back().u, "HistoryBuffer::push");
    const double step = s.t - snaps_.back().t;
    if (!(step > 0.0))
      throw DomainError("history times must increase (got " + std::to_string(s.t) + " after " +
                        std::to_string(snaps_.back().t) + ")");
    if (dt_ == 0.0) {
      dt_ = step;
    } else if (std::abs(step - dt_) > kTimeTol * dt_ + 1e-12 * std::abs(s.t)) {
      throw DomainError("history step " + std::to_string(step) + " differs from " +
                        std::to_string(dt_));
    }
  }
  PlateField u = s.u;
  u.set_bc(Bc::Clamped);
  Hessian d2 = hessian(u);
  snaps_.push_back(Snapshot{s.t, std::move(u), s.v, std::move(d2)});
  if (dt_ > 0.0) {
    const double keep_from = s.t - horizon_ - 2.0 * dt_ - kTimeTol * dt_;
    while (snaps_.size() > 1 && snaps_.front().t < keep_from) snaps_.pop_front();
  }
}

const Snapshot* HistoryBuffer::find(double t) const {
  if (snaps_.empty()) return nullptr;
  const double tol = kTimeTol * (dt_ > 0 ? dt_ : 1.0);
  auto it = std::lower_bound(snaps_.begin(), snaps_.end(), t - tol,
                             [](const Snapshot& a, double x) { return a.t < x; });
  if (it != snaps_.end() && std::abs(it->t - t) <= tol) return &*it;
  return nullptr;
}

HistoryBuffer::Bracket HistoryBuffer::locate(double t) const {
  if (snaps_.empty()) throw HistoryUnderflow("history is empty");
  const double tol = kTimeTol * (dt_ > 0 ? dt_ : 1.0);
  if (t < snaps_.front().t - tol || t > snaps_.back().t + tol)
    throw HistoryUnderflow("history covers [" + std::to_string(snaps_.front().t) + ", " +
                           std::to_string(snaps_.back().t) + "], requested t = " +
                           std::to_string(t));
  auto it = std::lower_bound(snaps_.begin(), snaps_.end(), t,
                             [](const Snapshot& a, double x) { return a.t < x; });
  if (it == snaps_.end()) return {&snaps_.back(), &snaps_.back(), 1.0, 0.0};
  if (std::abs(it->t - t) <= tol || it == snaps_.begin()) return {&*it, &*it, 1.0, 0.0};
  const Snapshot& b = *it;
  const Snapshot& a = *(it - 1);
  if (std::abs(a.t - t) <= tol) return {&a, &a, 1.0, 0.0};
  const double wb = (t - a.t) / (b.t - a.t);
  return {&a, &b, 1.0 - wb, wb};
}

bool HistoryBuffer::covers(double t0, double t1) const {
  if (snaps_.empty()) return false;
  const double tol = kTimeTol * (dt_ > 0 ? dt_ : 1.0);
  return snaps_.front().t <= t0 + tol && snaps_.back().t >= t1 - tol;
}

}  // namespace panel
