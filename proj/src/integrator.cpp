#include "panel/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "panel/errors.hpp"
#include "panel/plate_ops.hpp"

namespace panel {

namespace {

// Bound on the linearized cubic term relative to B. The symmetrized discrete
// bracket keeps a fourth-order remainder weighted by v and by u^2 on grid-scale
// modes; measured coefficients are about 0.21 and 0.066.
double stiffness_bound(const PlateField& u, const PlateField& airy) {
  const double mu = norm_max(u);
  const double sigma = norm_max(airy) / 3.0 + mu * mu / 9.0;
  if (!(sigma > 0x1p-30)) return 0.0;
  int e = 0;
  const double m = std::frexp(sigma, &e);
  return m == 0.5 ? sigma : std::ldexp(1.0, e);
}

}  // namespace

double Trajectory::cumulative_residual() const {
  double s = 0.0;
  for (const DiagnosticsRow& r : rows) s += r.energy.balance_residual;
  return s;
}

double default_dt(const Grid& g, const ModelParams& p, const DelayQuadrature& quad) {
  const double h = std::min(g.hx(), g.hy());
  double dt = 0.25 * h * h;
  if (p.closure == Closure::DelayedPotential && quad.t_star > 0.0)
    dt = std::min(dt, quad.t_star / 8.0);
  return dt;
}

TimeIntegrator::TimeIntegrator(ModelParams params, double dt, IntegratorOptions opts)
    : params_(std::move(params)), dt_(dt), opts_(std::move(opts)) {
  params_.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  if (params_.closure == Closure::DelayedPotential) opts_.quad.validate();
  const PistonCoefficients pc = piston_coefficients(params_);
  damping_ = params_.k + pc.damping;
  drift_ = pc.drift;

  const Grid& g = params_.grid();
  const int n = g.interior_count();
  SparseMatrix id(n, n);
  id.setIdentity();
  M_ = id;
  if (params_.alpha != 0.0) M_ -= params_.alpha * assemble_dirichlet_laplacian(g);
  B_ = BiharmonicSolver::for_grid(g)->matrix();
  K_ = B_;
  if (opts_.nonlinear) K_ -= assemble_load_operator(params_.F0);
  if (drift_ != 0.0) K_ += drift_ * assemble_dx(g);
  solver(0.0);
}

const Eigen::SparseLU<SparseMatrix>& TimeIntegrator::solver(double sigma) {
  auto it = solvers_.find(sigma);
  if (it != solvers_.end()) return *it->second;
  if (solvers_.size() >= 8) solvers_.clear();
  SparseMatrix id(M_.rows(), M_.cols());
  id.setIdentity();
  SparseMatrix S = M_ + (0.25 * dt_ * dt_) * K_ + (0.5 * dt_ * damping_) * id;
  if (sigma != 0.0) S += (0.25 * dt_ * dt_ * sigma) * B_;
  S.makeCompressed();
  auto lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
  lu->analyzePattern(S);
  lu->factorize(S);
  if (lu->info() != Eigen::Success) throw SolverError("step matrix factorization failed", NAN);
  return *solvers_.emplace(sigma, std::move(lu)).first->second;
}

double TimeIntegrator::horizon() const {
  return params_.closure == Closure::DelayedPotential ? opts_.quad.t_star : 0.0;
}

HistoryBuffer TimeIntegrator::flat_prehistory(const PlateState& initial) const {
  // One extra step so the first AB2 evaluation at t0 - dt is also covered.
  const double h = horizon();
  HistoryBuffer out = HistoryBuffer::flat(initial, h > 0.0 ? h + dt_ : 0.0, dt_);
  out.set_horizon(h);
  return out;
}

ForcingEval TimeIntegrator::evaluate(const PlateState& s, const HistoryBuffer& history) const {
  const Grid& g = params_.grid();
  PlateField u = s.u;
  u.set_bc(Bc::Clamped);
  ForcingEval e{s.t, PlateField(g), params_.p0, params_.p0};
  if (drift_ != 0.0) e.load.axpy(-drift_, d_x(u));
  if (params_.closure == Closure::DelayedPotential) {
    const PlateField q = delayed_potential(history, s.t, params_, opts_.quad);
    e.load -= q;
    e.total -= q;
  }
  if (opts_.nonlinear) {
    // Same as airy_solve(u, u), with an overflow check on the bracket.
    const PlateField b = -1.0 * vk_bracket(u, u);
    if (!std::isfinite(norm_l2(b)))
      throw DivergenceError("von Karman bracket overflowed at t = " + std::to_string(s.t), steps_);
    e.airy = biharmonic_solve(b);
    e.total += vk_bracket(u, e.airy);
  }
  return e;
}

const ForcingEval& TimeIntegrator::forcing(const PlateState& s, const HistoryBuffer& history) {
  if (&history != cache_owner_) {
    cache_.clear();
    cache_owner_ = &history;
  }
  for (const CacheEntry& c : cache_)
    if (c.eval.t == s.t && std::equal(c.u.values().begin(), c.u.values().end(),
                                      s.u.values().begin()))
      return c.eval;
  if (cache_.size() >= 3) cache_.erase(cache_.begin());
  cache_.push_back(CacheEntry{s.u, evaluate(s, history)});
  return cache_.back().eval;
}

PlateField TimeIntegrator::work_load(const PlateState& s, const ForcingEval& f) const {
  PlateField p = f.load;
  const double c = damping_ - params_.k;
  if (c != 0.0) p.axpy(-c, s.v);
  if (opts_.source) p += opts_.source(s.t);
  return p;
}

PlateState TimeIntegrator::step(const PlateState& s, HistoryBuffer& history) {
  require_same_grid(s.u, params_.p0, "step");
  require_same_grid(s.v, params_.p0, "step");
  if (params_.closure == Closure::DelayedPotential && history.horizon() < opts_.quad.t_star)
    history.set_horizon(opts_.quad.t_star);
  if (history.find(s.t) == nullptr) history.push(s);

  const ForcingEval& fe = forcing(s, history);
  const double sigma = opts_.stabilize && opts_.nonlinear ? stiffness_bound(s.u, fe.airy) : 0.0;
  PlateField G = fe.total;
  // sigma B (u_ext - u_n): zero on the first step, 0.5 sigma B (u_n - u_{n-1}) after.
  Eigen::VectorXd stab;
  if (const Snapshot* prev = history.find(s.t - dt_)) {
    const PlateField g_prev = forcing(PlateState{prev->u, prev->v, prev->t}, history).total;
    G *= 1.5;
    G.axpy(-0.5, g_prev);
    if (sigma != 0.0) stab = (0.5 * sigma) * (B_ * (to_interior(s.u) - to_interior(prev->u)));
  }
  if (opts_.source) G += opts_.source(s.t + 0.5 * dt_);

  const Grid& g = params_.grid();
  const Eigen::VectorXd u = to_interior(s.u), v = to_interior(s.v);
  Eigen::VectorXd rhs =
      dt_ * (M_ * v) - (0.5 * dt_ * dt_) * (K_ * u) + (0.5 * dt_ * dt_) * to_interior(G);
  if (stab.size() != 0) rhs += (0.5 * dt_ * dt_) * stab;
  sigma_ = sigma;
  const Eigen::VectorXd delta = solver(sigma).solve(rhs);
  ++steps_;
  if (!delta.allFinite())
    throw DivergenceError("non-finite state at step " + std::to_string(steps_) + " (t = " +
                              std::to_string(s.t + dt_) + ")",
                          steps_);

  PlateState out{from_interior(g, u + delta), from_interior(g, (2.0 / dt_) * delta - v),
                 s.t + dt_};
  history.push(out);
  return out;
}

Trajectory TimeIntegrator::run(const PlateState& initial, HistoryBuffer& history, double T,
                               int stride, double diss_offset, long step_offset) {
  if (!(T > 0.0)) throw DomainError("run: T must be positive");
  if (stride < 1) throw DomainError("run: stride must be >= 1");
  const long n_steps = std::lround(T / dt_);
  if (n_steps < 1) throw DomainError("run: T shorter than one step");

  Trajectory tr(params_.grid());
  tr.dt = dt_;
  tr.rows.reserve(static_cast<std::size_t>(n_steps) + 1);
  PlateState s = initial;
  if (history.find(s.t) == nullptr) history.push(s);

  auto diagnostics = [&](const PlateState& st, const ForcingEval& fe) {
    DiagnosticsRow r;
    r.h2_norm = norm_h2(st.u);
    r.ut_norm = norm_l2(st.v);
    r.forcing_norm = norm_l2(fe.total);
    r.energy = plate_energy(st, params_, fe.airy, opts_.nonlinear);
    return r;
  };

  ForcingEval fe = forcing(s, history);
  DiagnosticsRow row = diagnostics(s, fe);
  row.energy.diss_cum = diss_offset;
  tr.rows.push_back(row);
  if (step_offset % stride == 0) tr.states.push_back(s);
  for (long n = 1; n <= n_steps; ++n) {
    PlateState s1 = step(s, history);
    ForcingEval fe1 = forcing(s1, history);
    DiagnosticsRow row1 = diagnostics(s1, fe1);
    row1.energy.diss_cum =
        row.energy.diss_cum + 0.5 * dt_ * params_.k * (inner(s.v, s.v) + inner(s1.v, s1.v));
    row1.energy.balance_residual = balance_residual(row.energy, row1.energy, s, s1,
                                                    work_load(s, fe), work_load(s1, fe1),
                                                    params_.k);
    tr.rows.push_back(row1);
    if ((step_offset + n) % stride == 0) tr.states.push_back(s1);
    s = std::move(s1);
    fe = std::move(fe1);
    row = row1;
  }
  tr.final_state = s;
  return tr;
}

}  // namespace panel
