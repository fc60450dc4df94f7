#include "panel/stationary.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/IterativeSolvers>
#include <cmath>
#include <numbers>
#include <random>

#include "panel/errors.hpp"
#include "panel/plate_ops.hpp"

namespace panel::detail {
class JacobianOperator;
}

namespace Eigen::internal {
template <>
struct traits<panel::detail::JacobianOperator> : traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace panel {
namespace detail {

/// u -> J(u) with v(u) cached.
struct Linearization {
  Linearization(const PlateField& u_in, const ModelParams& p, const StaticOptions& o)
      : u(u_in), v(u_in.grid()), params(p), opts(o), drift(piston_coefficients(p).drift) {
    u.set_bc(Bc::Clamped);
    v = airy_solve(u, u);
  }

  PlateField apply(PlateField h) const {
    h.set_bc(Bc::Clamped);
    PlateField out = biharmonic_apply(h);
    out -= vk_bracket(h, v);
    out.axpy(-2.0, vk_bracket(u, airy_solve(u, h)));
    out -= vk_bracket(h, params.F0);
    if (drift != 0.0) out.axpy(drift, d_x(h));
    if (opts.stationary_potential && params.closure == Closure::DelayedPotential)
      out += stationary_potential(h, params, opts.quad);
    out.zero_boundary();
    return out;
  }

  PlateField u, v;
  const ModelParams& params;
  const StaticOptions& opts;
  double drift;
};

class JacobianOperator : public Eigen::EigenBase<JacobianOperator> {
public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit JacobianOperator(const Linearization& lin) : lin_(&lin) {}
  Eigen::Index rows() const { return lin_->u.grid().interior_count(); }
  Eigen::Index cols() const { return rows(); }

  template <typename Rhs>
  Eigen::Product<JacobianOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<JacobianOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return to_interior(lin_->apply(from_interior(lin_->u.grid(), x)));
  }

private:
  const Linearization* lin_;
};

/// B^{-1} preconditioner in the shape GMRES expects.
class BiharmonicPreconditioner {
public:
  BiharmonicPreconditioner() = default;
  template <typename M>
  explicit BiharmonicPreconditioner(const M&) {}
  template <typename M>
  BiharmonicPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  BiharmonicPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  BiharmonicPreconditioner& compute(const M&) { return *this; }

  void set(std::shared_ptr<const BiharmonicSolver> s) { solver_ = std::move(s); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return solver_ ? solver_->solve(b) : b; }
  Eigen::ComputationInfo info() { return Eigen::Success; }

private:
  std::shared_ptr<const BiharmonicSolver> solver_;
};

}  // namespace detail
}  // namespace panel

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<panel::detail::JacobianOperator, Rhs, SparseShape, DenseShape,
                            GemvProduct>
    : generic_product_impl_base<panel::detail::JacobianOperator, Rhs,
                                generic_product_impl<panel::detail::JacobianOperator, Rhs>> {
  using Scalar = typename Product<panel::detail::JacobianOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const panel::detail::JacobianOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace panel {

namespace {

StaticOptions resolved(const ModelParams& p, StaticOptions o) {
  if (o.stationary_potential && p.closure == Closure::DelayedPotential && !(o.quad.t_star > 0.0))
    o.quad.t_star = delay_horizon(p.grid(), p.U);
  return o;
}

PlateField random_shape(const Grid& g, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> n01;
  double c[3][3];
  for (auto& row : c)
    for (double& x : row) x = n01(rng);
  using std::numbers::pi;
  PlateField u = PlateField::from_function(
      g,
      [&](double x, double y) {
        const double xs = x / g.lx(), ys = y / g.ly();
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) s += c[m][n] * std::cos(m * pi * xs) * std::cos(n * pi * ys);
        return std::pow(std::sin(pi * xs) * std::sin(pi * ys), 2) * s;
      },
      Bc::Clamped);
  u.zero_boundary();
  const double nm = norm_h2(u);
  if (nm > 0.0) u *= amplitude / nm;
  return u;
}

}  // namespace

PlateField static_residual(const PlateField& u_in, const ModelParams& params,
                           const StaticOptions& opts_in) {
  require_same_grid(u_in, params.p0, "static_residual");
  const StaticOptions opts = resolved(params, opts_in);
  PlateField u = u_in;
  u.set_bc(Bc::Clamped);
  PlateField r = biharmonic_apply(u) + vk_force(u, params.F0) - params.p0;
  const double drift = piston_coefficients(params).drift;
  if (drift != 0.0) r.axpy(drift, d_x(u));
  if (opts.stationary_potential && params.closure == Closure::DelayedPotential)
    r += stationary_potential(u, params, opts.quad);
  r.zero_boundary();
  r.set_bc(Bc::Clamped);
  return r;
}

PlateField static_jacobian_apply(const PlateField& u, const PlateField& h,
                                 const ModelParams& params, const StaticOptions& opts_in) {
  require_same_grid(u, h, "static_jacobian_apply");
  const StaticOptions opts = resolved(params, opts_in);
  return detail::Linearization(u, params, opts).apply(h);
}

double residual_norm(const PlateField& r) {
  const Grid& g = r.grid();
  const Eigen::VectorXd b = to_interior(r);
  const Eigen::VectorXd x = BiharmonicSolver::for_grid(g)->solve(b);
  return std::sqrt(std::max(0.0, g.hx() * g.hy() * b.dot(x)));
}

NewtonResult newton_solve(const PlateField& u0, const ModelParams& params, double tol,
                          int max_iter, const StaticOptions& opts_in) {
  if (!(tol > 0.0)) throw DomainError("newton_solve: tol must be positive");
  if (max_iter < 1) throw DomainError("newton_solve: max_iter must be >= 1");
  params.validate();
  const StaticOptions opts = resolved(params, opts_in);
  const Grid& g = params.grid();

  NewtonResult res(u0);
  res.u.set_bc(Bc::Clamped);
  res.u.zero_boundary();
  PlateField r = static_residual(res.u, params, opts);
  res.residual = residual_norm(r);

  while (res.residual > tol) {
    if (res.iterations >= max_iter)
      throw SolverError("newton_solve: no convergence in " + std::to_string(max_iter) +
                            " iterations",
                        res.residual);
    const detail::Linearization lin(res.u, params, opts);
    const detail::JacobianOperator J(lin);
    Eigen::GMRES<detail::JacobianOperator, detail::BiharmonicPreconditioner> gmres;
    gmres.set_restart(60);
    gmres.setMaxIterations(600);
    gmres.setTolerance(1e-12);
    gmres.compute(J);
    gmres.preconditioner().set(BiharmonicSolver::for_grid(g));
    const Eigen::VectorXd delta = gmres.solve(-to_interior(r));
    if (gmres.info() != Eigen::Success && gmres.error() > 1e-6)
      throw NearBifurcationError("newton_solve: Jacobian numerically singular", res.residual);

    const PlateField step = from_interior(g, delta);
    double a = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, a *= 0.5) {
      PlateField trial = res.u;
      trial.axpy(a, step);
      PlateField rt = static_residual(trial, params, opts);
      const double nt = residual_norm(rt);
      if (nt < (1.0 - 1e-4 * a) * res.residual || nt <= tol) {
        res.u = std::move(trial);
        r = std::move(rt);
        res.residual = nt;
        accepted = true;
        break;
      }
    }
    ++res.iterations;
    if (!accepted)
      throw NearBifurcationError("newton_solve: line search failed to reduce the residual",
                                 res.residual);
  }
  return res;
}

Eigen::MatrixXd dense_jacobian(const PlateField& u, const ModelParams& params,
                               const StaticOptions& opts_in) {
  const StaticOptions opts = resolved(params, opts_in);
  const detail::Linearization lin(u, params, opts);
  const Grid& g = params.grid();
  const int n = g.interior_count();
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n; ++c) {
    e[c] = 1.0;
    J.col(c) = to_interior(lin.apply(from_interior(g, e)));
    e[c] = 0.0;
  }
  return J;
}

StabilityInfo stability(const PlateField& u, const ModelParams& params, const StaticOptions& opts) {
  const Grid& g = params.grid();
  const Eigen::MatrixXd J = dense_jacobian(u, params, opts);
  const double asym = (J - J.transpose()).norm();
  StabilityInfo out(g);
  if (asym <= 1e-10 * J.norm()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (J + J.transpose()));
    out.min_real = es.eigenvalues()[0];
    out.mode = from_interior(g, es.eigenvectors().col(0));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    const auto ev = es.eigenvalues();
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i)
      if (ev[i].real() < ev[k].real()) k = i;
    out.min_real = ev[k].real();
    Eigen::VectorXd m = es.eigenvectors().col(k).real();
    if (m.norm() == 0.0) m = es.eigenvectors().col(k).imag();
    out.mode = from_interior(g, m / m.norm());
  }
  return out;
}

PlateField uniaxial_load(const Grid& g) {
  return PlateField::from_function(g, [](double, double y) { return -0.5 * y * y; }, Bc::Free);
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Lambda: return "lambda";
    case SweepParameter::U: return "U";
    case SweepParameter::PressureScale: return "p0_scale";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "lambda") return SweepParameter::Lambda;
  if (s == "U") return SweepParameter::U;
  if (s == "p0_scale") return SweepParameter::PressureScale;
  throw ConfigError("sweep.parameter", "unknown sweep parameter '" + s + "'");
}

namespace {

void apply_parameter(ModelParams& p, const ContinuationSpec& spec, double value) {
  switch (spec.parameter) {
    case SweepParameter::Lambda: p.F0 = value * spec.load_shape; p.F0.set_bc(Bc::Free); break;
    case SweepParameter::U: p.U = value; break;
    case SweepParameter::PressureScale:
      p.p0 = value * spec.pressure_shape;
      p.p0.set_bc(Bc::Free);
      break;
  }
}

/// Amplitude along a unit mode where the cubic term balances a negative eigenvalue.
double escape_amplitude(const PlateField& mode, double min_real) {
  PlateField phi = mode;
  phi.set_bc(Bc::Clamped);
  const PlateField cubic = -1.0 * vk_bracket(phi, airy_solve(phi, phi));
  const double c3 = to_interior(cubic).dot(to_interior(phi));
  if (!(c3 > 0.0)) return 1.0;
  return std::sqrt(-min_real / c3);
}

}  // namespace

EquilibriumBranch continuation(const ModelParams& base, const ContinuationSpec& spec,
                               const std::optional<PlateField>& start) {
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    const double d0 = spec.values[1] - spec.values[0], d = spec.values[i] - spec.values[i - 1];
    if (d == 0.0 || d * d0 < 0.0) throw DomainError("continuation: sweep must be strictly monotone");
  }
  const Grid& g = base.grid();
  if (spec.parameter == SweepParameter::Lambda) require_same_grid(spec.load_shape, base.p0, "continuation");
  if (spec.parameter == SweepParameter::PressureScale)
    require_same_grid(spec.pressure_shape, base.p0, "continuation");
  const bool dense_ok = spec.compute_stability && g.nx() <= 33 && g.ny() <= 33;

  EquilibriumBranch branch;
  branch.parameter = spec.parameter;
  std::mt19937_64 rng(spec.seed);
  PlateField prev = start ? *start : PlateField(g);
  ModelParams p = base;

  for (double value : spec.values) {
    apply_parameter(p, spec, value);
    BranchPoint pt(g);
    pt.value = value;
    NewtonResult sol{PlateField(g)};
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      const PlateField guess = attempt == 0 ? prev : random_shape(g, rng, 1.0 + attempt);
      try {
        sol = newton_solve(guess, p, spec.tol, spec.max_iter, spec.statics);
        ok = true;
        if (attempt > 0) pt.note = "restarted from randomized guess";
      } catch (const SolverError& e) {
        pt.note = e.what();
        pt.residual = e.residual();
      }
    }
    if (!ok) {
      pt.u = prev;
      branch.points.push_back(std::move(pt));
      prev = random_shape(g, rng, 1.0);
      continue;
    }

    if (dense_ok) {
      StabilityInfo st = stability(sol.u, p, spec.statics);
      for (int sw = 0; spec.branch_switch && st.min_real < 0.0 && sw < 3; ++sw) {
        const double a = escape_amplitude(st.mode, st.min_real);
        bool moved = false;
        for (double sign : {1.0, -1.0}) {
          PlateField guess = sol.u;
          guess.axpy(sign * a, st.mode);
          try {
            NewtonResult alt = newton_solve(guess, p, spec.tol, spec.max_iter, spec.statics);
            StabilityInfo st2 = stability(alt.u, p, spec.statics);
            if (st2.min_real > st.min_real && norm_h2(alt.u - sol.u) > 1e-8) {
              if (sw == 0) {
                pt.switched_from = st.min_real;
                pt.note = "branch switch";
              }
              sol = std::move(alt);
              st = std::move(st2);
              moved = true;
              break;
            }
          } catch (const SolverError&) {
          }
        }
        if (!moved) break;
      }
      pt.min_real = st.min_real;
    }
    pt.u = sol.u;
    pt.residual = sol.residual;
    pt.iterations = sol.iterations;
    pt.converged = true;
    prev = sol.u;
    branch.points.push_back(std::move(pt));
  }
  return branch;
}

std::optional<double> branch_onset(const EquilibriumBranch& branch, double threshold,
                                   int fit_points) {
  const auto& pts = branch.points;
  std::size_t first = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].converged && norm_h2(pts[i].u) > threshold) {
      first = i;
      break;
    }
  if (first == pts.size()) return std::nullopt;
  std::vector<double> xs, ys;
  for (std::size_t i = first; i < pts.size() && static_cast<int>(xs.size()) < fit_points; ++i) {
    if (!pts[i].converged) continue;
    const double n = norm_h2(pts[i].u);
    if (n <= threshold) break;
    xs.push_back(pts[i].value);
    ys.push_back(n * n);
  }
  if (xs.size() < 2) return std::nullopt;
  const int deg = xs.size() >= 3 ? 2 : 1;
  const double x0 = xs.front();
  Eigen::MatrixXd A(xs.size(), deg + 1);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (int d = 0; d <= deg; ++d) A(i, d) = std::pow(xs[i] - x0, d);
    b[i] = ys[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  if (deg == 1 || std::abs(c[2]) < 1e-14 * std::abs(c[1])) {
    if (c[1] == 0.0) return std::nullopt;
    return x0 - c[0] / c[1];
  }
  const double disc = c[1] * c[1] - 4 * c[2] * c[0];
  if (disc < 0.0) return std::nullopt;
  // Root nearest to the first nontrivial point.
  const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
  const double r1 = q / c[2], r2 = c[0] / q;
  return x0 + (std::abs(r1) < std::abs(r2) ? r1 : r2);
}

std::optional<double> stability_crossing(const EquilibriumBranch& branch) {
  const BranchPoint* last = nullptr;
  for (const BranchPoint& pt : branch.points) {
    if (!pt.converged || !pt.min_real) continue;
    const double m = pt.switched_from.value_or(*pt.min_real);
    if (last) {
      const double m0 = *last->min_real;
      if ((m0 >= 0.0) != (m >= 0.0))
        return last->value + (pt.value - last->value) * m0 / (m0 - m);
    }
    if (pt.switched_from) return std::nullopt;
    last = &pt;
  }
  return std::nullopt;
}

}  // namespace panel
