#include "panel/plate_ops.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "panel/errors.hpp"

namespace panel {

namespace {

constexpr double kSolveTol = 1e-10;

inline int interior_index(const Grid& g, int i, int j) { return (j - 1) * (g.nx() - 2) + (i - 1); }

// Nodal second differences at (i,j) using ghost values.
inline double dxx_at(const PlateField& u, int i, int j, double hx2) {
  return (u.ghosted(i + 1, j) - 2.0 * u.ghosted(i, j) + u.ghosted(i - 1, j)) / hx2;
}
inline double dyy_at(const PlateField& u, int i, int j, double hy2) {
  return (u.ghosted(i, j + 1) - 2.0 * u.ghosted(i, j) + u.ghosted(i, j - 1)) / hy2;
}
inline double dxy_at(const PlateField& u, int i, int j, double hxy4) {
  return (u.ghosted(i + 1, j + 1) - u.ghosted(i + 1, j - 1) - u.ghosted(i - 1, j + 1) +
          u.ghosted(i - 1, j - 1)) /
         hxy4;
}

// Interior-only stencils on a field known at all closed-domain nodes.
inline double dxx_in(const PlateField& a, int i, int j, double hx2) {
  return (a(i + 1, j) - 2.0 * a(i, j) + a(i - 1, j)) / hx2;
}
inline double dyy_in(const PlateField& a, int i, int j, double hy2) {
  return (a(i, j + 1) - 2.0 * a(i, j) + a(i, j - 1)) / hy2;
}
inline double dxy_in(const PlateField& a, int i, int j, double hxy4) {
  return (a(i + 1, j + 1) - a(i + 1, j - 1) - a(i - 1, j + 1) + a(i - 1, j - 1)) / hxy4;
}

// A(u;w) = Dyy(u_xx w) + Dxx(u_yy w) - 2 Dxy(u_xy w) at interior nodes.
PlateField adjoint_bracket(const Hessian& hu, const PlateField& w) {
  const Grid& g = w.grid();
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy(), hxy4 = 4.0 * g.hx() * g.hy();
  PlateField a(g), b(g), c(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    a[k] = hu.xx[k] * w[k];
    b[k] = hu.yy[k] * w[k];
    c[k] = hu.xy[k] * w[k];
  }
  PlateField out(g);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i)
      out(i, j) = dyy_in(a, i, j, hy2) + dxx_in(b, i, j, hx2) - 2.0 * dxy_in(c, i, j, hxy4);
  return out;
}

PlateField pointwise(const Hessian& hu, const Hessian& hw) {
  const Grid& g = hu.xx.grid();
  PlateField out(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    out[k] = hu.xx[k] * hw.yy[k] + hu.yy[k] * hw.xx[k] - 2.0 * hu.xy[k] * hw.xy[k];
  return out;
}

struct CellGrad {
  double gx, gy;
};

inline CellGrad cell_gradient(const PlateField& u, int i, int j, double hx, double hy) {
  return {(u(i + 1, j) + u(i + 1, j + 1) - u(i, j) - u(i, j + 1)) / (2.0 * hx),
          (u(i, j + 1) + u(i + 1, j + 1) - u(i, j) - u(i + 1, j)) / (2.0 * hy)};
}

// Cofactor of the Hessian of F averaged to cell (i+1/2, j+1/2).
struct Cofactor {
  double cxx, cxy, cyy;
};

inline Cofactor cell_cofactor(const Hessian& hf, int i, int j) {
  auto avg = [&](const PlateField& f) {
    return 0.25 * (f(i, j) + f(i + 1, j) + f(i, j + 1) + f(i + 1, j + 1));
  };
  return {avg(hf.yy), -avg(hf.xy), avg(hf.xx)};
}

// Operator L_F u: gradient in h of Q_F(u,h) = -sum_cells A grad h . cof(D^2 F) grad u,
// divided by the cell area. Interior output only.
PlateField cofactor_bracket(const PlateField& u, const PlateField& F) {
  const Grid& g = u.grid();
  const double hx = g.hx(), hy = g.hy();
  const Hessian hf = hessian(F);
  PlateField out(g);
  for (int j = 0; j < g.ny() - 1; ++j)
    for (int i = 0; i < g.nx() - 1; ++i) {
      const CellGrad gu = cell_gradient(u, i, j, hx, hy);
      const Cofactor c = cell_cofactor(hf, i, j);
      const double ax = (c.cxx * gu.gx + c.cxy * gu.gy) / (2.0 * hx);
      const double ay = (c.cxy * gu.gx + c.cyy * gu.gy) / (2.0 * hy);
      out(i, j) -= -ax - ay;
      out(i + 1, j) -= ax - ay;
      out(i, j + 1) -= -ax + ay;
      out(i + 1, j + 1) -= ax + ay;
    }
  return out;
}

void overwrite_boundary(PlateField& out, const PlateField& boundary_values) {
  const Grid& g = out.grid();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.on_boundary(i, j)) out(i, j) = boundary_values(i, j);
}

// Applies a pointwise stencil functional to unit vectors to build a sparse
// interior matrix; `radius` bounds the stencil reach.
template <class At>
SparseMatrix assemble_local(const Grid& g, int radius, At&& at) {
  const int n = g.interior_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * radius + 1) * (2 * radius + 1));
  PlateField e(g);
  for (int jc = 1; jc < g.ny() - 1; ++jc)
    for (int ic = 1; ic < g.nx() - 1; ++ic) {
      e(ic, jc) = 1.0;
      const int col = interior_index(g, ic, jc);
      for (int j = std::max(1, jc - radius); j <= std::min(g.ny() - 2, jc + radius); ++j)
        for (int i = std::max(1, ic - radius); i <= std::min(g.nx() - 2, ic + radius); ++i) {
          const double v = at(e, i, j);
          if (v != 0.0) trip.emplace_back(interior_index(g, i, j), col, v);
        }
      e(ic, jc) = 0.0;
    }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline double laplacian_at(const PlateField& u, int i, int j, double hx2, double hy2) {
  return dxx_at(u, i, j, hx2) + dyy_at(u, i, j, hy2);
}

double biharmonic_at(const PlateField& u, int i, int j, double hx2, double hy2) {
  const double c = laplacian_at(u, i, j, hx2, hy2);
  return (laplacian_at(u, i + 1, j, hx2, hy2) - 2.0 * c + laplacian_at(u, i - 1, j, hx2, hy2)) /
             hx2 +
         (laplacian_at(u, i, j + 1, hx2, hy2) - 2.0 * c + laplacian_at(u, i, j - 1, hx2, hy2)) /
             hy2;
}

inline double dirichlet_laplacian_at(const PlateField& u, int i, int j, double hx2, double hy2) {
  const Grid& g = u.grid();
  auto val = [&](int a, int b) { return g.on_boundary(a, b) ? 0.0 : u(a, b); };
  return (val(i + 1, j) - 2.0 * u(i, j) + val(i - 1, j)) / hx2 +
         (val(i, j + 1) - 2.0 * u(i, j) + val(i, j - 1)) / hy2;
}

class InertiaSolver {
public:
  InertiaSolver(const Grid& g, double alpha) {
    SparseMatrix id(g.interior_count(), g.interior_count());
    id.setIdentity();
    M_ = id - alpha * assemble_dirichlet_laplacian(g);
    ldlt_.compute(M_);
    if (ldlt_.info() != Eigen::Success) throw SolverError("inertia factorization failed", NAN);
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = ldlt_.solve(b);
    const double nb = b.norm();
    const double res = nb > 0 ? (M_ * x - b).norm() / nb : (M_ * x).norm();
    if (!(res <= kSolveTol)) throw SolverError("inertia solve residual too large", res);
    return x;
  }

private:
  SparseMatrix M_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

using GridKey = std::tuple<int, int, double, double>;

GridKey key_of(const Grid& g) { return {g.nx(), g.ny(), g.lx(), g.ly()}; }

std::shared_ptr<const InertiaSolver> inertia_solver_for(const Grid& g, double alpha) {
  static std::mutex mtx;
  static std::map<std::pair<GridKey, double>, std::shared_ptr<const InertiaSolver>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(key_of(g), alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto s = std::make_shared<const InertiaSolver>(g, alpha);
  cache.emplace(key, s);
  return s;
}

}  // namespace

Hessian hessian(const PlateField& u) {
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy(), hxy4 = 4.0 * g.hx() * g.hy();
  Hessian h{PlateField(g, u.bc()), PlateField(g, u.bc()), PlateField(g, u.bc())};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      h.xx(i, j) = dxx_at(u, i, j, hx2);
      h.yy(i, j) = dyy_at(u, i, j, hy2);
      h.xy(i, j) = dxy_at(u, i, j, hxy4);
    }
  return h;
}

PlateField laplacian(const PlateField& u) {
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  PlateField out(g, Bc::Free);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(i, j) = laplacian_at(u, i, j, hx2, hy2);
  return out;
}

PlateField dirichlet_laplacian(const PlateField& u) {
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  PlateField out(g);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) out(i, j) = dirichlet_laplacian_at(u, i, j, hx2, hy2);
  return out;
}

PlateField d_x(const PlateField& u) {
  const Grid& g = u.grid();
  const double h2 = 2.0 * g.hx();
  PlateField out(g, Bc::Free);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(i, j) = (u.ghosted(i + 1, j) - u.ghosted(i - 1, j)) / h2;
  return out;
}

PlateField vk_bracket_pointwise(const PlateField& u, const PlateField& w) {
  require_same_grid(u, w, "vk_bracket");
  return pointwise(hessian(u), hessian(w));
}

PlateField vk_bracket(const PlateField& u, const PlateField& w) {
  require_same_grid(u, w, "vk_bracket");
  const Hessian hu = hessian(u), hw = hessian(w);
  PlateField p = pointwise(hu, hw);
  p.set_bc(Bc::Free);
  if (u.bc() == Bc::Free && w.bc() == Bc::Free) return p;

  PlateField out(u.grid(), Bc::Free);
  if (u.bc() == Bc::Clamped && w.bc() == Bc::Clamped) {
    const PlateField a_uw = adjoint_bracket(hu, w);
    const PlateField a_wu = adjoint_bracket(hw, u);
    const Grid& g = u.grid();
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i)
        out(i, j) = (p(i, j) + a_uw(i, j) + a_wu(i, j)) / 3.0;
  } else if (u.bc() == Bc::Clamped) {
    out = cofactor_bracket(u, w);
  } else {
    out = cofactor_bracket(w, u);
  }
  out.set_bc(Bc::Free);
  overwrite_boundary(out, p);
  return out;
}

double inplane_form(const PlateField& F, const PlateField& u, const PlateField& w) {
  require_same_grid(F, u, "inplane_form");
  require_same_grid(u, w, "inplane_form");
  const Grid& g = u.grid();
  if (F.bc() == Bc::Clamped) return inner(F, vk_bracket(u, w));
  const double hx = g.hx(), hy = g.hy();
  const Hessian hf = hessian(F);
  double s = 0.0;
  for (int j = 0; j < g.ny() - 1; ++j)
    for (int i = 0; i < g.nx() - 1; ++i) {
      const CellGrad gu = cell_gradient(u, i, j, hx, hy);
      const CellGrad gw = cell_gradient(w, i, j, hx, hy);
      const Cofactor c = cell_cofactor(hf, i, j);
      s -= gw.gx * (c.cxx * gu.gx + c.cxy * gu.gy) + gw.gy * (c.cxy * gu.gx + c.cyy * gu.gy);
    }
  return s * hx * hy;
}

PlateField biharmonic_apply(const PlateField& u) {
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  const PlateField lap = laplacian(u);
  PlateField out(g, Bc::Free);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i)
      out(i, j) = dxx_in(lap, i, j, hx2) + dyy_in(lap, i, j, hy2);
  return out;
}

Eigen::VectorXd to_interior(const PlateField& u) {
  const Grid& g = u.grid();
  Eigen::VectorXd x(g.interior_count());
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) x[interior_index(g, i, j)] = u(i, j);
  return x;
}

PlateField from_interior(const Grid& g, const Eigen::VectorXd& x, Bc bc) {
  if (x.size() != g.interior_count())
    throw DimensionError("interior vector size does not match grid");
  PlateField u(g, bc);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) u(i, j) = x[interior_index(g, i, j)];
  return u;
}

SparseMatrix assemble_biharmonic(const Grid& g) {
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  return assemble_local(g, 2, [&](const PlateField& e, int i, int j) {
    return biharmonic_at(e, i, j, hx2, hy2);
  });
}

SparseMatrix assemble_dirichlet_laplacian(const Grid& g) {
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  return assemble_local(g, 1, [&](const PlateField& e, int i, int j) {
    return dirichlet_laplacian_at(e, i, j, hx2, hy2);
  });
}

SparseMatrix assemble_load_operator(const PlateField& F) {
  const Grid& g = F.grid();
  const int n = g.interior_count();
  std::vector<Eigen::Triplet<double>> trip;
  if (F.bc() == Bc::Clamped) {
    PlateField e(g, Bc::Clamped);
    for (int jc = 1; jc < g.ny() - 1; ++jc)
      for (int ic = 1; ic < g.nx() - 1; ++ic) {
        e(ic, jc) = 1.0;
        const Eigen::VectorXd col = to_interior(vk_bracket(e, F));
        for (int r = 0; r < n; ++r)
          if (col[r] != 0.0) trip.emplace_back(r, interior_index(g, ic, jc), col[r]);
        e(ic, jc) = 0.0;
      }
  } else {
    const double hx = g.hx(), hy = g.hy();
    const Hessian hf = hessian(F);
    const int ci[4] = {0, 1, 0, 1}, cj[4] = {0, 0, 1, 1};
    for (int j = 0; j < g.ny() - 1; ++j)
      for (int i = 0; i < g.nx() - 1; ++i) {
        const Cofactor c = cell_cofactor(hf, i, j);
        double gx[4], gy[4];
        for (int a = 0; a < 4; ++a) {
          gx[a] = (ci[a] ? 1.0 : -1.0) / (2.0 * hx);
          gy[a] = (cj[a] ? 1.0 : -1.0) / (2.0 * hy);
        }
        for (int a = 0; a < 4; ++a) {
          if (g.on_boundary(i + ci[a], j + cj[a])) continue;
          for (int b = 0; b < 4; ++b) {
            if (g.on_boundary(i + ci[b], j + cj[b])) continue;
            const double q = gx[a] * (c.cxx * gx[b] + c.cxy * gy[b]) +
                             gy[a] * (c.cxy * gx[b] + c.cyy * gy[b]);
            trip.emplace_back(interior_index(g, i + ci[a], j + cj[a]),
                              interior_index(g, i + ci[b], j + cj[b]), -q);
          }
        }
      }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_dx(const Grid& g) {
  const double c = 1.0 / (2.0 * g.hx());
  return assemble_local(g, 1, [&](const PlateField& e, int i, int j) {
    return c * (e(i + 1, j) - e(i - 1, j));
  });
}

BiharmonicSolver::BiharmonicSolver(const Grid& g) : B_(assemble_biharmonic(g)) {
  ldlt_.compute(B_);
  if (ldlt_.info() != Eigen::Success) throw SolverError("biharmonic factorization failed", NAN);
}

std::shared_ptr<const BiharmonicSolver> BiharmonicSolver::for_grid(const Grid& g) {
  static std::mutex mtx;
  static std::map<GridKey, std::shared_ptr<const BiharmonicSolver>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key_of(g));
  if (it != cache.end()) return it->second;
  auto s = std::make_shared<const BiharmonicSolver>(g);
  cache.emplace(key_of(g), s);
  return s;
}

Eigen::VectorXd BiharmonicSolver::solve(const Eigen::VectorXd& b, LinearSolverKind kind) const {
  Eigen::VectorXd x;
  if (kind == LinearSolverKind::Direct) {
    x = ldlt_.solve(b);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20 * static_cast<int>(b.size()));
    cg.compute(B_);
    x = cg.solve(b);
  }
  const double nb = b.norm();
  const double res = nb > 0 ? (B_ * x - b).norm() / nb : (B_ * x).norm();
  if (!(res <= kSolveTol)) throw SolverError("biharmonic solve residual too large", res);
  return x;
}

PlateField biharmonic_solve(const PlateField& rhs, LinearSolverKind kind) {
  const Grid& g = rhs.grid();
  return from_interior(g, BiharmonicSolver::for_grid(g)->solve(to_interior(rhs), kind));
}

PlateField airy_solve(const PlateField& u1, const PlateField& u2, LinearSolverKind kind) {
  require_same_grid(u1, u2, "airy_solve");
  PlateField rhs = vk_bracket(u1, u2);
  rhs *= -1.0;
  return biharmonic_solve(rhs, kind);
}

PlateField vk_force(const PlateField& u, const PlateField& v, const PlateField& F0) {
  require_same_grid(u, F0, "vk_force");
  PlateField f = vk_bracket(u, v);
  f += vk_bracket(u, F0);
  f *= -1.0;
  return f;
}

PlateField vk_force(const PlateField& u, const PlateField& F0) {
  return vk_force(u, airy_solve(u, u), F0);
}

PlateField inertia_apply(const PlateField& w, double alpha) {
  PlateField out = w;
  out.zero_boundary();
  if (alpha != 0.0) out.axpy(-alpha, dirichlet_laplacian(w));
  return out;
}

PlateField inertia_solve(const PlateField& g, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("inertia_solve: alpha must be nonnegative");
  if (alpha == 0.0) return g;
  const Grid& grid = g.grid();
  return from_interior(grid, inertia_solver_for(grid, alpha)->solve(to_interior(g)));
}

double norm_h2(const PlateField& u) { return norm_l2(laplacian(u)); }

double vk_potential(const PlateField& u, const PlateField& F0) {
  const PlateField v = airy_solve(u, u);
  const double a = norm_h2(v);
  return 0.25 * a * a - 0.5 * inplane_form(F0, u, u);
}

}  // namespace panel
