#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>

#include "panel/grid.hpp"

namespace panel {

/// Nodal second differences, ghosts per the field's BC tag.
struct Hessian {
  PlateField xx, yy, xy;
};

Hessian hessian(const PlateField& u);

/// 5-point Laplacian at every node (ghosts per tag).
PlateField laplacian(const PlateField& u);

/// 5-point Laplacian at interior nodes with homogeneous Dirichlet data; boundary output 0.
PlateField dirichlet_laplacian(const PlateField& u);

/// Centered x-derivative at every node (ghosts per tag).
PlateField d_x(const PlateField& u);

/// Discrete von Karman bracket [u,w].
///
/// Clamped/clamped pairs use the symmetrized interior form, which makes
/// <[u,w],z> invariant under permutations of three clamped fields.
/// A clamped/free pair uses the cofactor (integrated-by-parts) form with
/// the free field as coefficient. Free/free pairs use the pointwise formula.
/// Boundary nodes always carry the pointwise formula.
PlateField vk_bracket(const PlateField& u, const PlateField& w);

/// Pointwise bracket u_xx w_yy + u_yy w_xx - 2 u_xy w_xy at every node.
PlateField vk_bracket_pointwise(const PlateField& u, const PlateField& w);

/// Pairing <F,[u,w]> consistent with vk_bracket(u,F) for clamped u, w.
double inplane_form(const PlateField& F, const PlateField& u, const PlateField& w);

/// 13-point clamped biharmonic; interior output, zero on the boundary.
PlateField biharmonic_apply(const PlateField& u);

enum class LinearSolverKind { Direct, Pcg };

/// Clamped biharmonic solve with right-hand side -[u1,u2].
PlateField airy_solve(const PlateField& u1, const PlateField& u2,
                      LinearSolverKind kind = LinearSolverKind::Direct);

/// Solves B v = rhs on interior nodes (rhs boundary values ignored).
PlateField biharmonic_solve(const PlateField& rhs, LinearSolverKind kind = LinearSolverKind::Direct);

/// f(u) = -[u, v(u) + F0].
PlateField vk_force(const PlateField& u, const PlateField& F0);

/// Same as vk_force with a precomputed Airy function v = v(u).
PlateField vk_force(const PlateField& u, const PlateField& v, const PlateField& F0);

/// Solves (1 - alpha*Laplacian) w = g with w = 0 on the boundary.
PlateField inertia_solve(const PlateField& g, double alpha);

/// (1 - alpha*Laplacian) w at interior nodes (Dirichlet).
PlateField inertia_apply(const PlateField& w, double alpha);

/// Pi(u) = 1/4 |Lap v(u)|^2 - 1/2 <F0,[u,u]>; its gradient is vk_force.
double vk_potential(const PlateField& u, const PlateField& F0);

/// Discrete H^2 norm |Lap u| (trapezoid).
double norm_h2(const PlateField& u);

// Interior-unknown plumbing shared by the implicit solvers.

Eigen::VectorXd to_interior(const PlateField& u);
PlateField from_interior(const Grid& g, const Eigen::VectorXd& x, Bc bc = Bc::Clamped);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Biharmonic matrix on interior unknowns.
SparseMatrix assemble_biharmonic(const Grid& g);
/// 5-point Dirichlet Laplacian on interior unknowns.
SparseMatrix assemble_dirichlet_laplacian(const Grid& g);
/// Matrix of u -> [u,F] on interior unknowns (clamped u).
SparseMatrix assemble_load_operator(const PlateField& F);
/// Centered x-derivative on interior unknowns (zero boundary values).
SparseMatrix assemble_dx(const Grid& g);

/// Cached factorization of the clamped biharmonic matrix for one grid.
class BiharmonicSolver {
public:
  explicit BiharmonicSolver(const Grid& g);
  static std::shared_ptr<const BiharmonicSolver> for_grid(const Grid& g);

  const SparseMatrix& matrix() const noexcept { return B_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b,
                        LinearSolverKind kind = LinearSolverKind::Direct) const;

private:
  SparseMatrix B_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

}  // namespace panel
