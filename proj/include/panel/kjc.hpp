#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace panel::kjc {

using cplx = std::complex<double>;

/// Frequency-domain evaluation point.
struct SymbolPoint {
  double eta_x = 0.0;
  double eta_y = 0.0;
  cplx tau{1.0, 0.0};     ///< sigma + i beta, sigma >= 0
  double U = 0.0;
  double alpha_lp = 0.0;  ///< Re tau used by the one-dimensional symbols
};

/// D = tau^2 + 2 i U eta_x tau + (1 - U^2) eta_x^2 + eta_y^2.
cplx symbol_D(const SymbolPoint& pt);

/// m = -sqrt(D) / (tau + i U eta_x), principal square root.
/// Throws SingularPointError when the denominator vanishes.
cplx multiplier_m(const SymbolPoint& pt);

/// One-dimensional elliptic factor r = sqrt(D1) / (z_U - i a) with a = alpha_lp / eta,
/// z_U = z + U (z = beta / eta) and D1 = -a^2 - 1 + z_U^2 - 2 i a z_U.
/// Throws DomainError for eta == 0.
cplx r_symbol(double z, double eta, double alpha_lp, double U);

/// Limits of r for z -> +infinity and z -> -infinity.
constexpr double r_limit_plus = 1.0;
constexpr double r_limit_minus = -1.0;
/// Limit of r at z = 0, eta -> infinity: -i sqrt(1 - U^2) / U for 0 < U < 1.
cplx r_limit_zero(double U);

enum class Nodes { Chebyshev, Uniform };
enum class Endpoint { Bounded, InverseSqrt };

/// Samples of a function on I = (-1, 1).
///
/// Chebyshev nodes are the Gauss points cos((2j+1) pi / 2n); uniform nodes are
/// cell midpoints. InverseSqrt functions store g with w = g / sqrt(1 - x^2).
class IntervalFunction {
public:
  IntervalFunction(Nodes nodes, Endpoint tag, Eigen::VectorXcd samples);

  static IntervalFunction chebyshev(int n, const std::function<cplx(double)>& f,
                                    Endpoint tag = Endpoint::Bounded);
  static IntervalFunction uniform(int n, const std::function<cplx(double)>& f);

  static Eigen::VectorXd nodes(Nodes kind, int n);

  Nodes node_kind() const noexcept { return nodes_; }
  Endpoint tag() const noexcept { return tag_; }
  int size() const noexcept { return static_cast<int>(samples_.size()); }
  const Eigen::VectorXcd& samples() const noexcept { return samples_; }
  Eigen::VectorXd x() const { return nodes(nodes_, size()); }

  /// Function values w(x_j) (weight applied for InverseSqrt).
  Eigen::VectorXcd values() const;

private:
  Nodes nodes_;
  Endpoint tag_;
  Eigen::VectorXcd samples_;
};

/// Chebyshev coefficients c_k of the interpolant through Gauss-point samples.
Eigen::VectorXcd chebyshev_coefficients(const Eigen::VectorXcd& samples);
/// Samples at the Gauss points from Chebyshev coefficients.
Eigen::VectorXcd chebyshev_values(const Eigen::VectorXcd& coeffs);

/// (1/pi) p.v. int_I w(t) / (t - x) dt at the sample nodes.
/// InverseSqrt: exact on the Chebyshev interpolant of g (Gauss-Chebyshev subtraction).
/// Bounded/Chebyshev: log subtraction plus Gauss-Legendre on the interpolant.
/// Bounded/uniform: log subtraction plus the midpoint rule.
/// Returns a Bounded function on the same nodes.
IntervalFunction finite_hilbert(const IntervalFunction& w);

/// Inverse on L_p, 1 < p < 2: the solution with an inverse-square-root endpoint weight.
/// The homogeneous mode c / sqrt(1 - x^2) is fixed by c = 0, or by a finite value at
/// x = 1 when `kutta` is set. Requires Chebyshev nodes.
IntervalFunction finite_hilbert_invert(const IntervalFunction& h, double p, bool kutta = false);

/// Resolution of the downwash-to-potential solver.
struct DownwashOptions {
  double eta_max = 400.0;  ///< truncation of the spatial-frequency integral
  int panels_per_unit = 1; ///< Gauss-Legendre panels per unit of eta
  int panel_order = 8;
  double gmres_tol = 1e-12;
  int max_iter = 200;
};

/// Downwash h(t_k) on a uniform time grid, one IntervalFunction per step.
using TimeSeries = std::vector<IntervalFunction>;

/// Forward operator: h = P_I T psi for psi supported on I (InverseSqrt samples
/// on Chebyshev nodes with zero homogeneous coefficient), through the damped
/// discrete Fourier transform with damping alpha_lp.
TimeSeries kjc_forward(const TimeSeries& psi, double dt, double U, double alpha_lp,
                       const DownwashOptions& opts = {});

/// Solves P_I T psi = h per time frequency with GMRES, preconditioned by the
/// exact finite-Hilbert inverse of the large-frequency limit of m. The homogeneous
/// coefficient of psi is pinned to zero. Requires 0 < U < 1 and alpha_lp > 0.
/// Throws FrequencyResolutionError when a frequency slice does not converge.
TimeSeries downwash_to_potential(const TimeSeries& h, double dt, double U, double alpha_lp,
                                 const DownwashOptions& opts = {});

/// int_I u_x psi dx for psi InverseSqrt on Chebyshev nodes.
cplx pairing(const IntervalFunction& psi, const std::function<double(double)>& ux);

}  // namespace panel::kjc
