#include "panel/kjc.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/IterativeSolvers>
#include <cmath>
#include <algorithm>
#include <map>
#include <memory>
#include <tuple>
#include <mutex>
#include <numbers>

#include "panel/errors.hpp"

namespace panel::kjc {

namespace {

using std::numbers::pi;
using lcplx = std::complex<long double>;
const cplx I1{0.0, 1.0};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, Eigen::VectorXd& t, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  t = es.eigenvalues();
  w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

/// T-to-U conversion: U-coefficients d of sum c_k T_k (length kept).
Eigen::VectorXcd t_to_u(const Eigen::VectorXcd& c) {
  const int n = static_cast<int>(c.size());
  auto at = [&](int k) { return k < n ? c[k] : cplx(0.0); };
  Eigen::VectorXcd d(n);
  if (n == 0) return d;
  d[0] = at(0) - 0.5 * at(2);
  for (int k = 1; k < n; ++k) d[k] = 0.5 * (at(k) - at(k + 2));
  return d;
}

void require_chebyshev(const IntervalFunction& f, const char* op) {
  if (f.node_kind() != Nodes::Chebyshev)
    throw DomainError(std::string(op) + ": Chebyshev nodes required");
}

}  // namespace

cplx symbol_D(const SymbolPoint& pt) {
  const lcplx tau(pt.tau.real(), pt.tau.imag());
  const long double U = pt.U, ex = pt.eta_x, ey = pt.eta_y;
  const lcplx d = tau * tau + lcplx(0.0L, 2.0L * U * ex) * tau + (1.0L - U * U) * ex * ex + ey * ey;
  return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
}

cplx multiplier_m(const SymbolPoint& pt) {
  const lcplx tau(pt.tau.real(), pt.tau.imag());
  const lcplx den = tau + lcplx(0.0L, static_cast<long double>(pt.U) * pt.eta_x);
  const long double scale = std::abs(tau) + std::abs(pt.U * pt.eta_x);
  if (std::abs(den) <= 1e-14L * scale || std::abs(den) == 0.0L)
    throw SingularPointError("multiplier_m: tau + i U eta_x vanishes");
  const cplx D = symbol_D(pt);
  const lcplx m = -std::sqrt(lcplx(D.real(), D.imag())) / den;
  return {static_cast<double>(m.real()), static_cast<double>(m.imag())};
}

cplx r_symbol(double z, double eta, double alpha_lp, double U) {
  if (eta == 0.0) throw DomainError("r_symbol: eta must be nonzero");
  const double a = alpha_lp / eta;
  const double zu = z + U;
  const cplx D1 = cplx(-a * a - 1.0 + zu * zu, -2.0 * a * zu);
  return std::sqrt(D1) / cplx(zu, -a);
}

cplx r_limit_zero(double U) {
  if (!(U > 0.0 && U < 1.0)) throw DomainError("r_limit_zero: requires 0 < U < 1");
  return cplx(0.0, -std::sqrt(1.0 - U * U) / U);
}

// ---------------------------------------------------------------------------

IntervalFunction::IntervalFunction(Nodes nodes, Endpoint tag, Eigen::VectorXcd samples)
    : nodes_(nodes), tag_(tag), samples_(std::move(samples)) {
  if (samples_.size() < 4) throw DimensionError("IntervalFunction: at least 4 samples required");
  if (tag_ == Endpoint::InverseSqrt && nodes_ != Nodes::Chebyshev)
    throw DomainError("IntervalFunction: inverse-square-root functions need Chebyshev nodes");
  if (!samples_.allFinite()) throw DomainError("IntervalFunction: non-finite samples");
}

Eigen::VectorXd IntervalFunction::nodes(Nodes kind, int n) {
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j)
    x[j] = kind == Nodes::Chebyshev ? std::cos((2 * j + 1) * pi / (2.0 * n))
                                    : -1.0 + (j + 0.5) * 2.0 / n;
  return x;
}

IntervalFunction IntervalFunction::chebyshev(int n, const std::function<cplx(double)>& f,
                                             Endpoint tag) {
  const Eigen::VectorXd x = nodes(Nodes::Chebyshev, n);
  Eigen::VectorXcd s(n);
  for (int j = 0; j < n; ++j) s[j] = f(x[j]);
  return IntervalFunction(Nodes::Chebyshev, tag, std::move(s));
}

IntervalFunction IntervalFunction::uniform(int n, const std::function<cplx(double)>& f) {
  const Eigen::VectorXd x = nodes(Nodes::Uniform, n);
  Eigen::VectorXcd s(n);
  for (int j = 0; j < n; ++j) s[j] = f(x[j]);
  return IntervalFunction(Nodes::Uniform, Endpoint::Bounded, std::move(s));
}

Eigen::VectorXcd IntervalFunction::values() const {
  if (tag_ == Endpoint::Bounded) return samples_;
  const Eigen::VectorXd xs = x();
  Eigen::VectorXcd v(size());
  for (int j = 0; j < size(); ++j) v[j] = samples_[j] / std::sqrt(1.0 - xs[j] * xs[j]);
  return v;
}

Eigen::VectorXcd chebyshev_coefficients(const Eigen::VectorXcd& f) {
  const int n = static_cast<int>(f.size());
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += f[j] * std::cos(k * (2 * j + 1) * pi / (2.0 * n));
    c[k] = (k == 0 ? 1.0 : 2.0) / n * s;
  }
  return c;
}

Eigen::VectorXcd chebyshev_values(const Eigen::VectorXcd& c) {
  const int n = static_cast<int>(c.size());
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) f[j] += c[k] * std::cos(k * (2 * j + 1) * pi / (2.0 * n));
  return f;
}

namespace {

/// Values of sum a_k U_{k-1} at the Gauss points (k >= 1).
Eigen::VectorXcd second_kind_sum(const Eigen::VectorXcd& a) {
  const int n = static_cast<int>(a.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double th = (2 * j + 1) * pi / (2.0 * n);
    for (int k = 1; k < n; ++k) out[j] += a[k] * std::sin(k * th);
    out[j] /= std::sin(th);
  }
  return out;
}

Eigen::VectorXcd hilbert_bounded_chebyshev(const Eigen::VectorXcd& w) {
  const int n = static_cast<int>(w.size());
  const Eigen::VectorXd x = IntervalFunction::nodes(Nodes::Chebyshev, n);
  const Eigen::VectorXcd c = chebyshev_coefficients(w);
  auto eval = [&](double t, bool deriv) {
    // Clenshaw-free direct sums through the trigonometric form.
    const double th = std::acos(std::clamp(t, -1.0, 1.0));
    cplx s = 0.0;
    if (!deriv) {
      for (int k = 0; k < n; ++k) s += c[k] * std::cos(k * th);
    } else {
      for (int k = 1; k < n; ++k) s += c[k] * (k * std::sin(k * th) / std::sin(th));
    }
    return s;
  };
  Eigen::VectorXd tq, wq;
  gauss_legendre(n + 8, tq, wq);
  Eigen::VectorXcd wt(tq.size());
  for (Eigen::Index q = 0; q < tq.size(); ++q) wt[q] = eval(tq[q], false);
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (Eigen::Index q = 0; q < tq.size(); ++q) {
      const double d = tq[q] - x[i];
      s += wq[q] * (std::abs(d) > 1e-7 ? (wt[q] - w[i]) / d : eval(0.5 * (tq[q] + x[i]), true));
    }
    out[i] = (s + w[i] * std::log((1.0 - x[i]) / (1.0 + x[i]))) / pi;
  }
  return out;
}

Eigen::VectorXcd hilbert_bounded_uniform(const Eigen::VectorXcd& w) {
  const int n = static_cast<int>(w.size());
  const double h = 2.0 / n;
  const Eigen::VectorXd x = IntervalFunction::nodes(Nodes::Uniform, n);
  Eigen::VectorXcd dw(n);
  for (int i = 1; i + 1 < n; ++i) dw[i] = (w[i + 1] - w[i - 1]) / (2 * h);
  dw[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2 * h);
  dw[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2 * h);
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cplx s = h * dw[i];
    for (int j = 0; j < n; ++j)
      if (j != i) s += h * (w[j] - w[i]) / (x[j] - x[i]);
    out[i] = (s + w[i] * std::log((1.0 - x[i]) / (1.0 + x[i]))) / pi;
  }
  return out;
}

/// Coefficients a_1..a_{n-1} of g (w = g/sqrt(1-x^2)) with H_f w = h, as a matrix on samples.
Eigen::MatrixXcd hilbert_inverse_matrix(int n) {
  Eigen::MatrixXcd M(n - 1, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Eigen::VectorXcd d = t_to_u(chebyshev_coefficients(e));
    M.col(j) = d.head(n - 1);
    e[j] = 0.0;
  }
  return M;
}

}  // namespace

IntervalFunction finite_hilbert(const IntervalFunction& w) {
  Eigen::VectorXcd out;
  if (w.tag() == Endpoint::InverseSqrt) {
    out = second_kind_sum(chebyshev_coefficients(w.samples()));
  } else if (w.node_kind() == Nodes::Chebyshev) {
    out = hilbert_bounded_chebyshev(w.samples());
  } else {
    out = hilbert_bounded_uniform(w.samples());
  }
  return IntervalFunction(w.node_kind(), Endpoint::Bounded, std::move(out));
}

IntervalFunction finite_hilbert_invert(const IntervalFunction& h, double p, bool kutta) {
  if (!(p > 1.0 && p < 2.0)) throw DomainError("finite_hilbert_invert: requires 1 < p < 2");
  require_chebyshev(h, "finite_hilbert_invert");
  const int n = h.size();
  const Eigen::VectorXcd d = t_to_u(chebyshev_coefficients(h.values()));
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
  for (int k = 1; k < n; ++k) a[k] = d[k - 1];
  if (kutta) a[0] = -a.tail(n - 1).sum();
  return IntervalFunction(Nodes::Chebyshev, Endpoint::InverseSqrt, chebyshev_values(a));
}

cplx pairing(const IntervalFunction& psi, const std::function<double(double)>& ux) {
  if (psi.tag() != Endpoint::InverseSqrt) throw DomainError("pairing: inverse-square-root psi expected");
  const Eigen::VectorXd x = psi.x();
  cplx s = 0.0;
  for (int j = 0; j < psi.size(); ++j) s += ux(x[j]) * psi.samples()[j];
  return s * pi / static_cast<double>(psi.size());
}

// ---------------------------------------------------------------------------

namespace {

/// Spatial-frequency quadrature and the tau-independent tables.
struct FrequencyTables {
  Eigen::VectorXd eta, weight;
  Eigen::MatrixXcd E;  ///< n x Q, exp(i x_i eta_q)
  Eigen::MatrixXcd J;  ///< Q x n, (-i)^k J_k(eta_q) / 2
};

/// J_k(x) for k < kmax from the trapezoid rule on the Bessel integral (FFT).
Eigen::VectorXd bessel_row(double x, int kmax) {
  int M = 64;
  while (M < kmax + std::abs(x) + 64) M *= 2;
  std::vector<cplx> f(M), F;
  for (int k = 0; k < M; ++k) f[k] = std::exp(I1 * (x * std::sin(2 * pi * k / M)));
  Eigen::FFT<double> fft;
  fft.fwd(F, f);
  Eigen::VectorXd out(kmax);
  for (int k = 0; k < kmax; ++k) out[k] = F[k].real() / M;
  return out;
}

std::shared_ptr<const FrequencyTables> tables_for(int n, const DownwashOptions& o) {
  static std::mutex mtx;
  static std::map<std::tuple<int, double, int, int>, std::shared_ptr<const FrequencyTables>> cache;
  const auto key = std::make_tuple(n, o.eta_max, o.panels_per_unit, o.panel_order);
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto t = std::make_shared<FrequencyTables>();
  Eigen::VectorXd gt, gw;
  gauss_legendre(o.panel_order, gt, gw);
  const int panels = std::max(1, static_cast<int>(std::ceil(o.eta_max * o.panels_per_unit)));
  const double width = o.eta_max / panels;
  const int Q = 2 * panels * o.panel_order;
  t->eta.resize(Q);
  t->weight.resize(Q);
  int q = 0;
  for (int side : {-1, 1})
    for (int p = 0; p < panels; ++p)
      for (int k = 0; k < o.panel_order; ++k, ++q) {
        t->eta[q] = side * (p * width + 0.5 * width * (gt[k] + 1.0));
        t->weight[q] = 0.5 * width * gw[k];
      }
  const Eigen::VectorXd x = IntervalFunction::nodes(Nodes::Chebyshev, n);
  t->E.resize(n, Q);
  t->J.resize(Q, n);
  for (int qq = 0; qq < Q; ++qq) {
    for (int i = 0; i < n; ++i) t->E(i, qq) = std::exp(I1 * (x[i] * t->eta[qq]));
    const Eigen::VectorXd jb = bessel_row(t->eta[qq], n);
    cplx phase = 0.5;
    for (int k = 0; k < n; ++k, phase *= -I1) t->J(qq, k) = phase * jb[k];
  }
  cache.emplace(key, t);
  return t;
}

void check_series(const TimeSeries& s, double dt, const char* op) {
  if (s.empty()) throw DimensionError(std::string(op) + ": empty time series");
  if (!(dt > 0.0)) throw DomainError(std::string(op) + ": dt must be positive");
  for (const IntervalFunction& f : s) {
    require_chebyshev(f, op);
    if (f.size() != s.front().size()) throw DimensionError(std::string(op) + ": node counts differ");
  }
}

double r_infinity(double U) { return -std::sqrt(1.0 - U * U) / U; }

/// Remainder operator (m - r_inf m0) on modes T_k/sqrt(1-x^2), values at the nodes.
Eigen::MatrixXcd remainder_matrix(const FrequencyTables& t, cplx tau, double U) {
  const double rinf = r_infinity(U);
  Eigen::VectorXcd mu(t.eta.size());
  for (Eigen::Index q = 0; q < t.eta.size(); ++q) {
    SymbolPoint pt;
    pt.eta_x = t.eta[q];
    pt.tau = tau;
    pt.U = U;
    const cplx m0 = t.eta[q] > 0 ? -I1 : I1;
    mu[q] = t.weight[q] * (multiplier_m(pt) - rinf * m0);
  }
  return t.E * (mu.asDiagonal() * t.J);
}

/// Damped DFT of nodal samples: rows are time levels.
Eigen::MatrixXcd damped_forward(const Eigen::MatrixXcd& s, double dt, double sigma) {
  const int nt = static_cast<int>(s.rows());
  Eigen::MatrixXcd out(nt, s.cols());
  Eigen::FFT<double> fft;
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    std::vector<cplx> in(nt), F;
    for (int k = 0; k < nt; ++k) in[k] = s(k, c) * std::exp(-sigma * k * dt);
    fft.fwd(F, in);
    for (int k = 0; k < nt; ++k) out(k, c) = F[k];
  }
  return out;
}

Eigen::MatrixXcd damped_inverse(const Eigen::MatrixXcd& s, double dt, double sigma) {
  const int nt = static_cast<int>(s.rows());
  Eigen::MatrixXcd out(nt, s.cols());
  Eigen::FFT<double> fft;
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    std::vector<cplx> in(nt), f;
    for (int k = 0; k < nt; ++k) in[k] = s(k, c);
    fft.inv(f, in);
    for (int k = 0; k < nt; ++k) out(k, c) = f[k] * std::exp(sigma * k * dt);
  }
  return out;
}

cplx tau_of(int l, int nt, double dt, double sigma) {
  const int ls = l <= nt / 2 ? l : l - nt;
  return {sigma, 2 * pi * ls / (nt * dt)};
}

/// Remainder for frequency bin l; the Nyquist bin of an even series averages
/// +beta and -beta so that real data stay real.
Eigen::MatrixXcd remainder_for_bin(const FrequencyTables& t, int l, int nt, double dt, double sigma,
                                   double U) {
  const cplx tau = tau_of(l, nt, dt, sigma);
  if (nt % 2 == 0 && l == nt / 2)
    return 0.5 * (remainder_matrix(t, tau, U) + remainder_matrix(t, std::conj(tau), U));
  return remainder_matrix(t, tau, U);
}

void check_flow(double U, double alpha_lp, const char* op) {
  if (!(U > 0.0 && U < 1.0)) throw DomainError(std::string(op) + ": requires 0 < U < 1");
  if (!(alpha_lp > 0.0)) throw DomainError(std::string(op) + ": requires alpha_lp > 0");
}

}  // namespace

TimeSeries kjc_forward(const TimeSeries& psi, double dt, double U, double alpha_lp,
                       const DownwashOptions& opts) {
  check_series(psi, dt, "kjc_forward");
  check_flow(U, alpha_lp, "kjc_forward");
  const int n = psi.front().size(), nt = static_cast<int>(psi.size());
  Eigen::MatrixXcd coeffs(nt, n);
  for (int k = 0; k < nt; ++k) {
    if (psi[k].tag() != Endpoint::InverseSqrt) throw DomainError("kjc_forward: psi must be InverseSqrt");
    coeffs.row(k) = chebyshev_coefficients(psi[k].samples()).transpose();
  }
  const auto tables = tables_for(n, opts);
  const Eigen::MatrixXcd A = damped_forward(coeffs, dt, alpha_lp);
  Eigen::MatrixXcd H(nt, n);
  const double rinf = r_infinity(U);
  for (int l = 0; l < nt; ++l) {
    const Eigen::VectorXcd a = A.row(l).transpose();
    // r_inf times the Hilbert operator with symbol -i sgn(eta), which is -finite_hilbert.
    Eigen::VectorXcd h = -rinf * second_kind_sum(a);
    h += remainder_for_bin(*tables, l, nt, dt, alpha_lp, U) * a;
    H.row(l) = h.transpose();
  }
  const Eigen::MatrixXcd hs = damped_inverse(H, dt, alpha_lp);
  TimeSeries out;
  out.reserve(nt);
  for (int k = 0; k < nt; ++k)
    out.emplace_back(Nodes::Chebyshev, Endpoint::Bounded, hs.row(k).transpose());
  return out;
}

TimeSeries downwash_to_potential(const TimeSeries& h, double dt, double U, double alpha_lp,
                                 const DownwashOptions& opts) {
  check_series(h, dt, "downwash_to_potential");
  check_flow(U, alpha_lp, "downwash_to_potential");
  const int n = h.front().size(), nt = static_cast<int>(h.size());
  Eigen::MatrixXcd samples(nt, n);
  for (int k = 0; k < nt; ++k) samples.row(k) = h[k].values().transpose();
  const Eigen::MatrixXcd Hs = damped_forward(samples, dt, alpha_lp);
  const auto tables = tables_for(n, opts);
  const Eigen::MatrixXcd Hinv = hilbert_inverse_matrix(n);
  const double rinf = r_infinity(U);

  Eigen::MatrixXcd Psi(nt, n);
  for (int l = 0; l < nt; ++l) {
    // Unknowns a_1..a_{n-1}; preconditioned by (r_inf H)^{-1} = -finite_hilbert_invert / r_inf.
    const Eigen::MatrixXcd R =
        remainder_for_bin(*tables, l, nt, dt, alpha_lp, U).rightCols(n - 1);
    const Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(n - 1, n - 1) + (-1.0 / rinf) * (Hinv * R);
    const Eigen::VectorXcd b = (-1.0 / rinf) * (Hinv * Hs.row(l).transpose());
    Eigen::GMRES<Eigen::MatrixXcd, Eigen::IdentityPreconditioner> gmres;
    gmres.setTolerance(opts.gmres_tol);
    gmres.setMaxIterations(opts.max_iter);
    gmres.set_restart(std::min(opts.max_iter, n));
    gmres.compute(K);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
    a.tail(n - 1) = gmres.solve(b);
    const double res = b.norm() > 0 ? (K * a.tail(n - 1) - b).norm() / b.norm() : 0.0;
    if (gmres.info() != Eigen::Success && !(res <= 1e3 * opts.gmres_tol))
      throw FrequencyResolutionError("downwash_to_potential: frequency slice " + std::to_string(l) +
                                         " did not converge",
                                     res);
    Psi.row(l) = a.transpose();
  }
  const Eigen::MatrixXcd coeffs = damped_inverse(Psi, dt, alpha_lp);
  TimeSeries out;
  out.reserve(nt);
  for (int k = 0; k < nt; ++k)
    out.emplace_back(Nodes::Chebyshev, Endpoint::InverseSqrt,
                     chebyshev_values(coeffs.row(k).transpose()));
  return out;
}

}  // namespace panel::kjc
