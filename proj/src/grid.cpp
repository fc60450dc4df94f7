#include "panel/grid.hpp"

#include <cmath>
#include <string>

#include "panel/errors.hpp"

namespace panel {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 5 || ny < 5)
    throw DomainError("grid needs at least 5 nodes per direction, got " + std::to_string(nx) +
                      "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw DomainError("grid extents must be positive and finite");
}

double Grid::weight(int i, int j) const noexcept {
  double wx = (i == 0 || i == nx_ - 1) ? 0.5 : 1.0;
  double wy = (j == 0 || j == ny_ - 1) ? 0.5 : 1.0;
  return wx * wy * hx() * hy();
}

PlateField::PlateField(const Grid& g, Bc bc) : grid_(g), bc_(bc), values_(g.size(), 0.0) {}

PlateField::PlateField(const Grid& g, std::vector<double> values, Bc bc)
    : grid_(g), bc_(bc), values_(std::move(values)) {
  if (values_.size() != g.size())
    throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                         std::to_string(g.size()));
}

PlateField PlateField::from_function(const Grid& g, const std::function<double(double, double)>& f,
                                     Bc bc) {
  PlateField out(g, bc);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

namespace {

// Ghost index -1 or n mapped through the BC; returns value along one axis.
inline double extrapolate(double u0, double u1, double u2) { return 3.0 * u0 - 3.0 * u1 + u2; }

}  // namespace

double PlateField::ghosted(int i, int j) const noexcept {
  const int nx = grid_.nx(), ny = grid_.ny();
  const bool gx = (i < 0 || i >= nx), gy = (j < 0 || j >= ny);
  if (!gx && !gy) return (*this)(i, j);
  if (bc_ == Bc::Clamped) {
    int ri = i < 0 ? -i : (i >= nx ? 2 * (nx - 1) - i : i);
    int rj = j < 0 ? -j : (j >= ny ? 2 * (ny - 1) - j : j);
    return (*this)(ri, rj);
  }
  if (gy) {
    int j0 = j < 0 ? 0 : ny - 1;
    int s = j < 0 ? 1 : -1;
    return extrapolate(ghosted(i, j0), ghosted(i, j0 + s), ghosted(i, j0 + 2 * s));
  }
  int i0 = i < 0 ? 0 : nx - 1;
  int s = i < 0 ? 1 : -1;
  return extrapolate((*this)(i0, j), (*this)(i0 + s, j), (*this)(i0 + 2 * s, j));
}

void PlateField::zero_boundary() noexcept {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int i = 0; i < nx; ++i) {
    (*this)(i, 0) = 0.0;
    (*this)(i, ny - 1) = 0.0;
  }
  for (int j = 0; j < ny; ++j) {
    (*this)(0, j) = 0.0;
    (*this)(nx - 1, j) = 0.0;
  }
}

bool PlateField::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_same_grid(const PlateField& a, const PlateField& b, const char* op) {
  if (!(a.grid() == b.grid()))
    throw DimensionError(std::string(op) + ": fields live on different grids");
}

PlateField& PlateField::operator+=(const PlateField& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

PlateField& PlateField::operator-=(const PlateField& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

PlateField& PlateField::operator*=(double a) noexcept {
  for (double& v : values_) v *= a;
  return *this;
}

PlateField& PlateField::axpy(double a, const PlateField& o) {
  require_same_grid(*this, o, "axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * o.values_[k];
  return *this;
}

PlateField operator+(PlateField a, const PlateField& b) { return a += b; }
PlateField operator-(PlateField a, const PlateField& b) { return a -= b; }
PlateField operator*(double a, PlateField b) { return b *= a; }

double inner(const PlateField& a, const PlateField& b) {
  require_same_grid(a, b, "inner");
  const Grid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += g.weight(i, j) * a(i, j) * b(i, j);
  return s;
}

double norm_l2(const PlateField& a) { return std::sqrt(inner(a, a)); }

double norm_max(const PlateField& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace panel
