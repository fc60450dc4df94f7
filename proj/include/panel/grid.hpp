#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace panel {

/// Uniform node grid over [0,lx] x [0,ly]; nodes include the boundary.
class Grid {
public:
  Grid(int nx, int ny, double lx = 1.0, double ly = 1.0);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return lx_ / (nx_ - 1); }
  double hy() const noexcept { return ly_ / (ny_ - 1); }
  double x(int i) const noexcept { return i * hx(); }
  double y(int j) const noexcept { return j * hy(); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  bool on_boundary(int i, int j) const noexcept {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }
  int interior_count() const noexcept { return (nx_ - 2) * (ny_ - 2); }
  /// Trapezoid weight of node (i,j), including the cell area hx*hy.
  double weight(int i, int j) const noexcept;

  bool operator==(const Grid& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

private:
  int nx_, ny_;
  double lx_, ly_;
};

/// Boundary treatment used when a stencil reaches past the boundary.
/// Clamped: u = 0 on the boundary, ghost by even reflection.
/// Free: ghost by quadratic extrapolation (exact on quadratics).
enum class Bc { Clamped, Free };

/// Scalar nodal field on a Grid, row-major with x fastest.
class PlateField {
public:
  explicit PlateField(const Grid& g, Bc bc = Bc::Clamped);
  PlateField(const Grid& g, std::vector<double> values, Bc bc = Bc::Clamped);

  static PlateField from_function(const Grid& g,
                                  const std::function<double(double, double)>& f,
                                  Bc bc = Bc::Free);

  const Grid& grid() const noexcept { return grid_; }
  Bc bc() const noexcept { return bc_; }
  PlateField& set_bc(Bc bc) noexcept {
    bc_ = bc;
    return *this;
  }

  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Value at (i,j) with i in [-1,nx], j in [-1,ny], ghosts per the BC tag.
  double ghosted(int i, int j) const noexcept;

  /// Sets boundary nodes to zero.
  void zero_boundary() noexcept;
  bool all_finite() const noexcept;

  PlateField& operator+=(const PlateField& o);
  PlateField& operator-=(const PlateField& o);
  PlateField& operator*=(double a) noexcept;
  /// this += a * o
  PlateField& axpy(double a, const PlateField& o);

private:
  Grid grid_;
  Bc bc_;
  std::vector<double> values_;
};

PlateField operator+(PlateField a, const PlateField& b);
PlateField operator-(PlateField a, const PlateField& b);
PlateField operator*(double a, PlateField b);

/// Throws DimensionError unless both fields share a grid.
void require_same_grid(const PlateField& a, const PlateField& b, const char* op);

/// Structural phase point: displacement, velocity and time.
struct PlateState {
  PlateField u;
  PlateField v;
  double t = 0.0;

  static PlateState zero(const Grid& g, double t = 0.0) {
    return {PlateField(g), PlateField(g), t};
  }
};

/// Trapezoid-rule inner product over the closed domain.
double inner(const PlateField& a, const PlateField& b);
/// Trapezoid-rule L2 norm.
double norm_l2(const PlateField& a);
/// Max-abs over all nodes.
double norm_max(const PlateField& a);

}  // namespace panel
