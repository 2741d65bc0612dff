#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "tsq/errors.hpp"

namespace tsq {

using Index = Eigen::Index;

// Time orientation of a wavefunction: retarded states carry initial
// conditions forward, advanced states carry final conditions backward.
enum class Direction { retarded, advanced };

// Uniform periodic grid in one or two dimensions. Nodes are
// x_i = xmin + i*dx with dx = (xmax - xmin)/nx; xmax is the wrap point,
// not a sample. 2D storage is row-major with y outer, x inner.
template <typename Real = double>
class Grid {
 public:
  Grid() = default;

  static Grid line(Real xmin, Real xmax, Index nx) {
    Grid g;
    g.dims_ = 1;
    g.xmin_ = xmin;
    g.xmax_ = xmax;
    g.nx_ = nx;
    g.ymin_ = Real(0);
    g.ymax_ = Real(0);
    g.ny_ = 1;
    g.validate();
    return g;
  }

  static Grid box(Real xmin, Real xmax, Index nx, Real ymin, Real ymax, Index ny) {
    Grid g;
    g.dims_ = 2;
    g.xmin_ = xmin;
    g.xmax_ = xmax;
    g.nx_ = nx;
    g.ymin_ = ymin;
    g.ymax_ = ymax;
    g.ny_ = ny;
    g.validate();
    return g;
  }

  int dims() const { return dims_; }
  Real xmin() const { return xmin_; }
  Real xmax() const { return xmax_; }
  Real ymin() const { return ymin_; }
  Real ymax() const { return ymax_; }
  Index nx() const { return nx_; }
  Index ny() const { return ny_; }

  Real dx() const { return (xmax_ - xmin_) / Real(nx_); }
  Real dy() const { return dims_ == 2 ? (ymax_ - ymin_) / Real(ny_) : Real(0); }
  Real length_x() const { return xmax_ - xmin_; }
  Real length_y() const { return ymax_ - ymin_; }

  // Quadrature weight of one node (midpoint rule on the periodic box).
  Real cell_measure() const { return dims_ == 2 ? dx() * dy() : dx(); }

  Index size() const { return dims_ == 2 ? nx_ * ny_ : nx_; }

  Real x(Index ix) const { return xmin_ + dx() * Real(ix); }
  Real y(Index iy) const { return ymin_ + dy() * Real(iy); }

  Index index(Index ix, Index iy) const { return iy * nx_ + ix; }
  Index ix_of(Index node) const { return dims_ == 2 ? node % nx_ : node; }
  Index iy_of(Index node) const { return dims_ == 2 ? node / nx_ : 0; }

  bool contains(Real px, Real py) const {
    if (px < xmin_ || px > xmax_) return false;
    if (dims_ == 2 && (py < ymin_ || py > ymax_)) return false;
    return true;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.dims_ != b.dims_ || a.nx_ != b.nx_ || a.xmin_ != b.xmin_ || a.xmax_ != b.xmax_)
      return false;
    if (a.dims_ == 2)
      return a.ny_ == b.ny_ && a.ymin_ == b.ymin_ && a.ymax_ == b.ymax_;
    return true;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  void validate() const {
    if (!(xmax_ > xmin_)) throw ParameterError("Grid: xmax must exceed xmin");
    if (nx_ < 2) throw ParameterError("Grid: nx must be >= 2");
    if (dims_ == 2) {
      if (!(ymax_ > ymin_)) throw ParameterError("Grid: ymax must exceed ymin");
      if (ny_ < 2) throw ParameterError("Grid: ny must be >= 2");
    }
  }

  int dims_ = 1;
  Real xmin_ = Real(0), xmax_ = Real(1);
  Real ymin_ = Real(0), ymax_ = Real(0);
  Index nx_ = 2, ny_ = 1;
};

// Complex scalar field sampled on a grid.
template <typename Real = double>
struct ComplexField {
  using Complex = std::complex<Real>;
  using Values = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  Grid<Real> grid;
  Values values;

  ComplexField() = default;
  explicit ComplexField(const Grid<Real>& g) : grid(g), values(Values::Zero(g.size())) {}
  ComplexField(const Grid<Real>& g, Values v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw ShapeError("ComplexField: value count does not match grid size");
  }
};

// Complex vector field: one complex component per axis (x only in 1D).
template <typename Real = double>
struct ComplexVectorField {
  using Complex = std::complex<Real>;
  using Values = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  Grid<Real> grid;
  Values x;
  Values y;  // empty in 1D

  ComplexVectorField() = default;
  explicit ComplexVectorField(const Grid<Real>& g)
      : grid(g),
        x(Values::Zero(g.size())),
        y(g.dims() == 2 ? Values::Zero(g.size()) : Values()) {}
};

template <typename Real>
void require_same_grid(const Grid<Real>& a, const Grid<Real>& b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": operands live on different grids");
}

using GridD = Grid<double>;
using ComplexFieldD = ComplexField<double>;
using ComplexVectorFieldD = ComplexVectorField<double>;

}  // namespace tsq
