#pragma once

#include <cmath>
#include <numbers>

#include "tsq/grid.hpp"

namespace tsq {

enum class ArcMode { barrier, absorber };

// Complex potential V = re + i*im per node: re >= 0 models obstacles,
// im <= 0 is a complex absorbing potential modeling particle capture.
template <typename Real = double>
struct Potential {
  using RealValues = Eigen::Array<Real, Eigen::Dynamic, 1>;

  Grid<Real> grid;
  RealValues re;
  RealValues im;

  Potential() = default;
  explicit Potential(const Grid<Real>& g)
      : grid(g), re(RealValues::Zero(g.size())), im(RealValues::Zero(g.size())) {}

  static Potential zero(const Grid<Real>& g) { return Potential(g); }

  bool is_free() const { return (re == Real(0)).all() && (im == Real(0)).all(); }

  void validate() const {
    if (re.size() != grid.size() || im.size() != grid.size())
      throw ShapeError("Potential: value count does not match grid size");
    if ((re < Real(0)).any()) throw ParameterError("Potential: Re V must be >= 0");
    if ((im > Real(0)).any()) throw ParameterError("Potential: Im V must be <= 0");
  }
};

// Annular-arc obstacle/absorber centered on the origin: mask nodes satisfy
// | ||r|| - r_c | <= w/2 with polar angle in [theta0, theta1]. Barrier mode
// writes the constant +V0 into Re V; absorber mode writes a quadratic ramp
// (0 at the inner edge, -V0 at the outer edge) into Im V so the incident
// wave sees a gradual onset.
template <typename Real>
Potential<Real> build_arc_potential(const Grid<Real>& grid, Real r_c, Real theta0, Real theta1,
                                    Real w, ArcMode mode, Real v0) {
  const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
  if (!(w > Real(0))) throw ParameterError("build_arc_potential: thickness must be positive");
  if (v0 < Real(0)) throw ParameterError("build_arc_potential: strength must be >= 0");
  if (theta0 == theta1) throw ParameterError("build_arc_potential: degenerate angular interval");
  if (theta0 < Real(0) || theta0 >= two_pi || theta1 < Real(0) || theta1 > two_pi ||
      theta1 < theta0)
    throw ParameterError("build_arc_potential: angular interval must lie within [0, 2 pi)");
  if (grid.dims() != 2) throw ShapeError("build_arc_potential: arc potentials are 2D");

  Potential<Real> pot(grid);
  const Real r_inner = r_c - w / Real(2);
  for (Index iy = 0; iy < grid.ny(); ++iy) {
    const Real y = grid.y(iy);
    for (Index ix = 0; ix < grid.nx(); ++ix) {
      const Real x = grid.x(ix);
      const Real r = std::hypot(x, y);
      if (std::abs(r - r_c) > w / Real(2)) continue;
      Real th = std::atan2(y, x);
      if (th < Real(0)) th += two_pi;
      if (th < theta0 || th > theta1) continue;
      const Index n = grid.index(ix, iy);
      if (mode == ArcMode::barrier) {
        pot.re[n] = v0;
      } else {
        const Real frac = (r - r_inner) / w;
        pot.im[n] = -v0 * frac * frac;
      }
    }
  }
  return pot;
}

}  // namespace tsq
