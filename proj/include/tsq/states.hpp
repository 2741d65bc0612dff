#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <variant>

#include "tsq/grid.hpp"
#include "tsq/quadrature.hpp"
#include "tsq/spectral.hpp"

namespace tsq {

template <typename Real = double>
struct SpacetimePoint {
  Real x = Real(0);
  Real y = Real(0);
  Real t = Real(0);
};

// Eigenmode of the 1D infinite square well on [0, a]:
//   xi_n(x,t) = sqrt(2/a) sin(n pi x / a) exp(-i n^2 pi^2 t / (2 a^2)),
// with the phase conjugated for advanced states.
template <typename Real = double>
struct SquareWellMode {
  int n = 1;
  Real a = Real(1);
};

// Spreading 2D Gaussian with initial standard deviation sigma = 1,
// anchored at an emission or detection event.
template <typename Real = double>
struct StationaryGaussian2D {
  SpacetimePoint<Real> anchor;
};

// Boosted 2D Gaussian: group speed |k| along k, phase speed |k|/2,
// width parameter s (s^2 = 5000 and k = (0.4, 0) reproduce the printed
// traveling pair).
template <typename Real = double>
struct TravelingGaussian2D {
  SpacetimePoint<Real> anchor;
  Eigen::Matrix<Real, 2, 1> k = Eigen::Matrix<Real, 2, 1>::Zero();
  Real s = Real(1);
};

// Stationary Gaussian rescaled to a small initial standard deviation;
// grid-representable surrogate for a point-detection event.
template <typename Real = double>
struct NarrowGaussian2D {
  SpacetimePoint<Real> anchor;
  Real sigma_delta = Real(0.05);
};

template <typename Real = double>
struct StateSpec {
  using Kind = std::variant<SquareWellMode<Real>, StationaryGaussian2D<Real>,
                            TravelingGaussian2D<Real>, NarrowGaussian2D<Real>>;

  Kind kind;
  Direction direction = Direction::retarded;

  bool is_square_well() const { return std::holds_alternative<SquareWellMode<Real>>(kind); }

  void validate() const {
    if (const auto* w = std::get_if<SquareWellMode<Real>>(&kind)) {
      if (w->n < 1) throw ParameterError("SquareWellMode: n must be >= 1");
      if (!(w->a > Real(0))) throw ParameterError("SquareWellMode: a must be positive");
    } else if (const auto* tg = std::get_if<TravelingGaussian2D<Real>>(&kind)) {
      if (!(tg->s > Real(0))) throw ParameterError("TravelingGaussian2D: s must be positive");
    } else if (const auto* ng = std::get_if<NarrowGaussian2D<Real>>(&kind)) {
      if (!(ng->sigma_delta > Real(0)))
        throw ParameterError("NarrowGaussian2D: sigma_delta must be positive");
    }
  }
};

// Convenience constructors matching the printed parameter choices.
template <typename Real = double>
StateSpec<Real> stationary_gaussian(SpacetimePoint<Real> anchor, Direction dir) {
  return {StationaryGaussian2D<Real>{anchor}, dir};
}
template <typename Real = double>
StateSpec<Real> traveling_gaussian(SpacetimePoint<Real> anchor, Eigen::Matrix<Real, 2, 1> k,
                                   Real s, Direction dir) {
  return {TravelingGaussian2D<Real>{anchor, k, s}, dir};
}
template <typename Real = double>
StateSpec<Real> narrow_gaussian(SpacetimePoint<Real> anchor, Real sigma_delta, Direction dir) {
  return {NarrowGaussian2D<Real>{anchor, sigma_delta}, dir};
}
template <typename Real = double>
StateSpec<Real> square_well_mode(int n, Real a, Direction dir) {
  return {SquareWellMode<Real>{n, a}, dir};
}

namespace detail {

// Shared closed form for every Gaussian state. With T = t - t_a (retarded)
// or T = t_a - t (advanced) and the wavevector sign flipped for advanced
// states:
//   (s/sqrt(pi)) / (s^2 + iT) *
//   exp[ i sk k.(r-ra) - i|k|^2 T/2 - |r - ra - sk k T|^2 / (2(s^2 + iT)) ]
// Retarded instances solve the forward equation, advanced instances the
// backward one; both reduce to the printed stationary pair at k = 0,
// s^2 = 2.
template <typename Real>
std::complex<Real> gaussian_value(const SpacetimePoint<Real>& anchor, Real kx, Real ky, Real s2,
                                  Direction dir, Real x, Real y, Real t) {
  using Complex = std::complex<Real>;
  const Real sign = dir == Direction::retarded ? Real(1) : Real(-1);
  const Real T = sign * (t - anchor.t);
  const Real rx = x - anchor.x;
  const Real ry = y - anchor.y;
  const Real k2 = kx * kx + ky * ky;
  const Real ux = rx - sign * kx * T;
  const Real uy = ry - sign * ky * T;

  const Complex denom(s2, T);
  const Complex expo = Complex(0, sign * (kx * rx + ky * ry) - k2 * T / Real(2)) -
                       Complex(ux * ux + uy * uy, 0) / (Real(2) * denom);
  const Real pref = std::sqrt(s2 / std::numbers::pi_v<Real>);
  return pref / denom * std::exp(expo);
}

template <typename Real>
Real well_frequency(const SquareWellMode<Real>& w) {
  const Real pi = std::numbers::pi_v<Real>;
  return Real(w.n) * Real(w.n) * pi * pi / (Real(2) * w.a * w.a);
}

// sin(n pi x / a) evaluated without the [0, a] domain guard; used where the
// module works on the odd-extended periodic domain [0, 2a).
template <typename Real>
std::complex<Real> well_value_unchecked(const SquareWellMode<Real>& w, Direction dir, Real x,
                                        Real t) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real amp = std::sqrt(Real(2) / w.a) * std::sin(Real(w.n) * pi * x / w.a);
  const Real phase = (dir == Direction::retarded ? Real(-1) : Real(1)) * well_frequency(w) * t;
  return std::polar(amp, phase);
}

}  // namespace detail

// Closed-form value of a state at a spacetime point.
template <typename Real>
std::complex<Real> eval_state(const StateSpec<Real>& spec, const SpacetimePoint<Real>& p) {
  spec.validate();
  if (const auto* w = std::get_if<SquareWellMode<Real>>(&spec.kind)) {
    if (p.x < Real(0) || p.x > w->a)
      throw DomainError("eval_state: square-well mode evaluated outside [0, a]");
    return detail::well_value_unchecked(*w, spec.direction, p.x, p.t);
  }
  if (const auto* g = std::get_if<StationaryGaussian2D<Real>>(&spec.kind))
    return detail::gaussian_value<Real>(g->anchor, Real(0), Real(0), Real(2), spec.direction, p.x,
                                        p.y, p.t);
  if (const auto* tg = std::get_if<TravelingGaussian2D<Real>>(&spec.kind))
    return detail::gaussian_value<Real>(tg->anchor, tg->k[0], tg->k[1], tg->s * tg->s,
                                        spec.direction, p.x, p.y, p.t);
  const auto& ng = std::get<NarrowGaussian2D<Real>>(spec.kind);
  return detail::gaussian_value<Real>(ng.anchor, Real(0), Real(0),
                                      Real(2) * ng.sigma_delta * ng.sigma_delta, spec.direction,
                                      p.x, p.y, p.t);
}

// Samples the state onto every grid node at a fixed time.
template <typename Real>
ComplexField<Real> sample_on_grid(const StateSpec<Real>& spec, const Grid<Real>& grid, Real t) {
  spec.validate();
  const bool well = spec.is_square_well();
  if (well && grid.dims() != 1)
    throw ShapeError("sample_on_grid: square-well modes live on 1D grids");
  if (!well && grid.dims() != 2)
    throw ShapeError("sample_on_grid: Gaussian states live on 2D grids");

  ComplexField<Real> out(grid);
  if (well) {
    const auto& w = std::get<SquareWellMode<Real>>(spec.kind);
    for (Index i = 0; i < grid.nx(); ++i) {
      const Real x = grid.x(i);
      if (x < Real(0) || x > w.a)
        throw DomainError("sample_on_grid: grid node outside the well [0, a]");
      out.values[i] = detail::well_value_unchecked(w, spec.direction, x, t);
    }
    return out;
  }
  for (Index iy = 0; iy < grid.ny(); ++iy) {
    const Real y = grid.y(iy);
    for (Index ix = 0; ix < grid.nx(); ++ix) {
      out.values[grid.index(ix, iy)] = eval_state(spec, {grid.x(ix), y, t});
    }
  }
  return out;
}

// L2 norm of the discrete defect of the evolution equation,
//   +/- i (f(t+dt) - f(t-dt)) / (2 dt) + (1/2) laplacian f(t),
// with + for retarded and - for advanced states. Vanishes at rate O(dt^2)
// for exact solutions. Well modes are handled on the odd-extended periodic
// domain [0, 2a), where sin(n pi x / a) is a lattice mode and the spectral
// Laplacian is exact; the norm is then restricted to the physical half.
template <typename Real>
Real schrodinger_residual_fields(const ComplexField<Real>& f_minus, const ComplexField<Real>& f0,
                                 const ComplexField<Real>& f_plus, Real dt, Direction dir) {
  require_same_grid(f_minus.grid, f0.grid, "schrodinger_residual");
  require_same_grid(f_plus.grid, f0.grid, "schrodinger_residual");
  if (!(dt > Real(0))) throw ParameterError("schrodinger_residual: dt must be positive");
  using Complex = std::complex<Real>;
  const Complex i_unit = dir == Direction::retarded ? Complex(0, 1) : Complex(0, -1);
  ComplexField<Real> res = spectral_laplacian(f0);
  res.values = i_unit * (f_plus.values - f_minus.values) / (Real(2) * dt) +
               Real(0.5) * res.values;
  return std::sqrt(norm_squared(res));
}

template <typename Real>
Real schrodinger_residual(const StateSpec<Real>& spec, const Grid<Real>& grid, Real t, Real dt) {
  spec.validate();
  if (!(dt > Real(0))) throw ParameterError("schrodinger_residual: dt must be positive");

  if (const auto* w = std::get_if<SquareWellMode<Real>>(&spec.kind)) {
    if (grid.dims() != 1 || grid.xmin() != Real(0) || grid.xmax() != w->a)
      throw ShapeError("schrodinger_residual: well grid must span [0, a)");
    const Grid<Real> doubled = Grid<Real>::line(Real(0), Real(2) * w->a, 2 * grid.nx());
    auto sample = [&](Real ts) {
      ComplexField<Real> f(doubled);
      for (Index i = 0; i < doubled.nx(); ++i)
        f.values[i] = detail::well_value_unchecked(*w, spec.direction, doubled.x(i), ts);
      return f;
    };
    const auto fm = sample(t - dt);
    const auto f0 = sample(t);
    const auto fp = sample(t + dt);
    using Complex = std::complex<Real>;
    const Complex i_unit = spec.direction == Direction::retarded ? Complex(0, 1) : Complex(0, -1);
    ComplexField<Real> res = spectral_laplacian(f0);
    res.values = i_unit * (fp.values - fm.values) / (Real(2) * dt) + Real(0.5) * res.values;
    detail::Kahan<Real> acc;
    for (Index i = 0; i < grid.nx(); ++i) acc.add(std::norm(res.values[i]));
    return std::sqrt(acc.sum * grid.dx());
  }

  const auto fm = sample_on_grid(spec, grid, t - dt);
  const auto f0 = sample_on_grid(spec, grid, t);
  const auto fp = sample_on_grid(spec, grid, t + dt);
  return schrodinger_residual_fields(fm, f0, fp, dt, spec.direction);
}

}  // namespace tsq
