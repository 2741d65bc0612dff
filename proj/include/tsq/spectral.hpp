#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>

#include "tsq/grid.hpp"

namespace tsq {

namespace detail {

// One engine per thread; Eigen::FFT caches kissfft plans per length
// internally, so all grid sizes share it.
template <typename Real>
Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> engine;
  return engine;
}

template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

// In-place DFT along x (rows) and, in 2D, along y (columns).
// inverse=true applies the 1/n-scaled inverse, so fft2(ifft2(f)) == f.
template <typename Real>
void fft_grid(typename ComplexField<Real>::Values& v, const Grid<Real>& g, bool inverse) {
  auto& engine = fft_engine<Real>();
  const Index nx = g.nx();
  const Index ny = g.dims() == 2 ? g.ny() : 1;
  CVec<Real> in(nx), out(nx);
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) in[ix] = v[iy * nx + ix];
    if (inverse)
      engine.inv(out, in);
    else
      engine.fwd(out, in);
    for (Index ix = 0; ix < nx; ++ix) v[iy * nx + ix] = out[ix];
  }
  if (g.dims() == 2) {
    CVec<Real> cin(ny), cout(ny);
    for (Index ix = 0; ix < nx; ++ix) {
      for (Index iy = 0; iy < ny; ++iy) cin[iy] = v[iy * nx + ix];
      if (inverse)
        engine.inv(cout, cin);
      else
        engine.fwd(cout, cin);
      for (Index iy = 0; iy < ny; ++iy) v[iy * nx + ix] = cout[iy];
    }
  }
}

// Signed wavenumbers k_j = 2*pi*j~ / L with j~ in [-n/2, n/2).
template <typename Real>
Eigen::Array<Real, Eigen::Dynamic, 1> wavenumbers(Index n, Real length) {
  Eigen::Array<Real, Eigen::Dynamic, 1> k(n);
  const Real base = Real(2) * std::numbers::pi_v<Real> / length;
  for (Index j = 0; j < n; ++j) {
    const Index js = (2 * j < n) ? j : j - n;
    k[j] = base * Real(js);
  }
  return k;
}

}  // namespace detail

// Largest |k|^2 representable on the grid (sum over axes of the Nyquist
// wavenumber squared). Used by the propagator anti-aliasing bound.
template <typename Real>
Real max_wavenumber_squared(const Grid<Real>& g) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real kx = pi / g.dx();
  if (g.dims() == 1) return kx * kx;
  const Real ky = pi / g.dy();
  return kx * kx + ky * ky;
}

// Laplacian via the multiplier -k^2 in Fourier space; exact for
// band-limited fields on the periodic grid.
template <typename Real>
ComplexField<Real> spectral_laplacian(const ComplexField<Real>& field) {
  ComplexField<Real> out = field;
  const auto& g = field.grid;
  detail::fft_grid<Real>(out.values, g, false);
  const auto kx = detail::wavenumbers<Real>(g.nx(), g.length_x());
  if (g.dims() == 1) {
    for (Index i = 0; i < g.nx(); ++i) out.values[i] *= -kx[i] * kx[i];
  } else {
    const auto ky = detail::wavenumbers<Real>(g.ny(), g.length_y());
    for (Index iy = 0; iy < g.ny(); ++iy) {
      const Real ky2 = ky[iy] * ky[iy];
      for (Index ix = 0; ix < g.nx(); ++ix)
        out.values[g.index(ix, iy)] *= -(kx[ix] * kx[ix] + ky2);
    }
  }
  detail::fft_grid<Real>(out.values, g, true);
  return out;
}

// Gradient via the multiplier i*k per axis.
template <typename Real>
ComplexVectorField<Real> spectral_gradient(const ComplexField<Real>& field) {
  using Complex = std::complex<Real>;
  const auto& g = field.grid;
  ComplexVectorField<Real> out(g);

  typename ComplexField<Real>::Values hat = field.values;
  detail::fft_grid<Real>(hat, g, false);

  const auto kx = detail::wavenumbers<Real>(g.nx(), g.length_x());
  out.x = hat;
  if (g.dims() == 1) {
    for (Index i = 0; i < g.nx(); ++i) out.x[i] *= Complex(0, kx[i]);
    detail::fft_grid<Real>(out.x, g, true);
    return out;
  }
  const auto ky = detail::wavenumbers<Real>(g.ny(), g.length_y());
  out.y = hat;
  for (Index iy = 0; iy < g.ny(); ++iy) {
    for (Index ix = 0; ix < g.nx(); ++ix) {
      const Index n = g.index(ix, iy);
      out.x[n] *= Complex(0, kx[ix]);
      out.y[n] *= Complex(0, ky[iy]);
    }
  }
  detail::fft_grid<Real>(out.x, g, true);
  detail::fft_grid<Real>(out.y, g, true);
  return out;
}

// Divergence with the same wavenumber convention, so that
// divergence(spectral_gradient(f)) == spectral_laplacian(f) node-wise.
template <typename Real>
ComplexField<Real> divergence(const ComplexVectorField<Real>& vf) {
  using Complex = std::complex<Real>;
  const auto& g = vf.grid;
  if (vf.x.size() != g.size() || (g.dims() == 2 && vf.y.size() != g.size()))
    throw ShapeError("divergence: component length does not match grid");

  typename ComplexField<Real>::Values hx = vf.x;
  detail::fft_grid<Real>(hx, g, false);
  const auto kx = detail::wavenumbers<Real>(g.nx(), g.length_x());

  ComplexField<Real> out(g);
  if (g.dims() == 1) {
    for (Index i = 0; i < g.nx(); ++i) out.values[i] = Complex(0, kx[i]) * hx[i];
    detail::fft_grid<Real>(out.values, g, true);
    return out;
  }

  typename ComplexField<Real>::Values hy = vf.y;
  detail::fft_grid<Real>(hy, g, false);
  const auto ky = detail::wavenumbers<Real>(g.ny(), g.length_y());
  for (Index iy = 0; iy < g.ny(); ++iy) {
    for (Index ix = 0; ix < g.nx(); ++ix) {
      const Index n = g.index(ix, iy);
      out.values[n] = Complex(0, kx[ix]) * hx[n] + Complex(0, ky[iy]) * hy[n];
    }
  }
  detail::fft_grid<Real>(out.values, g, true);
  return out;
}

}  // namespace tsq
