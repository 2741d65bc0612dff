#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "tsq/grid.hpp"

namespace tsq {

namespace detail {

// Kahan-compensated accumulator. Fixed summation order keeps reruns
// bit-identical, which the snapshot files rely on.
template <typename Real>
struct Kahan {
  Real sum = Real(0);
  Real carry = Real(0);
  void add(Real v) {
    const Real t = v - carry;
    const Real s = sum + t;
    carry = (s - sum) - t;
    sum = s;
  }
};

}  // namespace detail

// Midpoint/Riemann quadrature over the periodic box: sum(values) * cell.
// Spectrally accurate for smooth decaying integrands on the periodic grid.
template <typename Real>
std::complex<Real> integrate(const ComplexField<Real>& field) {
  detail::Kahan<Real> re, im;
  const auto& v = field.values;
  for (Index i = 0; i < v.size(); ++i) {
    const auto z = v[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw DomainError("integrate: non-finite value at node " + std::to_string(i) +
                        " (ix=" + std::to_string(field.grid.ix_of(i)) +
                        ", iy=" + std::to_string(field.grid.iy_of(i)) + ")");
    }
    re.add(z.real());
    im.add(z.imag());
  }
  const Real cell = field.grid.cell_measure();
  return {re.sum * cell, im.sum * cell};
}

// Integral of |f|^2 (always real, non-negative).
template <typename Real>
Real norm_squared(const ComplexField<Real>& field) {
  detail::Kahan<Real> acc;
  const auto& v = field.values;
  for (Index i = 0; i < v.size(); ++i) acc.add(std::norm(v[i]));
  return acc.sum * field.grid.cell_measure();
}

template <typename Real>
Real max_abs(const ComplexField<Real>& field) {
  Real m = Real(0);
  for (Index i = 0; i < field.values.size(); ++i) m = std::max(m, std::abs(field.values[i]));
  return m;
}

// Node-wise product c[k] = a[k] * b[k].
template <typename Real>
ComplexField<Real> pointwise_product(const ComplexField<Real>& a, const ComplexField<Real>& b) {
  require_same_grid(a.grid, b.grid, "pointwise_product");
  ComplexField<Real> c(a.grid);
  c.values = a.values * b.values;
  return c;
}

// Centroid of |f| over the grid; returns (x, y) with y = 0 in 1D.
template <typename Real>
Eigen::Matrix<Real, 2, 1> centroid_of_modulus(const ComplexField<Real>& field) {
  detail::Kahan<Real> w, cx, cy;
  const auto& g = field.grid;
  for (Index i = 0; i < field.values.size(); ++i) {
    const Real a = std::abs(field.values[i]);
    w.add(a);
    cx.add(a * g.x(g.ix_of(i)));
    if (g.dims() == 2) cy.add(a * g.y(g.iy_of(i)));
  }
  if (w.sum <= Real(0)) throw DomainError("centroid_of_modulus: field vanishes identically");
  return {cx.sum / w.sum, cy.sum / w.sum};
}

// Max |f| over the wrap boundary ring (the outermost sample rows/columns).
template <typename Real>
Real boundary_max_abs(const ComplexField<Real>& field) {
  const auto& g = field.grid;
  Real m = Real(0);
  if (g.dims() == 1) {
    m = std::max(std::abs(field.values[0]), std::abs(field.values[g.nx() - 1]));
    return m;
  }
  for (Index ix = 0; ix < g.nx(); ++ix) {
    m = std::max(m, std::abs(field.values[g.index(ix, 0)]));
    m = std::max(m, std::abs(field.values[g.index(ix, g.ny() - 1)]));
  }
  for (Index iy = 0; iy < g.ny(); ++iy) {
    m = std::max(m, std::abs(field.values[g.index(0, iy)]));
    m = std::max(m, std::abs(field.values[g.index(g.nx() - 1, iy)]));
  }
  return m;
}

}  // namespace tsq
