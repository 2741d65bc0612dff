#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "tsq/grid.hpp"
#include "tsq/quadrature.hpp"
#include "tsq/spectral.hpp"
#include "tsq/states.hpp"

namespace tsq {

// Sampled transition amplitude A_s(t) = integral of rho_s, its mean,
// drift over the sample window, and P_s = |A_s|^2. A_s is conserved in
// continuum, so drift is a quality metric for the discretization.
template <typename Real = double>
struct TransitionRecord {
  using Complex = std::complex<Real>;

  std::vector<std::pair<Real, Complex>> amplitude_samples;
  Complex amplitude{};
  Real probability = Real(0);
  Real drift = Real(0);
  std::vector<std::pair<Real, Real>> continuity_residuals;

  Real relative_drift() const {
    return drift / std::max(std::abs(amplitude), Real(1e-12));
  }
};

// rho_s = phi^* psi, the transition amplitude density (generally complex).
template <typename Real>
ComplexField<Real> amplitude_density(const ComplexField<Real>& psi,
                                     const ComplexField<Real>& phi_star) {
  require_same_grid(psi.grid, phi_star.grid, "amplitude_density");
  return pointwise_product(phi_star, psi);
}

// j_s = (1/2i)(phi^* grad psi - psi grad phi^*), the transition amplitude
// current density; satisfies d rho_s/dt + div j_s = 0 for exact pairs.
template <typename Real>
ComplexVectorField<Real> current_density(const ComplexField<Real>& psi,
                                         const ComplexField<Real>& phi_star) {
  using Complex = std::complex<Real>;
  require_same_grid(psi.grid, phi_star.grid, "current_density");
  const auto grad_psi = spectral_gradient(psi);
  const auto grad_phi = spectral_gradient(phi_star);
  const Complex half_over_i = Complex(0, -0.5);  // 1/(2i)
  ComplexVectorField<Real> j(psi.grid);
  j.x = half_over_i * (phi_star.values * grad_psi.x - psi.values * grad_phi.x);
  if (psi.grid.dims() == 2)
    j.y = half_over_i * (phi_star.values * grad_psi.y - psi.values * grad_phi.y);
  return j;
}

namespace detail {

template <typename Real>
void require_pair_directions(const StateSpec<Real>& psi_spec, const StateSpec<Real>& phi_spec,
                             const char* what) {
  if (psi_spec.direction != Direction::retarded)
    throw ParameterError(std::string(what) + ": psi_spec must be retarded");
  if (phi_spec.direction != Direction::advanced)
    throw ParameterError(std::string(what) + ": phi_spec must be advanced");
}

// Support check for unbounded states: the box must capture the product
// (boundary amplitude below 1e-10). Square-well modes live exactly on
// [0, a] and cannot be truncated.
template <typename Real>
void check_support(const ComplexField<Real>& rho, bool gaussian_pair, Real t) {
  if (!gaussian_pair) return;
  if (boundary_max_abs(rho) > Real(1e-10))
    throw TruncationError("transition_amplitude: state support truncated by the grid at t = " +
                          std::to_string(t));
}

}  // namespace detail

// A_s sampled at the given times; the record reports the mean, the drift
// max_j |A_s(t_j) - mean|, and P_s = |mean|^2.
template <typename Real>
TransitionRecord<Real> transition_amplitude(const StateSpec<Real>& psi_spec,
                                            const StateSpec<Real>& phi_spec,
                                            const Grid<Real>& grid,
                                            const std::vector<Real>& sample_times) {
  using Complex = std::complex<Real>;
  detail::require_pair_directions(psi_spec, phi_spec, "transition_amplitude");
  if (sample_times.size() < 3)
    throw ParameterError("transition_amplitude: need at least 3 sample times");

  const bool gaussian_pair = !psi_spec.is_square_well() && !phi_spec.is_square_well();

  TransitionRecord<Real> rec;
  detail::Kahan<Real> acc_re, acc_im;
  for (const Real t : sample_times) {
    const auto psi = sample_on_grid(psi_spec, grid, t);
    const auto phi = sample_on_grid(phi_spec, grid, t);
    const auto rho = amplitude_density(psi, phi);
    detail::check_support(rho, gaussian_pair, t);
    const Complex a = integrate(rho);
    rec.amplitude_samples.emplace_back(t, a);
    acc_re.add(a.real());
    acc_im.add(a.imag());
  }
  const Real n = Real(rec.amplitude_samples.size());
  rec.amplitude = Complex(acc_re.sum / n, acc_im.sum / n);
  rec.probability = std::norm(rec.amplitude);
  for (const auto& [t, a] : rec.amplitude_samples)
    rec.drift = std::max(rec.drift, std::abs(a - rec.amplitude));
  return rec;
}

// L2 norm of (rho_s(t+dt) - rho_s(t-dt)) / (2 dt) + div j_s(t).
// Square-well pairs are evaluated on the odd-extended periodic domain
// [0, 2a), where the modes are exact lattice sine modes, and the norm is
// restricted to the physical half.
template <typename Real>
Real continuity_residual(const StateSpec<Real>& psi_spec, const StateSpec<Real>& phi_spec,
                         const Grid<Real>& grid, Real t, Real dt) {
  detail::require_pair_directions(psi_spec, phi_spec, "continuity_residual");
  if (!(dt > Real(0))) throw ParameterError("continuity_residual: dt must be positive");

  const bool well_pair = psi_spec.is_square_well() && phi_spec.is_square_well();
  if (psi_spec.is_square_well() != phi_spec.is_square_well())
    throw ShapeError("continuity_residual: cannot mix well modes with Gaussian states");

  if (well_pair) {
    const auto& wp = std::get<SquareWellMode<Real>>(psi_spec.kind);
    const auto& wq = std::get<SquareWellMode<Real>>(phi_spec.kind);
    if (wp.a != wq.a) throw ShapeError("continuity_residual: well lengths differ");
    if (grid.dims() != 1 || grid.xmin() != Real(0) || grid.xmax() != wp.a)
      throw ShapeError("continuity_residual: well grid must span [0, a)");
    const Grid<Real> doubled = Grid<Real>::line(Real(0), Real(2) * wp.a, 2 * grid.nx());
    auto sample = [&](const SquareWellMode<Real>& w, Direction dir, Real ts) {
      ComplexField<Real> f(doubled);
      for (Index i = 0; i < doubled.nx(); ++i)
        f.values[i] = detail::well_value_unchecked(w, dir, doubled.x(i), ts);
      return f;
    };
    const auto rho_at = [&](Real ts) {
      return amplitude_density(sample(wp, psi_spec.direction, ts),
                               sample(wq, phi_spec.direction, ts));
    };
    const auto rho_p = rho_at(t + dt);
    const auto rho_m = rho_at(t - dt);
    const auto j = current_density(sample(wp, psi_spec.direction, t),
                                   sample(wq, phi_spec.direction, t));
    ComplexField<Real> res = divergence(j);
    res.values += (rho_p.values - rho_m.values) / (Real(2) * dt);
    detail::Kahan<Real> acc;
    for (Index i = 0; i < grid.nx(); ++i) acc.add(std::norm(res.values[i]));
    return std::sqrt(acc.sum * grid.dx());
  }

  const auto rho_at = [&](Real ts) {
    return amplitude_density(sample_on_grid(psi_spec, grid, ts),
                             sample_on_grid(phi_spec, grid, ts));
  };
  const auto rho_p = rho_at(t + dt);
  const auto rho_m = rho_at(t - dt);
  const auto j =
      current_density(sample_on_grid(psi_spec, grid, t), sample_on_grid(phi_spec, grid, t));
  ComplexField<Real> res = divergence(j);
  res.values += (rho_p.values - rho_m.values) / (Real(2) * dt);
  return std::sqrt(norm_squared(res));
}

template <typename Real = double>
struct BornSample {
  Real sigma_delta;
  Real value;        // normalized overlap integral
  Real discrepancy;  // |value - |psi(event)|^2|
};

// Born-rule special case: pairing psi with a narrowing advanced Gaussian at
// the event and normalizing by the narrow state's self-overlap recovers the
// Copenhagen probability density |psi(event)|^2 as sigma_delta -> 0.
template <typename Real>
std::vector<BornSample<Real>> born_rule_reduction(const StateSpec<Real>& psi_spec,
                                                  const SpacetimePoint<Real>& event,
                                                  const std::vector<Real>& sigma_deltas,
                                                  const Grid<Real>& grid) {
  if (psi_spec.direction != Direction::retarded)
    throw ParameterError("born_rule_reduction: psi_spec must be retarded");
  if (grid.dims() != 2) throw ShapeError("born_rule_reduction: requires a 2D grid");
  if (sigma_deltas.empty())
    throw ParameterError("born_rule_reduction: sigma_deltas must be non-empty");
  for (std::size_t i = 0; i + 1 < sigma_deltas.size(); ++i)
    if (!(sigma_deltas[i] > sigma_deltas[i + 1]))
      throw ParameterError("born_rule_reduction: sigma_deltas must be strictly decreasing");
  const Real resolvable = Real(2) * std::max(grid.dx(), grid.dy());
  for (const Real sd : sigma_deltas) {
    if (!(sd > Real(0))) throw ParameterError("born_rule_reduction: sigma_delta must be positive");
    if (sd < resolvable)
      throw ParameterError("born_rule_reduction: sigma_delta " + std::to_string(sd) +
                           " below 2*dx; delta surrogate unresolvable on this grid");
  }
  if (!grid.contains(event.x, event.y))
    throw TruncationError("born_rule_reduction: event lies outside the grid box");

  const Real born_density = std::norm(eval_state(psi_spec, event));
  const auto psi = sample_on_grid(psi_spec, grid, event.t);

  std::vector<BornSample<Real>> out;
  out.reserve(sigma_deltas.size());
  for (const Real sd : sigma_deltas) {
    const auto phi = sample_on_grid(narrow_gaussian<Real>(event, sd, Direction::advanced), grid,
                                    event.t);
    detail::Kahan<Real> num, den;
    for (Index i = 0; i < psi.values.size(); ++i) {
      const Real ph2 = std::norm(phi.values[i]);
      num.add(ph2 * std::norm(psi.values[i]));
      den.add(ph2);
    }
    if (den.sum <= Real(0))
      throw TruncationError("born_rule_reduction: narrow state has no support on the grid");
    const Real value = num.sum / den.sum;  // cell measure cancels in the ratio
    out.push_back({sd, value, std::abs(value - born_density)});
  }
  return out;
}

}  // namespace tsq
