#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "tsq/grid.hpp"
#include "tsq/potential.hpp"
#include "tsq/spectral.hpp"

namespace tsq {

template <typename Real = double>
struct EvolutionParams {
  Real dt = Real(0.01);
  long steps = 1;
  Direction direction = Direction::retarded;
  long snapshot_stride = 1;
};

namespace detail {

// Kinetic and potential phase factors for one Strang step. The advanced
// direction is conjugate-step-conjugate, which flips the sign of every
// phase while keeping the CAP decay factor e^{dt Im V} a decay.
template <typename Real>
struct StepPhases {
  using Values = typename ComplexField<Real>::Values;
  Values half_kinetic;  // applied in Fourier space, twice per step
  Values potential;     // applied in real space, once per step

  StepPhases(const Grid<Real>& g, const Potential<Real>& pot, Real dt, Direction dir) {
    using Complex = std::complex<Real>;
    const Real sign = dir == Direction::retarded ? Real(1) : Real(-1);

    half_kinetic.resize(g.size());
    const auto kx = wavenumbers<Real>(g.nx(), g.length_x());
    if (g.dims() == 1) {
      for (Index i = 0; i < g.nx(); ++i)
        half_kinetic[i] = std::exp(Complex(0, -sign * dt / Real(2) * kx[i] * kx[i] / Real(2)));
    } else {
      const auto ky = wavenumbers<Real>(g.ny(), g.length_y());
      for (Index iy = 0; iy < g.ny(); ++iy) {
        const Real ky2 = ky[iy] * ky[iy];
        for (Index ix = 0; ix < g.nx(); ++ix) {
          const Real k2 = kx[ix] * kx[ix] + ky2;
          half_kinetic[g.index(ix, iy)] = std::exp(Complex(0, -sign * dt / Real(2) * k2 / Real(2)));
        }
      }
    }

    potential.resize(g.size());
    for (Index i = 0; i < g.size(); ++i) {
      // e^{-i dt (re + i im)} (retarded) -> modulus e^{dt im} decays.
      potential[i] = std::exp(Complex(pot.im[i] * dt, -sign * dt * pot.re[i]));
    }
  }
};

template <typename Real>
void check_step_preconditions(const ComplexField<Real>& field, const Potential<Real>& pot,
                              Real dt) {
  require_same_grid(field.grid, pot.grid, "splitstep_step");
  pot.validate();
  if (!(dt > Real(0))) throw ParameterError("splitstep_step: dt must be positive");
  if (dt * max_wavenumber_squared(field.grid) / Real(2) >= std::numbers::pi_v<Real>)
    throw ParameterError(
        "splitstep_step: anti-aliasing bound dt * k_max^2 / 2 < pi violated; reduce dt or coarsen "
        "the grid");
}

}  // namespace detail

// One Strang-split step: half kinetic phase in Fourier space, full potential
// phase in real space, half kinetic phase. Unitary for Im V = 0.
template <typename Real>
ComplexField<Real> splitstep_step(const ComplexField<Real>& field, const Potential<Real>& pot,
                                  Real dt, Direction direction) {
  detail::check_step_preconditions(field, pot, dt);
  const detail::StepPhases<Real> ph(field.grid, pot, dt, direction);

  ComplexField<Real> out = field;
  detail::fft_grid<Real>(out.values, out.grid, false);
  out.values *= ph.half_kinetic;
  detail::fft_grid<Real>(out.values, out.grid, true);
  out.values *= ph.potential;
  detail::fft_grid<Real>(out.values, out.grid, false);
  out.values *= ph.half_kinetic;
  detail::fft_grid<Real>(out.values, out.grid, true);
  return out;
}

// Iterates the split step, recording deep-copied snapshots every
// snapshot_stride steps (first and last always included). Snapshot times are
// relative to the initial field. Adjacent half-kinetic factors are merged
// between snapshots, halving the transform count; the palindromic K-V-K
// structure is preserved, which keeps the bilinear integral of an
// advanced/retarded pair exactly constant step to step.
template <typename Real>
std::vector<std::pair<Real, ComplexField<Real>>> evolve(const ComplexField<Real>& field,
                                                        const Potential<Real>& pot,
                                                        const EvolutionParams<Real>& params) {
  detail::check_step_preconditions(field, pot, params.dt);
  if (params.steps < 1) throw ParameterError("evolve: steps must be >= 1");
  if (params.snapshot_stride < 1) throw ParameterError("evolve: snapshot_stride must be >= 1");

  const detail::StepPhases<Real> ph(field.grid, pot, params.dt, params.direction);
  const auto& g = field.grid;

  std::vector<std::pair<Real, ComplexField<Real>>> snaps;
  snaps.emplace_back(Real(0), field);

  ComplexField<Real> state = field;
  bool in_fourier = false;
  for (long s = 1; s <= params.steps; ++s) {
    if (!in_fourier) detail::fft_grid<Real>(state.values, g, false);
    state.values *= ph.half_kinetic;
    detail::fft_grid<Real>(state.values, g, true);
    state.values *= ph.potential;
    detail::fft_grid<Real>(state.values, g, false);
    state.values *= ph.half_kinetic;
    in_fourier = true;

    const bool record = (s % params.snapshot_stride == 0) || s == params.steps;
    if (record) {
      detail::fft_grid<Real>(state.values, g, true);
      in_fourier = false;
      for (Index i = 0; i < state.values.size(); ++i) {
        const auto z = state.values[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
          throw DomainError("evolve: non-finite value after step " + std::to_string(s));
      }
      snaps.emplace_back(Real(s) * params.dt, state);
    }
  }
  return snaps;
}

}  // namespace tsq
