#include <chrono>
#include <cmath>
#include <numbers>

#include "tsq/interferometer.hpp"
#include "tsq/propagator.hpp"
#include "tsq/scenario.hpp"
#include "tsq/transition.hpp"

namespace tsq {

namespace {

using Snapshots = std::vector<std::pair<double, ComplexField<double>>>;

constexpr double kContinuityDt = 1e-3;  // central-difference step for residual reporting

Grid<double> make_grid(const ScenarioConfig::GridBlock& g) {
  if (g.two_d) return Grid<double>::box(g.xmin, g.xmax, g.nx, g.ymin, g.ymax, g.ny);
  return Grid<double>::line(g.xmin, g.xmax, g.nx);
}

std::vector<double> resolve_sample_times(const ScenarioConfig& cfg, double t_i, double t_f) {
  if (!cfg.run.sample_times.empty()) return cfg.run.sample_times;
  std::vector<double> times;
  const int n = cfg.run.snapshots;
  for (int j = 0; j < n; ++j) times.push_back(t_i + (t_f - t_i) * double(j) / double(n - 1));
  return times;
}

// ---------------------------------------------------------------- renninger1960

RunReport run_renninger1960(const ScenarioConfig& cfg, Snapshots& snaps) {
  RunReport report;
  report.scenario = cfg.scenario;

  const Grid<double> grid = make_grid(*cfg.grid);
  const SpacetimePoint<double> src{cfg.source->x, cfg.source->y, cfg.source->t};
  const SpacetimePoint<double> det{cfg.detector->x, cfg.detector->y, cfg.detector->t};
  const auto psi_spec = stationary_gaussian(src, Direction::retarded);
  const auto phi_spec = stationary_gaussian(det, Direction::advanced);
  const auto times = resolve_sample_times(cfg, src.t, det.t);

  if (!cfg.obstacle) {
    // analytic mode: closed forms sampled at the requested times
    auto rec = transition_amplitude(psi_spec, phi_spec, grid, times);
    double res_max = 0;
    for (std::size_t j = 1; j + 1 < times.size(); ++j) {
      const double r = continuity_residual(psi_spec, phi_spec, grid, times[j], kContinuityDt);
      rec.continuity_residuals.emplace_back(times[j], r);
      res_max = std::max(res_max, r);
    }
    for (const double t : times) {
      snaps.emplace_back(t, amplitude_density(sample_on_grid(psi_spec, grid, t),
                                              sample_on_grid(phi_spec, grid, t)));
    }
    report.a_s_re = rec.amplitude.real();
    report.a_s_im = rec.amplitude.imag();
    report.p_s = rec.probability;
    report.drift = rec.drift;
    if (!rec.continuity_residuals.empty()) report.continuity_residual_max = res_max;
    return report;
  }

  // diffraction mode: psi evolved forward from the source and the advanced
  // field evolved in reverse time from the detector, both under the same
  // real barrier, so the bilinear A_s stays constant step to step.
  const auto& ob = *cfg.obstacle;
  const auto pot = build_arc_potential(grid, ob.radius, ob.theta_start, ob.theta_end,
                                       ob.thickness, ob.mode, ob.strength);

  const double span = det.t - src.t;
  const double dt = cfg.run.dt;
  const long steps = std::lround(span / dt);
  if (std::abs(double(steps) * dt - span) > 1e-9 * std::max(1.0, span))
    throw ConfigError("renninger1960 diffraction mode: (t_f - t_i) must be a multiple of dt");
  const long stride = steps / (long(times.size()) - 1);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double expected = src.t + double(j) * double(stride) * dt;
    if (std::abs(times[j] - expected) > 1e-9 * std::max(1.0, span))
      throw ConfigError(
          "renninger1960 diffraction mode: sample times must be evenly spaced and divisible by "
          "dt");
  }

  EvolutionParams<double> params;
  params.dt = dt;
  params.steps = steps;
  params.direction = Direction::retarded;
  params.snapshot_stride = stride;

  const auto psi0 = sample_on_grid(psi_spec, grid, src.t);
  const auto psi_snaps = evolve(psi0, pot, params);

  // g(tau) = phi*(t_f - tau) obeys the forward equation in tau
  const auto g0 = sample_on_grid(phi_spec, grid, det.t);
  const auto g_snaps = evolve(g0, pot, params);

  if (psi_snaps.size() != times.size() || g_snaps.size() != times.size())
    throw ConfigError("renninger1960 diffraction mode: snapshot stride mismatch");

  TransitionRecord<double> rec;
  detail::Kahan<double> acc_re, acc_im;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto& psi_t = psi_snaps[j].second;
    const auto& g_tau = g_snaps[times.size() - 1 - j].second;
    const auto rho = amplitude_density(psi_t, g_tau);
    const auto a = integrate(rho);
    rec.amplitude_samples.emplace_back(times[j], a);
    acc_re.add(a.real());
    acc_im.add(a.imag());
    snaps.emplace_back(times[j], rho);
  }
  const double n = double(times.size());
  rec.amplitude = {acc_re.sum / n, acc_im.sum / n};
  rec.probability = std::norm(rec.amplitude);
  for (const auto& [t, a] : rec.amplitude_samples)
    rec.drift = std::max(rec.drift, std::abs(a - rec.amplitude));

  report.a_s_re = rec.amplitude.real();
  report.a_s_im = rec.amplitude.imag();
  report.p_s = rec.probability;
  report.drift = rec.drift;
  return report;
}

// ------------------------------------------------------------------ squarewell

RunReport run_squarewell(const ScenarioConfig& cfg, Snapshots& snaps) {
  RunReport report;
  report.scenario = cfg.scenario;

  const Grid<double> grid = make_grid(*cfg.grid);
  const double a = grid.xmax();
  const auto times = resolve_sample_times(cfg, 0.0, 1.0);

  const auto xi1_ret = square_well_mode(1, a, Direction::retarded);
  const auto xi1_adv = square_well_mode(1, a, Direction::advanced);
  const auto xi2_adv = square_well_mode(2, a, Direction::advanced);

  const auto rec11 = transition_amplitude(xi1_ret, xi1_adv, grid, times);
  const auto rec12 = transition_amplitude(xi1_ret, xi2_adv, grid, times);

  report.a_s_re = rec11.amplitude.real();
  report.a_s_im = rec11.amplitude.imag();
  report.p_s = rec11.probability;
  report.drift = rec11.drift;
  report.extra.emplace_back("a_s_12_abs", std::abs(rec12.amplitude));
  report.extra.emplace_back("p_s_12", rec12.probability);
  report.extra.emplace_back("drift_12", rec12.drift);

  // density phase factor of the xi1/xi2* pair: rho(t) = rho(0) e^{i w t}
  // with w = 3 pi^2 / (2 a^2)
  const double w_rel = 3.0 * std::numbers::pi * std::numbers::pi / (2.0 * a * a);
  const double t_probe = times.back();
  const auto rho0 = amplitude_density(sample_on_grid(xi1_ret, grid, 0.0),
                                      sample_on_grid(xi2_adv, grid, 0.0));
  const auto rho1 = amplitude_density(sample_on_grid(xi1_ret, grid, t_probe),
                                      sample_on_grid(xi2_adv, grid, t_probe));
  detail::Kahan<double> num_re, num_im, den;
  for (Index i = 0; i < rho0.values.size(); ++i) {
    const auto c = rho1.values[i] * std::conj(rho0.values[i]);
    num_re.add(c.real());
    num_im.add(c.imag());
    den.add(std::norm(rho0.values[i]));
  }
  const std::complex<double> ratio(num_re.sum / den.sum, num_im.sum / den.sum);
  const std::complex<double> expected = std::polar(1.0, w_rel * t_probe);
  report.extra.emplace_back("phase_factor_error", std::abs(ratio - expected));

  const double res = continuity_residual(xi1_ret, xi2_adv, grid, t_probe / 2.0, 1e-5);
  report.continuity_residual_max = res;

  for (const double t : times) {
    snaps.emplace_back(t, amplitude_density(sample_on_grid(xi1_ret, grid, t),
                                            sample_on_grid(xi2_adv, grid, t)));
  }
  return report;
}

// --------------------------------------------------------------- renninger1953

RunReport run_renninger1953(const ScenarioConfig& cfg, Snapshots& snaps) {
  RunReport report;
  report.scenario = cfg.scenario;
  const auto& mz = *cfg.mzi;

  MziLayout<double> layout;
  layout.arm = mz.arm;
  layout.source_arm = mz.source_arm;
  layout.detector_arm = mz.detector_arm;
  layout.wave_number = mz.k;

  layout.block_upper = false;
  const auto calibration = propagate_modes(make_mzi(layout));
  layout.block_upper = mz.block_upper;
  const auto graph = make_mzi(layout);
  const auto blocked = propagate_modes(graph);

  report.detector_probabilities.emplace_back("calibration_p_d1", calibration.probability("D1"));
  report.detector_probabilities.emplace_back("calibration_p_d2", calibration.probability("D2"));
  report.detector_probabilities.emplace_back("p_d1", blocked.probability("D1"));
  report.detector_probabilities.emplace_back("p_d2", blocked.probability("D2"));
  if (mz.block_upper)
    report.detector_probabilities.emplace_back("p_d3", blocked.probability("D3"));

  const auto paths = handshake_paths(graph);
  int open_total = 0;
  const HandshakePath<double>* render_path = nullptr;
  for (const auto& p : paths) {
    if (!p.open) continue;
    ++open_total;
    if (p.node_names.back() == "D2" && !render_path) render_path = &p;
  }
  report.extra.emplace_back("paths_total", double(paths.size()));
  report.extra.emplace_back("paths_open", double(open_total));

  if (render_path) {
    const double s = std::sqrt(2.0) * mz.sigma;  // s^2 = 2 sigma^2
    const double t_f = render_path->length / mz.k;
    const auto times = resolve_sample_times(cfg, 0.0, t_f);

    Grid<double> render_grid;
    if (cfg.grid) {
      render_grid = make_grid(*cfg.grid);
    } else {
      // bounding box of the path plus room for the widest envelope
      double xmin = render_path->positions.front()[0], xmax = xmin;
      double ymin = render_path->positions.front()[1], ymax = ymin;
      for (const auto& p : render_path->positions) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
      }
      const double s2 = s * s;
      const double sig_end = std::sqrt((s2 * s2 + t_f * t_f) / (2.0 * s2));
      const double margin = 4.0 * sig_end;
      render_grid = Grid<double>::box(xmin - margin, xmax + margin, 256, ymin - margin,
                                      ymax + margin, 256);
    }
    for (auto& [t, f] : path_density_snapshots(*render_path, mz.k, s, times, render_grid))
      snaps.emplace_back(t, std::move(f));
  }
  return report;
}

// ------------------------------------------------------------ angular_ensemble

RunReport run_angular_ensemble(const ScenarioConfig& cfg, Snapshots& snaps) {
  (void)snaps;
  RunReport report;
  report.scenario = cfg.scenario;

  const Grid<double> grid = make_grid(*cfg.grid);
  const SpacetimePoint<double> src{cfg.source->x, cfg.source->y, cfg.source->t};
  const SpacetimePoint<double> det{cfg.detector->x, cfg.detector->y, cfg.detector->t};
  const double radius = std::hypot(det.x - src.x, det.y - src.y);
  if (!(radius > 0)) throw ConfigError("angular_ensemble: detector must not sit on the source");

  const auto psi_spec = stationary_gaussian(src, Direction::retarded);
  const std::vector<double> times{src.t, 0.5 * (src.t + det.t), det.t};

  const int n_det = cfg.run.detectors;
  std::vector<double> p_s(n_det);
  detail::Kahan<double> total, quarter;
  double p_min = std::numeric_limits<double>::max(), p_max = 0;
  for (int j = 0; j < n_det; ++j) {
    const double th = 2.0 * std::numbers::pi * double(j) / double(n_det);
    const SpacetimePoint<double> anchor{src.x + radius * std::cos(th),
                                        src.y + radius * std::sin(th), det.t};
    if (!grid.contains(anchor.x, anchor.y))
      throw ConfigError("angular_ensemble: detector circle leaves the grid box");
    const auto rec = transition_amplitude(
        psi_spec, stationary_gaussian(anchor, Direction::advanced), grid, times);
    p_s[j] = rec.probability;
    total.add(rec.probability);
    if (th < std::numbers::pi / 2.0) quarter.add(rec.probability);
    p_min = std::min(p_min, rec.probability);
    p_max = std::max(p_max, rec.probability);
  }
  const double mean = total.sum / double(n_det);
  report.p_s = mean;
  report.extra.emplace_back("p_s_spread_rel", (p_max - p_min) / mean);
  report.extra.emplace_back("quarter_share", quarter.sum / total.sum);

  if (cfg.obstacle) {
    // absorbed-fraction run: 1 - final norm under the absorbing arc
    const auto& ob = *cfg.obstacle;
    if (ob.mode != ArcMode::absorber)
      throw ConfigError("angular_ensemble absorbed-fraction run needs an absorber-mode obstacle");
    const auto pot = build_arc_potential(grid, ob.radius, ob.theta_start, ob.theta_end,
                                         ob.thickness, ob.mode, ob.strength);
    EvolutionParams<double> params;
    params.dt = cfg.run.absorb_dt;
    params.steps = std::lround(cfg.run.absorb_time / cfg.run.absorb_dt);
    params.direction = Direction::retarded;
    params.snapshot_stride = params.steps;
    const auto psi0 = sample_on_grid(psi_spec, grid, src.t);
    const auto evolved = evolve(psi0, pot, params);
    report.absorbed_fraction = 1.0 - norm_squared(evolved.back().second);
  }
  return report;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  Snapshots snaps;
  RunReport report;
  if (cfg.scenario == "renninger1960")
    report = run_renninger1960(cfg, snaps);
  else if (cfg.scenario == "squarewell")
    report = run_squarewell(cfg, snaps);
  else if (cfg.scenario == "renninger1953")
    report = run_renninger1953(cfg, snaps);
  else if (cfg.scenario == "angular_ensemble")
    report = run_angular_ensemble(cfg, snaps);
  else
    throw ConfigError("unknown scenario name '" + cfg.scenario + "'");

  emit::emit_outputs(report, snaps, cfg);

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace tsq
