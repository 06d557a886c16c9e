#include "berrysim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace berrysim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int count_rf_slices(std::span<const ControlSlice> slices) {
  int n = 0;
  for (const auto& c : slices)
    if (!c.is_pulse_marker) ++n;
  return n;
}

struct SampleDraw {
  double b1_scale = 1.0;
  std::vector<double> jitter_rad;
};

SampleDraw draw_sample(const SimConfig& cfg, std::uint64_t sample_index, int n_rf) {
  SampleDraw d;
  std::mt19937_64 rng(sample_seed(cfg.rng_seed, sample_index));
  if (!cfg.b1.explicit_scales.empty()) {
    d.b1_scale = cfg.b1.explicit_scales[sample_index % cfg.b1.explicit_scales.size()];
  } else if (cfg.b1.sigma_rel > 0.0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    d.b1_scale = 1.0 + cfg.b1.sigma_rel * n01(rng);
    if (d.b1_scale < 0.0) d.b1_scale = 0.0;
  }
  if (cfg.jitter.sigma_rad > 0.0 && n_rf > 0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    d.jitter_rad.resize(n_rf);
    for (double& j : d.jitter_rad) j = cfg.jitter.sigma_rad * n01(rng);
  }
  return d;
}

// run the ensemble as a parallel map with an index-ordered reduction
template <typename Fn>
void parallel_for_samples(int ensemble, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, ensemble);
  if (threads == 1) {
    for (int i = 0; i < ensemble; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < ensemble; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

double arg_deg(Complex z) { return rad2deg(std::arg(z)); }

bool has_s_pulse(std::span<const ControlSlice> slices) {
  for (const ControlSlice& c : slices)
    if (c.is_pulse_marker && c.pulse.target == SpinTarget::S) return true;
  return false;
}

// Signal-only run restricted to the 2-dim I block of one S manifold; valid
// whenever no hard pulse acts on S (the dynamics never leave the manifold).
// The S-offset scalar phase is global within the block and cancels in the
// signal, so it is omitted. Matches run_once(...).signal exactly otherwise.
Complex run_signal(std::span<const ControlSlice> slices, const SpinSystem& system, int s_manifold,
                   double b1_scale, std::span<const double> jitter_rad) {
  if (has_s_pulse(slices)) return run_once(slices, system, s_manifold, b1_scale, jitter_rad).signal;
  const double offset = manifold_offset_hz(system, s_manifold);
  constexpr Complex kI{0.0, 1.0};

  // preparation 90y on I from |0>_I: (|0> + |1>)/sqrt(2)
  Eigen::Vector2cd v(Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0));
  std::size_t rf_index = 0;
  for (const ControlSlice& c : slices) {
    if (c.is_pulse_marker) {
      const double angle = deg2rad(c.pulse.angle_deg);
      const double axis = deg2rad(c.pulse.axis_phase_deg);
      const Complex a(std::cos(0.5 * angle), 0.0);
      const Complex b = -kI * std::sin(0.5 * angle) * std::exp(-kI * axis);
      const Complex v0 = a * v(0) + b * v(1);
      v(1) = -std::conj(b) * v(0) + a * v(1);
      v(0) = v0;
      continue;
    }
    const double nu1 = c.nu1_hz * b1_scale;
    const double phase =
        c.phase_rad + (rf_index < jitter_rad.size() ? jitter_rad[rf_index] : 0.0);
    ++rf_index;
    const Eigen::Vector3d field =
        kTwoPi * Eigen::Vector3d(nu1 * std::cos(phase), nu1 * std::sin(phase), offset);
    const Matrix2 u = su2_propagator(field, c.dt_s);
    const Complex v0 = u(0, 0) * v(0) + u(0, 1) * v(1);
    v(1) = u(1, 0) * v(0) + u(1, 1) * v(1);
    v(0) = v0;
  }
  return 2.0 * std::conj(v(0)) * v(1);
}

double unwrap_to_hint(double wrapped_deg, double hint_deg) {
  return wrapped_deg + 360.0 * std::round((hint_deg - wrapped_deg) / 360.0);
}

}  // namespace

void SimConfig::validate() const {
  if (b1.sigma_rel < 0.0) throw std::invalid_argument("b1 sigma must be >= 0");
  if (jitter.sigma_rad < 0.0) throw std::invalid_argument("jitter sigma must be >= 0");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble_size must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t sample_index) {
  return splitmix64(base_seed ^ splitmix64(sample_index + 1));
}

RunResult run_once(std::span<const ControlSlice> slices, const SpinSystem& system, int s_manifold,
                   double b1_scale, std::span<const double> jitter_rad) {
  if (s_manifold != 0 && s_manifold != 1) throw std::invalid_argument("s_manifold must be 0 or 1");
  const double offset = manifold_offset_hz(system, s_manifold);

  RunResult out;
  out.path.blocks.emplace_back();
  StateVec state = basis_state(0, s_manifold);
  state = hard_pulse(SpinTarget::I, 90.0, 90.0) * state;  // preparation 90y

  std::size_t rf_index = 0;
  for (const ControlSlice& c : slices) {
    if (c.is_pulse_marker) {
      state = hard_pulse(c.pulse.target, c.pulse.angle_deg, c.pulse.axis_phase_deg) * state;
      if (!out.path.blocks.back().empty()) out.path.blocks.emplace_back();
      continue;
    }
    const double nu1 = c.nu1_hz * b1_scale;
    const double phase =
        c.phase_rad + (rf_index < jitter_rad.size() ? jitter_rad[rf_index] : 0.0);
    ++rf_index;
    state = slice_propagator(system, RFControl(nu1, phase), c.dt_s) * state;
    out.path.blocks.back().push_back(field_direction(offset, nu1, phase));
  }
  if (out.path.blocks.back().empty()) out.path.blocks.pop_back();
  out.signal = transverse_signal(state, s_manifold);
  return out;
}

Operator sequence_propagator(std::span<const ControlSlice> slices, const SpinSystem& system,
                             double b1_scale) {
  Operator u = Operator::Identity();
  for (const ControlSlice& c : slices) {
    if (c.is_pulse_marker)
      u = hard_pulse(c.pulse.target, c.pulse.angle_deg, c.pulse.axis_phase_deg) * u;
    else
      u = slice_propagator(system, RFControl(c.nu1_hz * b1_scale, c.phase_rad), c.dt_s) * u;
  }
  return u;
}

std::array<double, 2> analytic_line_phases_deg(const SpinSystem& system, double nu1_hz) {
  return {observed_line_phase_deg(manifold_offset_hz(system, 0), nu1_hz),
          observed_line_phase_deg(manifold_offset_hz(system, 1), nu1_hz)};
}

PhaseResult measure_phases(const Sequence& seq, const SpinSystem& system, const SimConfig& config,
                           std::optional<std::array<double, 2>> unwrap_hint_deg) {
  config.validate();
  const std::vector<ControlSlice> main_slices = discretize(seq);
  const Sequence ref_seq = config.reference == ReferenceKind::Bare90
                               ? build_reference(ReferenceKind::Bare90)
                               : make_same_direction(seq);
  const std::vector<ControlSlice> ref_slices = discretize(ref_seq);
  const int n_rf = count_rf_slices(main_slices);

  const int n = config.ensemble_size;
  std::vector<std::array<Complex, 4>> samples(n);  // main0, main1, ref0, ref1
  parallel_for_samples(n, config.threads, [&](int i) {
    const SampleDraw d = draw_sample(config, std::uint64_t(i), n_rf);
    for (int m = 0; m < 2; ++m) {
      samples[i][m] = run_signal(main_slices, system, m, d.b1_scale, d.jitter_rad);
      samples[i][2 + m] = run_signal(ref_slices, system, m, d.b1_scale, d.jitter_rad);
    }
  });

  std::array<Complex, 4> mean{};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 4; ++k) mean[k] += samples[i][k];
  for (auto& z : mean) z /= double(n);

  PhaseResult r;
  double phi[2];
  bool undef[2];
  for (int m = 0; m < 2; ++m) {
    const double mag = std::abs(mean[m]);
    undef[m] = mag < 1e-12 || std::abs(mean[2 + m]) < 1e-12;
    phi[m] = undef[m] ? 0.0 : wrap_deg(arg_deg(mean[m]) - arg_deg(mean[2 + m]));
    if (!undef[m] && unwrap_hint_deg) phi[m] = unwrap_to_hint(phi[m], (*unwrap_hint_deg)[m]);
    (m == 0 ? r.mag0 : r.mag1) = mag;
  }
  r.phi0_deg = phi[0];
  r.phi1_deg = phi[1];
  r.gamma0_deg = phi[0] / 4.0;
  r.gamma1_deg = phi[1] / 4.0;
  r.controlled_deg = phi[0] - phi[1];
  r.undefined0 = undef[0];
  r.undefined1 = undef[1];
  return r;
}

std::vector<double> unwrap_phases(std::span<const double> wrapped_deg) {
  std::vector<double> out(wrapped_deg.begin(), wrapped_deg.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    out[i] += 360.0 * std::round((out[i - 1] - out[i]) / 360.0);
  return out;
}

std::vector<SweepRow> sweep_nu1(std::span<const double> nu1_grid, const SpinSystem& system,
                                const SequenceParams& params, const SimConfig& config) {
  if (nu1_grid.empty()) throw std::invalid_argument("nu1 grid must be non-empty");
  if (nu1_grid.front() != 0.0) throw std::invalid_argument("nu1 grid must start at 0");
  if (!std::is_sorted(nu1_grid.begin(), nu1_grid.end()))
    throw std::invalid_argument("nu1 grid must be sorted ascending");

  std::vector<SweepRow> rows(nu1_grid.size());
  for (std::size_t i = 0; i < nu1_grid.size(); ++i) {
    const double nu1 = nu1_grid[i];
    rows[i].nu1_hz = nu1;
    const Sequence seq = build_fig1(nu1, params.steps, params.step_dt_s);
    rows[i].result = measure_phases(seq, system, config);
    const auto analytic = analytic_line_phases_deg(system, nu1);
    rows[i].analytic_phi0_deg = analytic[0];
    rows[i].analytic_phi1_deg = analytic[1];
    rows[i].analytic_controlled_deg = analytic[0] - analytic[1];
  }

  // unwrap along the grid; the first point (nu1 = 0) has zero phase
  std::vector<double> phi0, phi1;
  for (const auto& row : rows) {
    phi0.push_back(row.result.phi0_deg);
    phi1.push_back(row.result.phi1_deg);
  }
  phi0 = unwrap_phases(phi0);
  phi1 = unwrap_phases(phi1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PhaseResult& r = rows[i].result;
    r.phi0_deg = phi0[i];
    r.phi1_deg = phi1[i];
    r.gamma0_deg = phi0[i] / 4.0;
    r.gamma1_deg = phi1[i] / 4.0;
    r.controlled_deg = phi0[i] - phi1[i];
  }
  return rows;
}

double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w > 180.0) w -= 360.0;
  if (w <= -180.0) w += 360.0;
  return w;
}

double circular_std_deg(std::span<const Complex> signals) {
  Complex sum{};
  int n = 0;
  for (Complex z : signals) {
    const double a = std::abs(z);
    if (a > 0.0) {
      sum += z / a;
      ++n;
    }
  }
  if (n == 0) return 0.0;
  const double r = std::min(std::abs(sum) / double(n), 1.0);
  if (r <= 1e-300) return rad2deg(kPi);  // fully dephased
  return rad2deg(std::sqrt(-2.0 * std::log(r)));
}

DephasingComparison dephasing_experiment(const SpinSystem& system, const SequenceParams& params,
                                         double sigma_rel, const SimConfig& config) {
  if (sigma_rel < 0.0) throw std::invalid_argument("sigma_rel must be >= 0");
  SimConfig cfg = config;
  cfg.b1.sigma_rel = sigma_rel;
  cfg.validate();

  const std::vector<ControlSlice> fig1 =
      discretize(build_fig1(params.nu1_hz, params.steps, params.step_dt_s));
  const std::vector<ControlSlice> naive =
      discretize(build_naive_block(params.nu1_hz, params.steps, params.step_dt_s));

  const int n = cfg.ensemble_size;
  std::vector<std::array<Complex, 4>> samples(n);  // fig1 x2, naive x2
  parallel_for_samples(n, cfg.threads, [&](int i) {
    const SampleDraw d = draw_sample(cfg, std::uint64_t(i), 0);
    for (int m = 0; m < 2; ++m) {
      samples[i][m] = run_signal(fig1, system, m, d.b1_scale, {});
      samples[i][2 + m] = run_signal(naive, system, m, d.b1_scale, {});
    }
  });

  DephasingComparison out;
  for (int m = 0; m < 2; ++m) {
    Complex fig1_sum{}, naive_sum{};
    std::vector<Complex> fig1_sig(n), naive_sig(n);
    for (int i = 0; i < n; ++i) {
      fig1_sum += samples[i][m];
      naive_sum += samples[i][2 + m];
      fig1_sig[i] = samples[i][m];
      naive_sig[i] = samples[i][2 + m];
    }
    out.fig1_mag[m] = std::abs(fig1_sum) / double(n);
    out.naive_mag[m] = std::abs(naive_sum) / double(n);
    out.fig1_phase_spread_deg[m] = circular_std_deg(fig1_sig);
    out.naive_phase_spread_deg[m] = circular_std_deg(naive_sig);
  }
  return out;
}

JitterStats jitter_robustness(const SpinSystem& system, const SequenceParams& params,
                              double sigma_phase_rad, int trials, std::uint64_t seed) {
  if (sigma_phase_rad < 0.0) throw std::invalid_argument("sigma_phase must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const std::vector<ControlSlice> fig1 =
      discretize(build_fig1(params.nu1_hz, params.steps, params.step_dt_s));
  const std::vector<ControlSlice> naive =
      discretize(build_naive_block(params.nu1_hz, params.steps, params.step_dt_s));
  const int n_rf = count_rf_slices(fig1);
  const auto hints = analytic_line_phases_deg(system, params.nu1_hz);

  JitterStats stats;
  std::vector<Complex> naive_signals(trials);
  std::vector<Complex> controlled_dirs(trials);
  stats.controlled_deg.resize(trials);
  stats.geometric_controlled_deg.resize(trials);
  stats.solid_angle_sr.resize(trials);
  stats.path_phase_pred_deg.resize(trials);

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(sample_seed(seed, std::uint64_t(t)));
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> jitter(n_rf);
    for (double& j : jitter) j = sigma_phase_rad * n01(rng);

    double phi[2];
    for (int m = 0; m < 2; ++m) {
      const RunResult run = run_once(fig1, system, m, 1.0, jitter);
      phi[m] = wrap_deg(arg_deg(run.signal));
      phi[m] += 360.0 * std::round((hints[m] - phi[m]) / 360.0);
      // mean unsigned loop area over the two echo blocks
      double omega_sum = 0.0;
      int blocks = 0;
      for (const SpherePath& block : run.path.blocks) {
        if (block.size() < 3) continue;
        omega_sum += std::abs(solid_angle(block));
        ++blocks;
      }
      const double omega_mean = blocks > 0 ? omega_sum / blocks : 0.0;
      stats.solid_angle_sr[t][m] = omega_mean;
      // each line contributes 4 * Omega/2 across the two echo periods
      stats.path_phase_pred_deg[t][m] = rad2deg(2.0 * omega_mean);
    }
    stats.controlled_deg[t] = phi[0] - phi[1];
    stats.geometric_controlled_deg[t] =
        stats.path_phase_pred_deg[t][0] - stats.path_phase_pred_deg[t][1];
    controlled_dirs[t] = std::polar(1.0, deg2rad(stats.controlled_deg[t]));
    naive_signals[t] =
        run_once(naive, system, 0, 1.0, std::span<const double>(jitter).first(naive.size()))
            .signal;
  }

  double mean = 0.0;
  for (double c : stats.controlled_deg) mean += c;
  mean /= trials;
  stats.mean_controlled_deg = mean;
  stats.std_controlled_deg = circular_std_deg(controlled_dirs);
  double gmean = 0.0, gvar = 0.0;
  for (double g : stats.geometric_controlled_deg) gmean += g;
  gmean /= trials;
  for (double g : stats.geometric_controlled_deg) gvar += (g - gmean) * (g - gmean);
  stats.geometric_std_deg = trials > 1 ? std::sqrt(gvar / (trials - 1)) : 0.0;
  stats.naive_phase_std_deg = circular_std_deg(naive_signals);
  return stats;
}

std::vector<RateRow> sweep_rate_study(const SpinSystem& system, const SequenceParams& params,
                                      std::span<const double> step_dts) {
  std::vector<RateRow> rows;
  for (double dt : step_dts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step durations must be > 0");
    const Sequence seq = build_fig1(params.nu1_hz, params.steps, dt);
    SimConfig cfg;
    const auto hints = analytic_line_phases_deg(system, params.nu1_hz);
    const PhaseResult r = measure_phases(seq, system, cfg, hints);
    RateRow row;
    row.step_dt_s = dt;
    row.min_q = adiabaticity_report(seq, system).overall_min_q();
    // errors on the gamma (= phase/4) scale, the quantity the line plots use
    row.abs_phase_error_deg[0] = std::abs(r.phi0_deg - hints[0]) / 4.0;
    row.abs_phase_error_deg[1] = std::abs(r.phi1_deg - hints[1]) / 4.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace berrysim
