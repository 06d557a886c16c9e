#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "berrysim/adiabaticity.hpp"
#include "berrysim/geometry.hpp"
#include "berrysim/sequence.hpp"
#include "berrysim/spin_ops.hpp"

// Executes sequences on the two-spin system, extracts per-manifold signal
// phases against a reference run, and runs the ensemble experiments.
// Runs are pure given (inputs, seed); the ensemble is a parallel map with an
// ordered reduction, so results are independent of the worker count.

namespace berrysim {

struct B1Model {
  double sigma_rel = 0.0;              // gaussian relative spread of nu1
  std::vector<double> explicit_scales; // overrides the gaussian when non-empty
};

struct JitterModel {
  double sigma_rad = 0.0;  // zero-mean per-step RF phase jitter
};

struct SimConfig {
  B1Model b1{};
  JitterModel jitter{};
  int ensemble_size = 1;
  std::uint64_t rng_seed = 12345;
  ReferenceKind reference = ReferenceKind::Bare90;
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
};

struct PhaseResult {
  double phi0_deg = 0.0;        // per-line signal phase minus reference, unwrapped
  double phi1_deg = 0.0;
  double gamma0_deg = 0.0;      // phi/4, the per-line Berry phase
  double gamma1_deg = 0.0;
  double controlled_deg = 0.0;  // phi0 - phi1
  double mag0 = 0.0;            // ensemble-mean signal magnitudes
  double mag1 = 0.0;
  bool undefined0 = false;      // complete dephasing, phase meaningless
  bool undefined1 = false;
};

// Effective-field directions actually applied during one run, split into
// closed loops at hard-pulse markers.
struct FieldPathRecord {
  std::vector<SpherePath> blocks;
};

struct RunResult {
  Complex signal{};
  FieldPathRecord path;
};

// Propagates |I=0>|S=k> through an ideal 90y on I and every slice, with nu1
// scaled by b1_scale and each RF phase offset by the matching jitter entry.
RunResult run_once(std::span<const ControlSlice> slices, const SpinSystem& system, int s_manifold,
                   double b1_scale = 1.0, std::span<const double> jitter_rad = {});

// Full sequence propagator (no preparation pulse); used for the S-echo check.
Operator sequence_propagator(std::span<const ControlSlice> slices, const SpinSystem& system,
                             double b1_scale = 1.0);

// Per-sample deterministic seed, identical for serial and parallel execution.
std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t sample_index);

// Ensemble measurement of both lines against the configured reference.
// Phases are principal values in (-180, 180] unless an unwrap hint (expected
// phase in degrees per line, e.g. the adiabatic analytic value) selects the
// 360-degree branch.
PhaseResult measure_phases(const Sequence& seq, const SpinSystem& system, const SimConfig& config,
                           std::optional<std::array<double, 2>> unwrap_hint_deg = std::nullopt);

// Analytic per-line observed phases 4*pi*(1-cos theta_k), degrees.
std::array<double, 2> analytic_line_phases_deg(const SpinSystem& system, double nu1_hz);

struct SweepRow {
  double nu1_hz = 0.0;
  PhaseResult result;
  double analytic_phi0_deg = 0.0;
  double analytic_phi1_deg = 0.0;
  double analytic_controlled_deg = 0.0;
};

struct SequenceParams {
  double nu1_hz = 441.8;
  int steps = 200;
  double step_dt_s = 100e-6;
};

// One fig-1 measurement per grid point, phases unwrapped along the grid.
std::vector<SweepRow> sweep_nu1(std::span<const double> nu1_grid, const SpinSystem& system,
                                const SequenceParams& params, const SimConfig& config);

// First element unchanged; each subsequent element shifted by multiples of
// 360 to minimize the step. Degrees.
std::vector<double> unwrap_phases(std::span<const double> wrapped_deg);

struct DephasingComparison {
  double fig1_mag[2] = {0.0, 0.0};
  double naive_mag[2] = {0.0, 0.0};
  double fig1_phase_spread_deg[2] = {0.0, 0.0};  // circular std over the ensemble
  double naive_phase_spread_deg[2] = {0.0, 0.0};
};

// Same B1-scale ensemble through the unrefocused block and the full fig-1
// sequence; the echo refocuses the per-member dynamic phase.
DephasingComparison dephasing_experiment(const SpinSystem& system, const SequenceParams& params,
                                         double sigma_rel, const SimConfig& config);

struct JitterStats {
  double mean_controlled_deg = 0.0;
  double std_controlled_deg = 0.0;        // circular std over trials
  double geometric_std_deg = 0.0;         // std of the path-area controlled phase
  double naive_phase_std_deg = 0.0;       // circular std of the naive-block phase
  std::vector<double> controlled_deg;     // per trial, from the simulated signals
  std::vector<double> geometric_controlled_deg;            // per trial, from the path areas
  std::vector<std::array<double, 2>> solid_angle_sr;       // per trial, per line
  std::vector<std::array<double, 2>> path_phase_pred_deg;  // 4*Omega/2 per line
};

// Zero-mean per-step RF phase jitter; the recorded paths feed the solid-angle
// oracle.
JitterStats jitter_robustness(const SpinSystem& system, const SequenceParams& params,
                              double sigma_phase_rad, int trials, std::uint64_t seed);

struct RateRow {
  double step_dt_s = 0.0;
  double min_q = 0.0;
  double abs_phase_error_deg[2] = {0.0, 0.0};  // per-line |simulated - analytic| / 4 (gamma scale)
};

std::vector<RateRow> sweep_rate_study(const SpinSystem& system, const SequenceParams& params,
                                      std::span<const double> step_dts);

double wrap_deg(double deg);  // into (-180, 180]

// sqrt(-2 ln R) of the phase distribution, in degrees; robust to wrapping.
double circular_std_deg(std::span<const Complex> signals);

}  // namespace berrysim
