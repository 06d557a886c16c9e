#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "berrysim/spin_ops.hpp"

// Typed pulse-sequence representation and compilation to piecewise-constant
// control slices. Swept quantities use the endpoint convention: step k of n
// carries the value at fraction k/n of the ramp.

namespace berrysim {

enum class SweepDirection { Up, Down };
enum class SweepRotation { CW, CCW };  // cw: phi 0 -> 2pi, ccw: 2pi -> 0

struct AmplitudeSweep {
  SweepDirection direction = SweepDirection::Up;
  double nu1_max_hz = 0.0;
  int steps = 1;
  double step_dt_s = 0.0;
  double rf_phase_rad = 0.0;
};

struct PhaseSweep {
  SweepRotation rotation = SweepRotation::CW;
  double nu1_hz = 0.0;
  int steps = 1;
  double step_dt_s = 0.0;
};

struct HardPulseSeg {
  SpinTarget target = SpinTarget::I;
  double angle_deg = 0.0;
  double axis_phase_deg = 0.0;
  std::optional<double> finite_nu1_hz;  // empty = ideal (instantaneous)
};

struct DelaySeg {
  double dt_s = 0.0;
};

using Segment = std::variant<AmplitudeSweep, PhaseSweep, HardPulseSeg, DelaySeg>;

struct Sequence {
  std::vector<Segment> segments;
  std::string label;
};

// One unit of integrator work: an RF slice, or an ideal-pulse marker.
struct ControlSlice {
  bool is_pulse_marker = false;
  // RF slice fields
  double nu1_hz = 0.0;
  double phase_rad = 0.0;
  double dt_s = 0.0;
  // marker payload
  HardPulseSeg pulse{};
  int segment_index = -1;  // index of the originating segment
};

void validate_segment(const Segment& seg);  // throws std::invalid_argument

// Fig.-1 conditional Berry phase sequence:
//   A_x, Phi_x, Abar_x, 180y(I), A_x, Phibar_x, Abar_x, 180y(I)
Sequence build_fig1(double nu1_hz, int steps, double step_dt_s);

enum class ReferenceKind { Bare90, SameDirection };

// Reference sequence: bare90 is empty (the engine's 90y preparation pulse is
// the whole experiment); same_direction is build_fig1 with the second phase
// sweep also cw, so the geometric phases cancel.
Sequence build_reference(ReferenceKind kind, double nu1_hz = 0.0, int steps = 1,
                         double step_dt_s = 0.0);

// Single unrefocused block A_x, Phi_x, Abar_x.
Sequence build_naive_block(double nu1_hz, int steps, double step_dt_s);

// Copy with every PhaseSweep forced to the rotation of the first one.
Sequence make_same_direction(const Sequence& seq);

// Copy with 180 pulses on S inserted after the segment closest to half the
// total duration and at the end, cancelling delta_S evolution phases.
Sequence with_s_echo(const Sequence& seq);

std::vector<ControlSlice> discretize(const Sequence& seq);

double total_duration_s(const Sequence& seq);

// Canonical text form, reparseable by parse_sequence.
std::string format_sequence(const Sequence& seq);

}  // namespace berrysim
