#include "berrysim/sequence.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace berrysim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double segment_duration(const Segment& seg) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AmplitudeSweep> || std::is_same_v<T, PhaseSweep>)
          return s.steps * s.step_dt_s;
        else if constexpr (std::is_same_v<T, HardPulseSeg>)
          return s.finite_nu1_hz ? std::abs(s.angle_deg) / 360.0 / *s.finite_nu1_hz : 0.0;
        else
          return s.dt_s;
      },
      seg);
}

// shortest round-trip double
std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

void validate_segment(const Segment& seg) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AmplitudeSweep>) {
          require(s.steps >= 1, "sweep steps must be >= 1");
          require(s.step_dt_s >= 0.0 && std::isfinite(s.step_dt_s), "step duration must be >= 0");
          require(s.nu1_max_hz >= 0.0 && std::isfinite(s.nu1_max_hz), "amplitude must be >= 0");
        } else if constexpr (std::is_same_v<T, PhaseSweep>) {
          require(s.steps >= 1, "sweep steps must be >= 1");
          require(s.step_dt_s >= 0.0 && std::isfinite(s.step_dt_s), "step duration must be >= 0");
          require(s.nu1_hz >= 0.0 && std::isfinite(s.nu1_hz), "amplitude must be >= 0");
        } else if constexpr (std::is_same_v<T, HardPulseSeg>) {
          require(std::isfinite(s.angle_deg) && std::isfinite(s.axis_phase_deg),
                  "pulse angles must be finite");
          if (s.finite_nu1_hz) require(*s.finite_nu1_hz > 0.0, "finite pulse nu1 must be > 0");
        } else {
          require(s.dt_s >= 0.0 && std::isfinite(s.dt_s), "delay must be >= 0");
        }
      },
      seg);
}

Sequence build_fig1(double nu1_hz, int steps, double step_dt_s) {
  require(steps >= 1, "steps must be >= 1");
  require(step_dt_s > 0.0, "step_dt_s must be > 0");
  require(nu1_hz >= 0.0, "nu1_hz must be >= 0");
  Sequence seq;
  seq.label = "fig1";
  const HardPulseSeg echo_pulse{SpinTarget::I, 180.0, 90.0, std::nullopt};
  seq.segments = {
      AmplitudeSweep{SweepDirection::Up, nu1_hz, steps, step_dt_s, 0.0},
      PhaseSweep{SweepRotation::CW, nu1_hz, steps, step_dt_s},
      AmplitudeSweep{SweepDirection::Down, nu1_hz, steps, step_dt_s, 0.0},
      echo_pulse,
      AmplitudeSweep{SweepDirection::Up, nu1_hz, steps, step_dt_s, 0.0},
      PhaseSweep{SweepRotation::CCW, nu1_hz, steps, step_dt_s},
      AmplitudeSweep{SweepDirection::Down, nu1_hz, steps, step_dt_s, 0.0},
      echo_pulse,
  };
  return seq;
}

Sequence build_reference(ReferenceKind kind, double nu1_hz, int steps, double step_dt_s) {
  if (kind == ReferenceKind::Bare90) {
    Sequence seq;
    seq.label = "bare90";
    return seq;  // the engine's preparation pulse is the whole reference run
  }
  Sequence seq = make_same_direction(build_fig1(nu1_hz, steps, step_dt_s));
  seq.label = "same_direction";
  return seq;
}

Sequence build_naive_block(double nu1_hz, int steps, double step_dt_s) {
  require(steps >= 1, "steps must be >= 1");
  require(step_dt_s > 0.0, "step_dt_s must be > 0");
  Sequence seq;
  seq.label = "naive_block";
  seq.segments = {
      AmplitudeSweep{SweepDirection::Up, nu1_hz, steps, step_dt_s, 0.0},
      PhaseSweep{SweepRotation::CW, nu1_hz, steps, step_dt_s},
      AmplitudeSweep{SweepDirection::Down, nu1_hz, steps, step_dt_s, 0.0},
  };
  return seq;
}

Sequence make_same_direction(const Sequence& seq) {
  Sequence out = seq;
  std::optional<SweepRotation> first;
  for (auto& seg : out.segments) {
    if (auto* ps = std::get_if<PhaseSweep>(&seg)) {
      if (!first) first = ps->rotation;
      ps->rotation = *first;
    }
  }
  return out;
}

Sequence with_s_echo(const Sequence& seq) {
  const double half = 0.5 * total_duration_s(seq);
  Sequence out;
  out.label = seq.label.empty() ? "s_echo" : seq.label + "_s_echo";
  const HardPulseSeg s_pulse{SpinTarget::S, 180.0, 90.0, std::nullopt};
  double t = 0.0;
  bool inserted = false;
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    out.segments.push_back(seq.segments[i]);
    t += segment_duration(seq.segments[i]);
    if (!inserted && t >= half - 1e-15) {
      // advance past zero-duration segments at the midpoint
      while (i + 1 < seq.segments.size() && segment_duration(seq.segments[i + 1]) == 0.0)
        out.segments.push_back(seq.segments[++i]);
      out.segments.push_back(s_pulse);
      inserted = true;
    }
  }
  out.segments.push_back(s_pulse);
  return out;
}

std::vector<ControlSlice> discretize(const Sequence& seq) {
  std::vector<ControlSlice> slices;
  for (std::size_t idx = 0; idx < seq.segments.size(); ++idx) {
    const Segment& seg = seq.segments[idx];
    validate_segment(seg);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, AmplitudeSweep>) {
            if (s.step_dt_s == 0.0) return;
            const int n = s.steps;
            for (int k = 1; k <= n; ++k) {
              const double frac =
                  s.direction == SweepDirection::Up ? double(k) / n : double(n - k) / n;
              ControlSlice c;
              c.nu1_hz = s.nu1_max_hz * frac;
              c.phase_rad = s.rf_phase_rad;
              c.dt_s = s.step_dt_s;
              c.segment_index = int(idx);
              slices.push_back(c);
            }
          } else if constexpr (std::is_same_v<T, PhaseSweep>) {
            if (s.step_dt_s == 0.0) return;
            const int n = s.steps;
            for (int k = 1; k <= n; ++k) {
              const double frac =
                  s.rotation == SweepRotation::CW ? double(k) / n : double(n - k) / n;
              ControlSlice c;
              c.nu1_hz = s.nu1_hz;
              c.phase_rad = kTwoPi * frac;
              c.dt_s = s.step_dt_s;
              c.segment_index = int(idx);
              slices.push_back(c);
            }
          } else if constexpr (std::is_same_v<T, HardPulseSeg>) {
            if (s.finite_nu1_hz) {
              ControlSlice c;
              c.nu1_hz = *s.finite_nu1_hz;
              c.phase_rad = deg2rad(s.axis_phase_deg);
              c.dt_s = std::abs(s.angle_deg) / 360.0 / *s.finite_nu1_hz;
              c.segment_index = int(idx);
              if (c.dt_s > 0.0) slices.push_back(c);
            } else {
              ControlSlice c;
              c.is_pulse_marker = true;
              c.pulse = s;
              c.segment_index = int(idx);
              slices.push_back(c);
            }
          } else {
            if (s.dt_s == 0.0) return;
            ControlSlice c;
            c.nu1_hz = 0.0;
            c.phase_rad = 0.0;
            c.dt_s = s.dt_s;
            c.segment_index = int(idx);
            slices.push_back(c);
          }
        },
        seg);
  }
  return slices;
}

double total_duration_s(const Sequence& seq) {
  double t = 0.0;
  for (const auto& seg : seq.segments) t += segment_duration(seg);
  return t;
}

std::string format_sequence(const Sequence& seq) {
  std::string out;
  if (!seq.label.empty()) out += "# " + seq.label + "\n";
  for (const auto& seg : seq.segments) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, AmplitudeSweep>) {
            out += "ampsweep ";
            out += s.direction == SweepDirection::Up ? "up " : "down ";
            out += fmt_double(s.nu1_max_hz) + "hz " + std::to_string(s.steps) + " " +
                   fmt_double(s.step_dt_s) + "s";
            if (s.rf_phase_rad != 0.0) out += " phase " + fmt_double(rad2deg(s.rf_phase_rad)) + "deg";
          } else if constexpr (std::is_same_v<T, PhaseSweep>) {
            out += "phasesweep ";
            out += s.rotation == SweepRotation::CW ? "cw " : "ccw ";
            out += fmt_double(s.nu1_hz) + "hz " + std::to_string(s.steps) + " " +
                   fmt_double(s.step_dt_s) + "s";
          } else if constexpr (std::is_same_v<T, HardPulseSeg>) {
            out += "pulse ";
            out += s.target == SpinTarget::I ? "I " : "S ";
            out += fmt_double(s.angle_deg) + "deg " + fmt_double(s.axis_phase_deg) + "deg ";
            out += s.finite_nu1_hz ? "nu1 " + fmt_double(*s.finite_nu1_hz) + "hz" : "ideal";
          } else {
            out += "delay " + fmt_double(s.dt_s) + "s";
          }
          out += "\n";
        },
        seg);
  }
  return out;
}

}  // namespace berrysim
