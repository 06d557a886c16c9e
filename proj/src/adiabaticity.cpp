#include "berrysim/adiabaticity.hpp"

#include <algorithm>
#include <cmath>

namespace berrysim {

Eigen::Vector3d field_direction(double offset_hz, double nu1_hz, double phase_rad) {
  Eigen::Vector3d v(nu1_hz * std::cos(phase_rad), nu1_hz * std::sin(phase_rad), offset_hz);
  const double n = v.norm();
  if (n == 0.0) return Eigen::Vector3d::UnitZ();
  return v / n;
}

AdiabaticityReport adiabaticity_report(const Sequence& seq, const SpinSystem& system,
                                       double threshold) {
  AdiabaticityReport report;
  report.threshold = threshold;
  const std::vector<ControlSlice> slices = discretize(seq);

  std::vector<SegmentQ> per_segment(seq.segments.size());
  for (std::size_t i = 0; i < per_segment.size(); ++i) per_segment[i].segment_index = int(i);

  for (int m = 0; m < 2; ++m) {
    const double offset = manifold_offset_hz(system, m);
    // before any RF the effective field is the static offset, along +z
    Eigen::Vector3d prev = Eigen::Vector3d::UnitZ();
    std::vector<bool> entered(seq.segments.size(), false);
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const ControlSlice& c = slices[i];
      if (c.is_pulse_marker) continue;  // instantaneous, does not move the field
      const Eigen::Vector3d dir = field_direction(offset, c.nu1_hz, c.phase_rad);
      SegmentQ& sq = per_segment[c.segment_index];
      if (!entered[c.segment_index]) {
        sq.theta_start_rad[m] = std::acos(std::clamp(prev.z(), -1.0, 1.0));
        entered[c.segment_index] = true;
      }
      sq.theta_end_rad[m] = std::acos(std::clamp(dir.z(), -1.0, 1.0));
      const double angle = std::atan2(prev.cross(dir).norm(), prev.dot(dir));
      const double omega_eff = kTwoPi * std::hypot(offset, c.nu1_hz);
      if (angle > 1e-14 && omega_eff > 0.0) {
        const double q = omega_eff * c.dt_s / angle;
        if (q < sq.min_q[m]) {
          sq.min_q[m] = q;
          sq.min_q_slice[m] = int(i);
        }
        if (q < report.min_q[m]) report.min_q[m] = q;
      }
      prev = dir;
    }
  }

  for (SegmentQ& sq : per_segment) {
    sq.flagged = std::min(sq.min_q[0], sq.min_q[1]) < threshold;
    report.segments.push_back(sq);
  }
  return report;
}

}  // namespace berrysim
