#pragma once

#include <limits>
#include <vector>

#include "berrysim/sequence.hpp"

// Adiabaticity parameter for a discretized sequence:
//   Q = omega_eff * dt / angle(b_k, b_{k+1})
// with omega_eff = 2*pi*sqrt(offset^2 + nu1^2) rad/s evaluated on slice k and
// b the effective-field direction. Static steps report Q = +inf.

namespace berrysim {

inline constexpr double kQInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultQThreshold = 10.0;

struct SegmentQ {
  int segment_index = -1;
  double min_q[2] = {kQInfinity, kQInfinity};      // per S manifold
  int min_q_slice[2] = {-1, -1};                   // slice index of the minimum
  double theta_start_rad[2] = {0.0, 0.0};          // field polar angle at entry
  double theta_end_rad[2] = {0.0, 0.0};            // and at exit
  bool flagged = false;                            // min Q below threshold
};

struct AdiabaticityReport {
  std::vector<SegmentQ> segments;
  double min_q[2] = {kQInfinity, kQInfinity};
  double threshold = kDefaultQThreshold;

  double overall_min_q() const { return std::min(min_q[0], min_q[1]); }
  bool any_flagged() const { return overall_min_q() < threshold; }
};

AdiabaticityReport adiabaticity_report(const Sequence& seq, const SpinSystem& system,
                                       double threshold = kDefaultQThreshold);

// Effective-field direction for one manifold; +z when the field vanishes.
Eigen::Vector3d field_direction(double offset_hz, double nu1_hz, double phase_rad);

}  // namespace berrysim
