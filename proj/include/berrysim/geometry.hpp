#pragma once

#include <span>
#include <vector>

#include "berrysim/sequence.hpp"

// Closed-form Berry/dynamic phase formulas, solid angles of recorded field
// paths, and the controlled-pi gate parameter optimizer.
// Degrees at API boundaries where noted; radians internally.

namespace berrysim {

enum class Branch { Aligned, Anti };

// Time-ordered effective-field directions on the unit sphere (closed path,
// first = last implied).
using SpherePath = std::vector<Eigen::Vector3d>;

struct GateOptimum {
  double delta_over_j = 0.0;
  double nu1_over_j = 0.0;
  double delta_hz = 0.0;
  double nu1_hz = 0.0;
  double achieved_controlled_deg = 0.0;
  double residual_phase = 0.0;        // controlled-phase equation residual (rad scale)
  double residual_stationarity = 0.0; // d(bracket)/d(nu1/J) residual
  double d_controlled_d_nu1 = 0.0;    // deg per Hz at the optimum
  double d_controlled_d_delta = 0.0;  // deg per Hz at the optimum
};

// +-pi(1-cos(theta)); Aligned takes the lower-eigenstate (negative) branch.
double berry_phase_cone(double theta_rad, Branch branch);

// atan2(nu1, offset); throws std::domain_error when both are zero.
double cone_angle(double offset_hz, double nu1_hz);

// pi * [ (delta+J)/sqrt((delta+J)^2+nu1^2) - delta/sqrt(delta^2+nu1^2) ],
// the magnitude branch of the differential Berry phase, in rad.
double differential_phase(double delta_hz, double j_hz, double nu1_hz);

// 4*|differential_phase| in degrees: the controlled phase seen in the echo
// experiment, each line contributing twice with opposite state phases.
double observed_controlled_phase(double delta_hz, double j_hz, double nu1_hz);

// Per-line analytic observed phase 4*pi*(1-cos(theta_k)) in degrees.
double observed_line_phase_deg(double offset_hz, double nu1_hz);

// Signed spherical area enclosed by the closed geodesic polygon, summed as a
// fan of signed triangle excesses, normalized to (-4pi, 4pi).
// Throws std::domain_error on antipodal consecutive points.
double solid_angle(const SpherePath& path);

// -+ 1/2 * sum 2*pi*sqrt(offset^2 + nu1^2) * dt over the slices (eigenenergy
// integral); Aligned gives the negative sign.
double dynamic_phase_adiabatic(std::span<const ControlSlice> slices, double offset_hz,
                               Branch branch);

// Solves { observed_controlled_phase = target, d/d(nu1) = 0 } for (delta, nu1)
// at fixed J by damped Newton with a differenced Jacobian and a bisection
// fallback. Throws std::domain_error for j_hz <= 0, std::runtime_error on
// non-convergence.
GateOptimum optimize_pi_gate(double j_hz, double target_deg = 180.0);

}  // namespace berrysim
