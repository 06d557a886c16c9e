#pragma once

#include <Eigen/Dense>
#include <complex>

// Two weakly coupled spin-1/2 nuclei I and S on the basis |I>⊗|S>
// with ordering |00>, |01>, |10>, |11> and Iz|0> = +1/2 |0>.
// Hamiltonians are in rad/s; user-facing frequencies are in Hz.

namespace berrysim {

using Complex = std::complex<double>;
using StateVec = Eigen::Vector4cd;
using Operator = Eigen::Matrix4cd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Offsets and coupling of the two I-spin transitions, all in Hz.
struct SpinSystem {
  double delta_hz;    // offset of the I transition with S in |0>
  double j_hz;        // scalar coupling J
  double delta_s_hz;  // S offset in its own rotating frame

  SpinSystem(double delta, double j, double delta_s = 0.0);
};

// RF amplitude (nutation frequency nu1, Hz) and phase.
struct RFControl {
  double nu1_hz;
  double phase_rad;

  RFControl(double nu1, double phase);
};

enum class SpinTarget { I, S };

// Product operators (4x4, dimensionless, spin-1/2 normalization).
Operator op_identity();
Operator op_ix();
Operator op_iy();
Operator op_iz();
Operator op_sx();
Operator op_sy();
Operator op_sz();
Operator op_2izsz();

// Resonance offset of the I transition in the given S manifold:
// delta for S=|0>, delta+J for S=|1>.
double manifold_offset_hz(const SpinSystem& sys, int s_manifold);

// Rotating-frame Hamiltonian, rad/s:
//   H = 2*pi*[ (delta+J/2) Iz + delta_S Sz - (J/2) 2IzSz
//              + nu1 (cos(phi) Ix + sin(phi) Iy) ]
// Block-diagonal in S; the S=|0> I-block sees offset delta, S=|1> sees delta+J.
Operator build_hamiltonian(const SpinSystem& sys, const RFControl& rf);

// exp(-i (f.sigma) dt / 2) for a field vector f in rad/s; exact closed form.
Matrix2 su2_propagator(const Eigen::Vector3d& field_rad_s, double dt_s);

// Propagator for one piecewise-constant control slice, assembled from the
// two S-manifold SU(2) blocks of build_hamiltonian. Exact.
Operator slice_propagator(const SpinSystem& sys, const RFControl& rf, double dt_s);

// Ideal instantaneous rotation on one spin, identity on the other:
//   exp(-i angle (cos(axis) Tx + sin(axis) Ty)).
Operator hard_pulse(SpinTarget target, double angle_deg, double axis_phase_deg);

// 2 <psi| P_k I+ P_k |psi> with I+ = Ix + i Iy; equals 1+0i immediately after
// an ideal 90y pulse on I from |0>_I ⊗ |k>_S.
Complex transverse_signal(const StateVec& state, int s_manifold);

// Basis state |i>_I ⊗ |s>_S.
StateVec basis_state(int i_state, int s_state);

}  // namespace berrysim
