#include "berrysim/spin_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace berrysim {

namespace {

const Complex kI(0.0, 1.0);

Matrix2 sigma_x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2 sigma_y() {
  Matrix2 m;
  m << 0, -kI, kI, 0;
  return m;
}

Matrix2 sigma_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

Operator kron(const Matrix2& a, const Matrix2& b) {
  Operator out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

SpinSystem::SpinSystem(double delta, double j, double delta_s)
    : delta_hz(delta), j_hz(j), delta_s_hz(delta_s) {
  require_finite(delta, "delta_hz");
  require_finite(j, "j_hz");
  require_finite(delta_s, "delta_s_hz");
  if (j < 0.0) throw std::invalid_argument("j_hz must be >= 0");
}

RFControl::RFControl(double nu1, double phase) : nu1_hz(nu1), phase_rad(phase) {
  require_finite(nu1, "nu1_hz");
  require_finite(phase, "phase_rad");
  if (nu1 < 0.0) throw std::invalid_argument("nu1_hz must be >= 0");
}

Operator op_identity() { return Operator::Identity(); }
Operator op_ix() { return kron(0.5 * sigma_x(), Matrix2::Identity()); }
Operator op_iy() { return kron(0.5 * sigma_y(), Matrix2::Identity()); }
Operator op_iz() { return kron(0.5 * sigma_z(), Matrix2::Identity()); }
Operator op_sx() { return kron(Matrix2::Identity(), 0.5 * sigma_x()); }
Operator op_sy() { return kron(Matrix2::Identity(), 0.5 * sigma_y()); }
Operator op_sz() { return kron(Matrix2::Identity(), 0.5 * sigma_z()); }
Operator op_2izsz() { return 2.0 * (op_iz() * op_sz()); }

double manifold_offset_hz(const SpinSystem& sys, int s_manifold) {
  if (s_manifold != 0 && s_manifold != 1) throw std::invalid_argument("s_manifold must be 0 or 1");
  return s_manifold == 0 ? sys.delta_hz : sys.delta_hz + sys.j_hz;
}

Operator build_hamiltonian(const SpinSystem& sys, const RFControl& rf) {
  return kTwoPi * ((sys.delta_hz + 0.5 * sys.j_hz) * op_iz() + sys.delta_s_hz * op_sz() -
                   0.5 * sys.j_hz * op_2izsz() +
                   rf.nu1_hz * (std::cos(rf.phase_rad) * op_ix() + std::sin(rf.phase_rad) * op_iy()));
}

Matrix2 su2_propagator(const Eigen::Vector3d& field_rad_s, double dt_s) {
  if (dt_s < 0.0) throw std::invalid_argument("dt_s must be >= 0");
  const double mag = field_rad_s.norm();
  const double half = 0.5 * mag * dt_s;
  if (half == 0.0) return Matrix2::Identity();
  const Eigen::Vector3d n = field_rad_s / mag;
  const double c = std::cos(half);
  const double s = std::sin(half);
  Matrix2 u;
  u(0, 0) = Complex(c, -s * n.z());
  u(0, 1) = Complex(-s * n.y(), -s * n.x());
  u(1, 0) = Complex(s * n.y(), -s * n.x());
  u(1, 1) = Complex(c, s * n.z());
  return u;
}

Operator slice_propagator(const SpinSystem& sys, const RFControl& rf, double dt_s) {
  Operator u = Operator::Zero();
  const double cx = rf.nu1_hz * std::cos(rf.phase_rad);
  const double cy = rf.nu1_hz * std::sin(rf.phase_rad);
  for (int k = 0; k < 2; ++k) {
    const double offset = manifold_offset_hz(sys, k);
    const Eigen::Vector3d field = kTwoPi * Eigen::Vector3d(cx, cy, offset);
    const double sz = (k == 0) ? 0.5 : -0.5;  // S=|0> has Sz=+1/2
    const Complex scalar = std::exp(-kI * kTwoPi * sys.delta_s_hz * sz * dt_s);
    const Matrix2 block = scalar * su2_propagator(field, dt_s);
    // I-basis indices {k, 2+k} within this S manifold
    u(k, k) = block(0, 0);
    u(k, 2 + k) = block(0, 1);
    u(2 + k, k) = block(1, 0);
    u(2 + k, 2 + k) = block(1, 1);
  }
  return u;
}

Operator hard_pulse(SpinTarget target, double angle_deg, double axis_phase_deg) {
  const double angle = deg2rad(angle_deg);
  const double axis = deg2rad(axis_phase_deg);
  if (!std::isfinite(angle)) throw std::invalid_argument("angle must be finite");
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  // exp(-i angle (cos(axis) Tx + sin(axis) Ty)), T = sigma/2 on the target
  Matrix2 r;
  r(0, 0) = Complex(c, 0.0);
  r(0, 1) = -kI * s * std::exp(-kI * axis);
  r(1, 0) = -kI * s * std::exp(kI * axis);
  r(1, 1) = Complex(c, 0.0);
  return target == SpinTarget::I ? kron(r, Matrix2::Identity()) : kron(Matrix2::Identity(), r);
}

Complex transverse_signal(const StateVec& state, int s_manifold) {
  if (s_manifold != 0 && s_manifold != 1) throw std::invalid_argument("s_manifold must be 0 or 1");
  // I+ = |I0><I1| within the manifold; amplitudes at indices k (I=0) and 2+k (I=1)
  return 2.0 * std::conj(state(s_manifold)) * state(2 + s_manifold);
}

StateVec basis_state(int i_state, int s_state) {
  if ((i_state != 0 && i_state != 1) || (s_state != 0 && s_state != 1))
    throw std::invalid_argument("basis_state indices must be 0 or 1");
  StateVec v = StateVec::Zero();
  v(2 * i_state + s_state) = 1.0;
  return v;
}

}  // namespace berrysim
