#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "berrysim/spin_ops.hpp"

using namespace berrysim;

namespace {

const Complex kI{0.0, 1.0};

// reference exponential: 12-term Taylor series of exp(-i H dt)
Operator series_exponential(const Operator& h, double dt) {
  const Operator a = -kI * dt * h;
  Operator term = Operator::Identity();
  Operator sum = Operator::Identity();
  for (int k = 1; k <= 12; ++k) {
    term = (term * a) / double(k);
    sum += term;
  }
  return sum;
}

double max_abs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("product operators satisfy the spin-1/2 algebra") {
  CHECK(max_abs(commutator(op_ix(), op_iy()) - kI * op_iz()) < 1e-14);
  CHECK(max_abs(commutator(op_iy(), op_iz()) - kI * op_ix()) < 1e-14);
  CHECK(max_abs(commutator(op_iz(), op_ix()) - kI * op_iy()) < 1e-14);
  CHECK(max_abs(commutator(op_sx(), op_sy()) - kI * op_sz()) < 1e-14);
  CHECK(max_abs(commutator(op_sy(), op_sz()) - kI * op_sx()) < 1e-14);
  CHECK(max_abs(commutator(op_sz(), op_sx()) - kI * op_sy()) < 1e-14);
  const Operator is[] = {op_ix(), op_iy(), op_iz()};
  const Operator ss[] = {op_sx(), op_sy(), op_sz()};
  for (const auto& a : is)
    for (const auto& b : ss) CHECK(max_abs(commutator(a, b)) < 1e-14);
  CHECK(max_abs(op_2izsz() - 2.0 * op_iz() * op_sz()) < 1e-14);
}

TEST_CASE("build_hamiltonian special cases") {
  SUBCASE("all fields off gives the zero operator") {
    const Operator h = build_hamiltonian(SpinSystem(0, 0), RFControl(0, 0));
    CHECK(max_abs(h) == 0.0);
  }
  SUBCASE("paper offsets: I gap in the S=|1> manifold is 2*pi*(delta+J)") {
    const Operator h = build_hamiltonian(SpinSystem(221.3, 209.2), RFControl(0, 0));
    // S=|1> manifold lives on indices {1, 3}
    const double gap = std::real(h(1, 1) - h(3, 3));
    CHECK(gap == doctest::Approx(kTwoPi * 430.5).epsilon(1e-12));
    // and the S=|0> manifold (indices {0, 2}) sees delta
    CHECK(std::real(h(0, 0) - h(2, 2)) == doctest::Approx(kTwoPi * 221.3).epsilon(1e-12));
  }
  SUBCASE("phase pi/2 selects the y axis") {
    const Operator h = build_hamiltonian(SpinSystem(0, 0), RFControl(100, kPi / 2));
    CHECK(max_abs(h - kTwoPi * 100.0 * op_iy()) < 1e-9);
  }
  SUBCASE("hermitian for random parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    for (int i = 0; i < 100; ++i) {
      const Operator h = build_hamiltonian(SpinSystem(u(rng), std::abs(u(rng)), u(rng)),
                                           RFControl(std::abs(u(rng)), u(rng)));
      CHECK(max_abs(h - h.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("su2_propagator closed form") {
  SUBCASE("zero field gives identity") {
    const Matrix2 u = su2_propagator(Eigen::Vector3d::Zero(), 1.0);
    CHECK((u - Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("x rotation by pi is -i sigma_x") {
    const double omega = 123.0;
    const Matrix2 u = su2_propagator({omega, 0, 0}, kPi / omega);
    Matrix2 expect;
    expect << 0, -kI, -kI, 0;
    CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("z field accumulates opposite phases") {
    const Matrix2 u = su2_propagator({0, 0, kTwoPi * 100.0}, 2.5e-3);
    CHECK(std::abs(u(0, 0) - std::exp(-kI * kPi / 4.0)) < 1e-12);
    CHECK(std::abs(u(1, 1) - std::exp(kI * kPi / 4.0)) < 1e-12);
    CHECK(std::abs(u(0, 1)) == 0.0);
    CHECK(std::abs(u(1, 0)) == 0.0);
  }
}

TEST_CASE("slice_propagator matches the series exponential for |H| dt <= 1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const SpinSystem sys(u(rng), std::abs(u(rng)), u(rng));
    const RFControl rf(std::abs(u(rng)), u(rng) / 50.0);
    const Operator h = build_hamiltonian(sys, rf);
    const double hnorm = h.operatorNorm();
    const double dt = hnorm > 0.0 ? 1.0 / hnorm : 1e-4;
    const Operator got = slice_propagator(sys, rf, dt);
    CHECK(max_abs(got - series_exponential(h, dt)) < 1e-9);
  }
}

TEST_CASE("slice_propagator structural invariants") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  std::uniform_real_distribution<double> ud(0.0, 5e-4);
  for (int i = 0; i < 10000; ++i) {
    const SpinSystem sys(u(rng), std::abs(u(rng)), u(rng));
    const RFControl rf(std::abs(u(rng)), u(rng));
    const Operator p = slice_propagator(sys, rf, ud(rng));
    // unitarity
    CHECK(max_abs(p.adjoint() * p - Operator::Identity()) < 1e-12);
    // no amplitude transfer between S manifolds: off-block entries exactly 0
    CHECK(std::abs(p(0, 1)) == 0.0);
    CHECK(std::abs(p(0, 3)) == 0.0);
    CHECK(std::abs(p(2, 1)) == 0.0);
    CHECK(std::abs(p(2, 3)) == 0.0);
    CHECK(std::abs(p(1, 0)) == 0.0);
    CHECK(std::abs(p(1, 2)) == 0.0);
    CHECK(std::abs(p(3, 0)) == 0.0);
    CHECK(std::abs(p(3, 2)) == 0.0);
    // norm preservation
    StateVec s;
    s << Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
        Complex(u(rng), u(rng));
    s.normalize();
    CHECK(std::abs((p * s).norm() - 1.0) < 1e-10);
  }
  SUBCASE("zero hamiltonian gives identity") {
    CHECK(max_abs(slice_propagator(SpinSystem(0, 0), RFControl(0, 0), 1.0) -
                  Operator::Identity()) < 1e-15);
  }
}

TEST_CASE("hard_pulse") {
  SUBCASE("zero angle is identity") {
    CHECK(max_abs(hard_pulse(SpinTarget::I, 0.0, 0.0) - Operator::Identity()) < 1e-15);
  }
  SUBCASE("two 180y pulses give -identity") {
    const Operator u = hard_pulse(SpinTarget::I, 180.0, 90.0);
    CHECK(max_abs(u * u + Operator::Identity()) < 1e-12);
  }
  SUBCASE("90y on I defines the signal normalization") {
    for (int s = 0; s < 2; ++s) {
      const StateVec psi = hard_pulse(SpinTarget::I, 90.0, 90.0) * basis_state(0, s);
      CHECK(std::abs(transverse_signal(psi, s) - Complex(1.0, 0.0)) < 1e-12);
      CHECK(std::abs(transverse_signal(psi, 1 - s)) < 1e-15);
    }
  }
  SUBCASE("pulses on S leave I alone") {
    const Operator u = hard_pulse(SpinTarget::S, 180.0, 0.0);
    CHECK(max_abs(u.adjoint() * u - Operator::Identity()) < 1e-12);
    // |0>_I|0>_S -> |0>_I|1>_S up to phase
    const StateVec psi = u * basis_state(0, 0);
    CHECK(std::abs(std::abs(psi(1)) - 1.0) < 1e-12);
  }
}

TEST_CASE("transverse_signal") {
  CHECK(std::abs(transverse_signal(basis_state(0, 0), 0)) == 0.0);
  StateVec plus = (basis_state(0, 0) + basis_state(1, 0)) / std::sqrt(2.0);
  CHECK(std::abs(transverse_signal(plus, 0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(transverse_signal(plus, 1)) == 0.0);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(SpinSystem(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(RFControl(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpinSystem(std::nan(""), 1.0), std::invalid_argument);
}
