#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "berrysim/adiabaticity.hpp"
#include "berrysim/sequence.hpp"

using namespace berrysim;

TEST_CASE("build_fig1 structure and duration") {
  const Sequence seq = build_fig1(441.8, 200, 100e-6);
  REQUIRE(seq.segments.size() == 8);
  CHECK(std::holds_alternative<AmplitudeSweep>(seq.segments[0]));
  CHECK(std::holds_alternative<PhaseSweep>(seq.segments[1]));
  CHECK(std::holds_alternative<AmplitudeSweep>(seq.segments[2]));
  CHECK(std::holds_alternative<HardPulseSeg>(seq.segments[3]));
  CHECK(std::holds_alternative<AmplitudeSweep>(seq.segments[4]));
  CHECK(std::holds_alternative<PhaseSweep>(seq.segments[5]));
  CHECK(std::holds_alternative<AmplitudeSweep>(seq.segments[6]));
  CHECK(std::holds_alternative<HardPulseSeg>(seq.segments[7]));

  CHECK(std::get<AmplitudeSweep>(seq.segments[0]).direction == SweepDirection::Up);
  CHECK(std::get<AmplitudeSweep>(seq.segments[2]).direction == SweepDirection::Down);
  CHECK(std::get<PhaseSweep>(seq.segments[1]).rotation == SweepRotation::CW);
  CHECK(std::get<PhaseSweep>(seq.segments[5]).rotation == SweepRotation::CCW);
  const auto& p180 = std::get<HardPulseSeg>(seq.segments[3]);
  CHECK(p180.target == SpinTarget::I);
  CHECK(p180.angle_deg == 180.0);
  CHECK(p180.axis_phase_deg == 90.0);
  CHECK(!p180.finite_nu1_hz.has_value());

  CHECK(total_duration_s(seq) == doctest::Approx(0.120).epsilon(1e-12));
  // exactly 6 * steps * dt
  CHECK(total_duration_s(seq) == 6 * 200 * 100e-6);
}

TEST_CASE("build_fig1 edge cases") {
  CHECK_NOTHROW(build_fig1(0.0, 200, 100e-6));  // zero amplitude is a valid sequence
  CHECK_THROWS_AS(build_fig1(441.8, 0, 100e-6), std::invalid_argument);
  CHECK_THROWS_AS(build_fig1(441.8, 200, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_fig1(-1.0, 200, 100e-6), std::invalid_argument);
}

TEST_CASE("build_reference") {
  SUBCASE("bare90 is the empty sequence") {
    CHECK(build_reference(ReferenceKind::Bare90).segments.empty());
  }
  SUBCASE("same_direction differs from fig1 in exactly one segment field") {
    const Sequence fig1 = build_fig1(441.8, 200, 100e-6);
    const Sequence ref = build_reference(ReferenceKind::SameDirection, 441.8, 200, 100e-6);
    REQUIRE(ref.segments.size() == fig1.segments.size());
    int diffs = 0;
    for (std::size_t i = 0; i < fig1.segments.size(); ++i) {
      if (std::holds_alternative<PhaseSweep>(fig1.segments[i])) {
        const auto& a = std::get<PhaseSweep>(fig1.segments[i]);
        const auto& b = std::get<PhaseSweep>(ref.segments[i]);
        CHECK(a.nu1_hz == b.nu1_hz);
        CHECK(a.steps == b.steps);
        CHECK(a.step_dt_s == b.step_dt_s);
        if (a.rotation != b.rotation) ++diffs;
      }
    }
    CHECK(diffs == 1);
    CHECK(std::get<PhaseSweep>(ref.segments[5]).rotation == SweepRotation::CW);
  }
  SUBCASE("invalid step count is rejected") {
    CHECK_THROWS_AS(build_reference(ReferenceKind::SameDirection, 441.8, 0, 100e-6),
                    std::invalid_argument);
  }
}

TEST_CASE("discretize linear ramps use the endpoint convention") {
  SUBCASE("amplitude sweep up") {
    Sequence seq;
    seq.segments.push_back(AmplitudeSweep{SweepDirection::Up, 400.0, 4, 1e-3, 0.0});
    const auto slices = discretize(seq);
    REQUIRE(slices.size() == 4);
    CHECK(slices[0].nu1_hz == doctest::Approx(100.0));
    CHECK(slices[1].nu1_hz == doctest::Approx(200.0));
    CHECK(slices[2].nu1_hz == doctest::Approx(300.0));
    CHECK(slices[3].nu1_hz == doctest::Approx(400.0));
    for (const auto& c : slices) {
      CHECK(c.dt_s == 1e-3);
      CHECK(c.phase_rad == 0.0);
    }
  }
  SUBCASE("phase sweep cw") {
    Sequence seq;
    seq.segments.push_back(PhaseSweep{SweepRotation::CW, 300.0, 4, 1e-3});
    const auto slices = discretize(seq);
    REQUIRE(slices.size() == 4);
    CHECK(slices[0].phase_rad == doctest::Approx(kPi / 2));
    CHECK(slices[1].phase_rad == doctest::Approx(kPi));
    CHECK(slices[2].phase_rad == doctest::Approx(3 * kPi / 2));
    CHECK(slices[3].phase_rad == doctest::Approx(kTwoPi));
  }
  SUBCASE("fig1 compiles to 1200 RF slices plus 2 markers") {
    const auto slices = discretize(build_fig1(441.8, 200, 100e-6));
    int rf = 0, markers = 0;
    for (const auto& c : slices) (c.is_pulse_marker ? markers : rf)++;
    CHECK(rf == 1200);
    CHECK(markers == 2);
  }
  SUBCASE("cw phases are the reversal of ccw phases shifted one grid point") {
    const int n = 37;
    Sequence cw, ccw;
    cw.segments.push_back(PhaseSweep{SweepRotation::CW, 100.0, n, 1e-4});
    ccw.segments.push_back(PhaseSweep{SweepRotation::CCW, 100.0, n, 1e-4});
    const auto a = discretize(cw), b = discretize(ccw);
    REQUIRE(a.size() == std::size_t(n));
    REQUIRE(b.size() == std::size_t(n));
    // reversed ccw = [0, 2pi/n, ..., 2pi(n-1)/n]; cw = same + one grid step
    for (int k = 0; k < n; ++k)
      CHECK(b[n - 1 - k].phase_rad + kTwoPi / n == doctest::Approx(a[k].phase_rad).epsilon(1e-14));
  }
}

TEST_CASE("adiabaticity report") {
  const SpinSystem sys(221.3, 209.2);
  SUBCASE("phase sweep at the paper operating point has min Q near 11") {
    const Sequence seq = build_fig1(441.8, 200, 100e-6);
    const AdiabaticityReport rep = adiabaticity_report(seq, sys);
    // independent estimate for the cw sweep, S=|0> line:
    // omega_eff = 2*pi*hypot(221.3, 441.8), step turn = 2*asin(sin(theta)*sin(pi/n))
    const double omega = kTwoPi * std::hypot(221.3, 441.8);
    const double sin_theta = 441.8 / std::hypot(221.3, 441.8);
    const double turn = 2.0 * std::asin(sin_theta * std::sin(kPi / 200.0));
    const double q_expect = omega * 100e-6 / turn;
    CHECK(rep.min_q[0] == doctest::Approx(q_expect).epsilon(1e-6));
    CHECK(rep.min_q[0] == doctest::Approx(11.0).epsilon(0.01));
    CHECK(!rep.any_flagged());
  }
  SUBCASE("halving the dwell halves Q") {
    const auto r1 = adiabaticity_report(build_fig1(441.8, 200, 100e-6), sys);
    const auto r2 = adiabaticity_report(build_fig1(441.8, 200, 50e-6), sys);
    CHECK(r2.min_q[0] == doctest::Approx(r1.min_q[0] / 2).epsilon(1e-9));
    CHECK(r2.min_q[1] == doctest::Approx(r1.min_q[1] / 2).epsilon(1e-9));
    CHECK(r2.overall_min_q() == doctest::Approx(5.5).epsilon(0.01));
    CHECK(r2.any_flagged());
  }
  SUBCASE("zero amplitude throughout reports static sentinels") {
    const auto rep = adiabaticity_report(build_fig1(0.0, 200, 100e-6), sys);
    CHECK(rep.overall_min_q() >= kQInfinity);
    CHECK(!rep.any_flagged());
  }
  SUBCASE("a single-step sweep is far from adiabatic") {
    const auto rep = adiabaticity_report(build_fig1(441.8, 1, 100e-6), sys);
    CHECK(rep.overall_min_q() < 1.0);
    CHECK(rep.any_flagged());
  }
}

TEST_CASE("sequence transforms") {
  const Sequence fig1 = build_fig1(300.0, 50, 2e-4);
  SUBCASE("make_same_direction forces one rotation everywhere") {
    const Sequence same = make_same_direction(fig1);
    for (const auto& seg : same.segments)
      if (const auto* ps = std::get_if<PhaseSweep>(&seg))
        CHECK(ps->rotation == SweepRotation::CW);
    CHECK(total_duration_s(same) == total_duration_s(fig1));
  }
  SUBCASE("with_s_echo inserts two 180 pulses on S") {
    const Sequence echoed = with_s_echo(fig1);
    int s_pulses = 0;
    for (const auto& seg : echoed.segments)
      if (const auto* hp = std::get_if<HardPulseSeg>(&seg))
        if (hp->target == SpinTarget::S) {
          CHECK(hp->angle_deg == 180.0);
          ++s_pulses;
        }
    CHECK(s_pulses == 2);
    CHECK(total_duration_s(echoed) == total_duration_s(fig1));
  }
}

TEST_CASE("validate_segment rejects bad fields") {
  CHECK_THROWS_AS(validate_segment(AmplitudeSweep{SweepDirection::Up, -1.0, 10, 1e-4, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_segment(PhaseSweep{SweepRotation::CW, 100.0, 0, 1e-4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_segment(DelaySeg{-1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate_segment(DelaySeg{0.0}));
}
