#include "berrysim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace berrysim {

namespace {

// bracket of the differential-phase formula in units of J
double bracket(double d, double v) {
  const double r1 = std::hypot(d + 1.0, v);
  const double r0 = std::hypot(d, v);
  if (r0 == 0.0 || r1 == 0.0) throw std::domain_error("field direction undefined (zero field)");
  return (d + 1.0) / r1 - d / r0;
}

double bracket_dv(double d, double v) {
  const double r1 = std::hypot(d + 1.0, v);
  const double r0 = std::hypot(d, v);
  return -v * (d + 1.0) / (r1 * r1 * r1) + v * d / (r0 * r0 * r0);
}

double bracket_dd(double d, double v) {
  const double r1 = std::hypot(d + 1.0, v);
  const double r0 = std::hypot(d, v);
  return v * v / (r1 * r1 * r1) - v * v / (r0 * r0 * r0);
}

}  // namespace

double berry_phase_cone(double theta_rad, Branch branch) {
  if (theta_rad < -1e-12 || theta_rad > kPi + 1e-12)
    throw std::domain_error("cone angle must lie in [0, pi]");
  const double gamma = kPi * (1.0 - std::cos(theta_rad));
  return branch == Branch::Aligned ? -gamma : gamma;
}

double cone_angle(double offset_hz, double nu1_hz) {
  if (offset_hz == 0.0 && nu1_hz == 0.0)
    throw std::domain_error("field direction undefined (zero field)");
  return std::atan2(nu1_hz, offset_hz);
}

double differential_phase(double delta_hz, double j_hz, double nu1_hz) {
  if (!std::isfinite(delta_hz) || !std::isfinite(j_hz) || !std::isfinite(nu1_hz))
    throw std::domain_error("inputs must be finite");
  const double r0 = std::hypot(delta_hz, nu1_hz);
  const double r1 = std::hypot(delta_hz + j_hz, nu1_hz);
  if (r0 == 0.0 || r1 == 0.0) throw std::domain_error("field direction undefined (zero field)");
  return kPi * ((delta_hz + j_hz) / r1 - delta_hz / r0);
}

double observed_controlled_phase(double delta_hz, double j_hz, double nu1_hz) {
  return 4.0 * rad2deg(std::abs(differential_phase(delta_hz, j_hz, nu1_hz)));
}

double observed_line_phase_deg(double offset_hz, double nu1_hz) {
  if (offset_hz == 0.0 && nu1_hz == 0.0) return 0.0;
  const double theta = cone_angle(offset_hz, nu1_hz);
  return 4.0 * rad2deg(kPi * (1.0 - std::cos(theta)));
}

double solid_angle(const SpherePath& path) {
  // drop consecutive duplicates and an explicit closing point
  SpherePath pts;
  pts.reserve(path.size());
  for (const auto& p : path) {
    const double n = p.norm();
    if (std::abs(n - 1.0) > 1e-9) throw std::domain_error("path points must be unit vectors");
    if (!pts.empty() && pts.back().dot(p) > 1.0 - 1e-15) continue;
    pts.push_back(p / n);
  }
  while (pts.size() > 1 && pts.front().dot(pts.back()) > 1.0 - 1e-15) pts.pop_back();
  if (pts.size() < 3) return 0.0;

  const std::size_t n = pts.size();
  for (std::size_t k = 0; k < n; ++k)
    if (pts[k].dot(pts[(k + 1) % n]) < -1.0 + 1e-12)
      throw std::domain_error("antipodal consecutive points: geodesic is ambiguous");

  // Signed area as a fan of geodesic triangles (a, p_k, p_{k+1}) about the
  // first vertex; each triangle's signed excess via van Oosterom-Strackee.
  // Degenerate triangles (retraced edges) contribute exactly zero, which the
  // turning-angle form of Gauss-Bonnet cannot guarantee at cusp vertices.
  const Eigen::Vector3d& a = pts[0];
  double omega = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Eigen::Vector3d& b = pts[k];
    const Eigen::Vector3d& c = pts[k + 1];
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    omega += 2.0 * std::atan2(num, den);
  }
  while (omega >= 4.0 * kPi) omega -= 4.0 * kPi;
  while (omega <= -4.0 * kPi) omega += 4.0 * kPi;
  return omega;
}

double dynamic_phase_adiabatic(std::span<const ControlSlice> slices, double offset_hz,
                               Branch branch) {
  double phase = 0.0;
  for (const ControlSlice& c : slices) {
    if (c.is_pulse_marker) continue;
    phase += 0.5 * kTwoPi * std::hypot(offset_hz, c.nu1_hz) * c.dt_s;
  }
  return branch == Branch::Aligned ? -phase : phase;
}

GateOptimum optimize_pi_gate(double j_hz, double target_deg) {
  if (!(j_hz > 0.0)) throw std::domain_error("j_hz must be > 0");
  if (!(target_deg > 0.0) || target_deg >= 720.0)
    throw std::domain_error("target_deg must lie in (0, 720)");
  const double target_bracket = target_deg / 720.0;

  // unknowns in units of J: x = (delta/J, nu1/J)
  double d = 1.0, v = 2.0;
  auto f1 = [&](double dd, double vv) { return bracket(dd, vv) - target_bracket; };
  auto f2 = [&](double dd, double vv) { return bracket_dv(dd, vv); };

  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    const double F1 = f1(d, v), F2 = f2(d, v);
    const double res = std::hypot(F1, F2);
    if (res < 1e-12) {
      converged = true;
      break;
    }
    const double h = 1e-7 * std::max(1.0, std::max(std::abs(d), std::abs(v)));
    const double j11 = (f1(d + h, v) - f1(d - h, v)) / (2 * h);
    const double j12 = (f1(d, v + h) - f1(d, v - h)) / (2 * h);
    const double j21 = (f2(d + h, v) - f2(d - h, v)) / (2 * h);
    const double j22 = (f2(d, v + h) - f2(d, v - h)) / (2 * h);
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    double step_d = -(j22 * F1 - j12 * F2) / det;
    double step_v = -(-j21 * F1 + j11 * F2) / det;
    // damped line search on the residual norm
    double lambda = 1.0;
    for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
      const double nd = d + lambda * step_d, nv = v + lambda * step_v;
      if (nd <= 0.0 || nv <= 0.0) continue;
      if (std::hypot(f1(nd, nv), f2(nd, nv)) < res) {
        d = nd;
        v = nv;
        break;
      }
      if (ls == 39) iter = 200;  // stalled
    }
  }

  if (!converged || std::hypot(f1(d, v), f2(d, v)) >= 1e-8) {
    // fallback: for each delta, find the stationary nu1 by golden section,
    // then bisect delta on the bracket value (monotone decreasing)
    auto v_star = [&](double dd) {
      double a = 1e-9, b = 100.0;
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
      for (int i = 0; i < 200; ++i) {
        if (bracket(dd, x1) < bracket(dd, x2))
          a = x1, x1 = x2, x2 = a + phi * (b - a);
        else
          b = x2, x2 = x1, x1 = b - phi * (b - a);
      }
      return 0.5 * (a + b);
    };
    double lo = 1e-9, hi = 100.0;
    if (bracket(hi, v_star(hi)) > target_bracket || bracket(lo, v_star(lo)) < target_bracket)
      throw std::runtime_error("optimize_pi_gate: target not bracketed");
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (bracket(mid, v_star(mid)) > target_bracket ? lo : hi) = mid;
    }
    d = 0.5 * (lo + hi);
    v = v_star(d);
    if (std::abs(f1(d, v)) >= 1e-8 || std::abs(f2(d, v)) >= 1e-6)
      throw std::runtime_error("optimize_pi_gate failed to converge; last iterate delta/J=" +
                               std::to_string(d) + " nu1/J=" + std::to_string(v));
  }

  GateOptimum opt;
  opt.delta_over_j = d;
  opt.nu1_over_j = v;
  opt.delta_hz = d * j_hz;
  opt.nu1_hz = v * j_hz;
  opt.achieved_controlled_deg = 720.0 * bracket(d, v);
  opt.residual_phase = std::abs(f1(d, v));
  opt.residual_stationarity = std::abs(f2(d, v));
  opt.d_controlled_d_nu1 = 720.0 * bracket_dv(d, v) / j_hz;
  opt.d_controlled_d_delta = 720.0 * bracket_dd(d, v) / j_hz;
  return opt;
}

}  // namespace berrysim
