#include <chrono>
#include <cstdio>
#include <vector>
#include "berrysim/engine.hpp"
using namespace berrysim;
int main() {
  SpinSystem sys(221.3, 209.2);
  SimConfig cfg; cfg.b1.sigma_rel = 0.05; cfg.ensemble_size = 200; cfg.threads = 8;
  std::vector<double> grid;
  for (double v = 0; v <= 774.0 + 1e-9; v += 5.0) grid.push_back(v);
  auto t0 = std::chrono::steady_clock::now();
  auto rows = sweep_nu1(grid, sys, SequenceParams{441.8, 200, 100e-6}, cfg);
  auto t1 = std::chrono::steady_clock::now();
  std::printf("rows=%zu time=%.1fs\n", rows.size(),
              std::chrono::duration<double>(t1 - t0).count());
  // report max gamma error and the controlled max
  double e0 = 0, e1 = 0, cmax = -1, cmax_nu = -1;
  for (auto& r : rows) {
    e0 = std::max(e0, std::abs(r.result.gamma0_deg - r.analytic_phi0_deg / 4.0));
    e1 = std::max(e1, std::abs(r.result.gamma1_deg - r.analytic_phi1_deg / 4.0));
    if (r.result.controlled_deg > cmax) { cmax = r.result.controlled_deg; cmax_nu = r.nu1_hz; }
  }
  std::printf("max_gamma_err=%.3f/%.3f cmax=%.3f at nu1=%.1f\n", e0, e1, cmax, cmax_nu);
  return 0;
}
