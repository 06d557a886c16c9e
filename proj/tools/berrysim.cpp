// Command-line front end: experiment subcommands, CSV/JSON emission with a
// replayable manifest sidecar, and sequence-file validation.
//
// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or sequence-file
// parse error. BERRYSIM_SEED overrides the default RNG seed.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "berrysim/adiabaticity.hpp"
#include "berrysim/engine.hpp"
#include "berrysim/geometry.hpp"
#include "berrysim/parser.hpp"
#include "berrysim/sequence.hpp"

using json = nlohmann::ordered_json;
using namespace berrysim;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BERRYSIM_SEED")) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(env, env + std::string_view(env).size(), v);
    if (ec == std::errc{} && *p == '\0') return v;
    throw CLI::ValidationError("BERRYSIM_SEED", "not a valid unsigned integer");
  }
  return 12345;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Emit to --out (with a manifest sidecar) or to stdout.
void emit(const std::string& out_path, const std::string& content, const std::string& subcommand,
          const json& params, std::uint64_t seed, bool write_manifest) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  write_file(out_path, content);
  if (!write_manifest) return;
  json manifest;
  manifest["tool"] = "berrysim";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["parameters"] = params;
  manifest["seed"] = seed;
  manifest["outputs"] = json::array({out_path});
  manifest["wall_clock_utc"] = utc_now();
  write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

struct CommonPhysics {
  double delta_hz = 221.3;
  double j_hz = 209.2;
  int steps = 200;
  double dwell_us = 100.0;
};

void add_physics_flags(CLI::App* app, CommonPhysics& p) {
  app->add_option("--delta-hz", p.delta_hz, "offset of the S=|0> line (Hz)")
      ->capture_default_str();
  app->add_option("--j-hz", p.j_hz, "scalar coupling J (Hz)")->capture_default_str();
  app->add_option("--steps", p.steps, "steps per sweep segment")->capture_default_str();
  app->add_option("--dwell-us", p.dwell_us, "step duration (us)")->capture_default_str();
}

struct EnsembleOpts {
  double b1_sigma = 0.05;
  int ensemble = 200;
  std::uint64_t seed = 12345;
  int threads = int(std::max(1u, std::thread::hardware_concurrency()));
};

void add_ensemble_flags(CLI::App* app, EnsembleOpts& e) {
  e.seed = default_seed();
  app->add_option("--b1-sigma", e.b1_sigma, "gaussian relative RF amplitude spread")
      ->capture_default_str();
  app->add_option("--ensemble", e.ensemble, "ensemble size")->capture_default_str();
  app->add_option("--seed", e.seed, "RNG seed (default from BERRYSIM_SEED if set)")
      ->capture_default_str();
  app->add_option("--threads", e.threads, "worker threads")->capture_default_str();
}

SimConfig make_config(const EnsembleOpts& e) {
  SimConfig cfg;
  cfg.b1.sigma_rel = e.b1_sigma;
  cfg.ensemble_size = e.b1_sigma > 0.0 ? e.ensemble : 1;
  cfg.rng_seed = e.seed;
  cfg.threads = e.threads;
  return cfg;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
  CommonPhysics phys;
  EnsembleOpts ens;
  double nu1_max_hz = 774.0;
  double grid_step_hz = 5.0;
  std::string out;
};

json sweep_params(const SweepArgs& a) {
  return {{"delta_hz", a.phys.delta_hz}, {"j_hz", a.phys.j_hz},
          {"nu1_max_hz", a.nu1_max_hz},  {"grid_step_hz", a.grid_step_hz},
          {"steps", a.phys.steps},       {"dwell_us", a.phys.dwell_us},
          {"b1_sigma", a.ens.b1_sigma},  {"ensemble", a.ens.ensemble},
          {"seed", a.ens.seed},          {"out", a.out}};
}

void run_sweep(const SweepArgs& a, bool write_manifest) {
  if (a.grid_step_hz <= 0.0) throw CLI::ValidationError("--grid-step-hz", "must be > 0");
  if (a.nu1_max_hz < 0.0) throw CLI::ValidationError("--nu1-max-hz", "must be >= 0");
  const SpinSystem system(a.phys.delta_hz, a.phys.j_hz);
  std::vector<double> grid;
  for (double v = 0.0; v <= a.nu1_max_hz + 1e-9; v += a.grid_step_hz) grid.push_back(v);
  const SequenceParams params{0.0, a.phys.steps, a.phys.dwell_us * 1e-6};
  const auto rows = sweep_nu1(grid, system, params, make_config(a.ens));

  std::ostringstream csv;
  csv << "nu1_hz,phi0_deg,phi1_deg,gamma0_deg,gamma1_deg,controlled_deg,mag0,mag1,"
         "analytic_gamma0_deg,analytic_gamma1_deg,analytic_controlled_deg\n";
  for (const SweepRow& r : rows) {
    csv << fmt(r.nu1_hz) << ',' << fmt(r.result.phi0_deg) << ',' << fmt(r.result.phi1_deg) << ','
        << fmt(r.result.gamma0_deg) << ',' << fmt(r.result.gamma1_deg) << ','
        << fmt(r.result.controlled_deg) << ',' << fmt(r.result.mag0) << ','
        << fmt(r.result.mag1) << ',' << fmt(r.analytic_phi0_deg / 4.0) << ','
        << fmt(r.analytic_phi1_deg / 4.0) << ',' << fmt(r.analytic_controlled_deg) << '\n';
  }
  emit(a.out, csv.str(), "sweep", sweep_params(a), a.ens.seed, write_manifest);
}

// ----------------------------------------------------------------- gate ----

struct GateArgs {
  CommonPhysics phys;
  EnsembleOpts ens;
  double nu1_hz = 441.8;
  std::string out;
};

json gate_params(const GateArgs& a) {
  return {{"delta_hz", a.phys.delta_hz}, {"j_hz", a.phys.j_hz}, {"nu1_hz", a.nu1_hz},
          {"steps", a.phys.steps},       {"dwell_us", a.phys.dwell_us},
          {"b1_sigma", a.ens.b1_sigma},  {"ensemble", a.ens.ensemble},
          {"seed", a.ens.seed},          {"out", a.out}};
}

void run_gate(const GateArgs& a, bool write_manifest) {
  if (a.nu1_hz < 0.0) throw CLI::ValidationError("--nu1-hz", "must be >= 0");
  const SpinSystem system(a.phys.delta_hz, a.phys.j_hz);
  const Sequence seq = build_fig1(a.nu1_hz, a.phys.steps, a.phys.dwell_us * 1e-6);
  const auto hints = analytic_line_phases_deg(system, a.nu1_hz);
  const PhaseResult r = measure_phases(seq, system, make_config(a.ens), hints);
  const AdiabaticityReport q = adiabaticity_report(seq, system);

  json out;
  out["phi0_deg"] = r.phi0_deg;
  out["phi1_deg"] = r.phi1_deg;
  out["gamma0_deg"] = r.gamma0_deg;
  out["gamma1_deg"] = r.gamma1_deg;
  out["controlled_deg"] = r.controlled_deg;
  out["mag0"] = r.mag0;
  out["mag1"] = r.mag1;
  out["phase_undefined"] = json::array({r.undefined0, r.undefined1});
  out["analytic"] = {{"phi0_deg", hints[0]},
                     {"phi1_deg", hints[1]},
                     {"controlled_deg",
                      observed_controlled_phase(a.phys.delta_hz, a.phys.j_hz, a.nu1_hz)}};
  out["min_q"] = {{"line0", q.min_q[0]}, {"line1", q.min_q[1]}, {"overall", q.overall_min_q()}};
  out["adiabaticity_warning"] = q.any_flagged();
  emit(a.out, out.dump(2) + "\n", "gate", gate_params(a), a.ens.seed, write_manifest);
}

// ------------------------------------------------------------- optimize ----

struct OptimizeArgs {
  double j_hz = 209.2;
  double target_deg = 180.0;
  std::string out;
};

void run_optimize(const OptimizeArgs& a, bool write_manifest) {
  const GateOptimum opt = optimize_pi_gate(a.j_hz, a.target_deg);
  json out;
  out["delta_over_j"] = opt.delta_over_j;
  out["nu1_over_j"] = opt.nu1_over_j;
  out["delta_hz"] = opt.delta_hz;
  out["nu1_hz"] = opt.nu1_hz;
  out["achieved_controlled_deg"] = opt.achieved_controlled_deg;
  out["residual_phase"] = opt.residual_phase;
  out["residual_stationarity"] = opt.residual_stationarity;
  out["d_controlled_d_nu1_deg_per_hz"] = opt.d_controlled_d_nu1;
  out["d_controlled_d_delta_deg_per_hz"] = opt.d_controlled_d_delta;
  emit(a.out, out.dump(2) + "\n", "optimize",
       {{"j_hz", a.j_hz}, {"target_deg", a.target_deg}, {"out", a.out}}, 0, write_manifest);
}

// --------------------------------------------------------- adiabaticity ----

struct AdiabaticityArgs {
  CommonPhysics phys;
  double nu1_hz = 441.8;
  std::vector<double> dwells_us{100.0, 50.0, 25.0};
  std::string out;
};

void run_adiabaticity(const AdiabaticityArgs& a, bool write_manifest) {
  if (a.dwells_us.empty()) throw CLI::ValidationError("--dwells-us", "list must be non-empty");
  const SpinSystem system(a.phys.delta_hz, a.phys.j_hz);
  std::vector<double> dts;
  for (double d : a.dwells_us) {
    if (d <= 0.0) throw CLI::ValidationError("--dwells-us", "entries must be > 0");
    dts.push_back(d * 1e-6);
  }
  const SequenceParams params{a.nu1_hz, a.phys.steps, 0.0};
  const auto rows = sweep_rate_study(system, params, dts);
  std::ostringstream csv;
  csv << "dwell_us,min_q,max_abs_phase_error_deg_line0,max_abs_phase_error_deg_line1\n";
  for (const RateRow& r : rows)
    csv << fmt(r.step_dt_s * 1e6) << ',' << fmt(r.min_q) << ','
        << fmt(r.abs_phase_error_deg[0]) << ',' << fmt(r.abs_phase_error_deg[1]) << '\n';
  emit(a.out, csv.str(), "adiabaticity",
       {{"delta_hz", a.phys.delta_hz},
        {"j_hz", a.phys.j_hz},
        {"nu1_hz", a.nu1_hz},
        {"steps", a.phys.steps},
        {"dwells_us", a.dwells_us},
        {"out", a.out}},
       0, write_manifest);
}

// ---------------------------------------------------- dephasing / noise ----

struct DephasingArgs {
  CommonPhysics phys;
  EnsembleOpts ens;
  double nu1_hz = 441.8;
  std::string out;
};

void run_dephasing(const DephasingArgs& a, bool write_manifest) {
  if (!(a.ens.b1_sigma >= 0.0)) throw CLI::ValidationError("--b1-sigma", "must be >= 0");
  const SpinSystem system(a.phys.delta_hz, a.phys.j_hz);
  const SequenceParams params{a.nu1_hz, a.phys.steps, a.phys.dwell_us * 1e-6};
  SimConfig cfg = make_config(a.ens);
  cfg.ensemble_size = a.ens.ensemble;
  const DephasingComparison c =
      dephasing_experiment(system, params, a.ens.b1_sigma, cfg);
  json out;
  out["fig1_mag"] = json::array({c.fig1_mag[0], c.fig1_mag[1]});
  out["naive_mag"] = json::array({c.naive_mag[0], c.naive_mag[1]});
  out["fig1_phase_spread_deg"] =
      json::array({c.fig1_phase_spread_deg[0], c.fig1_phase_spread_deg[1]});
  out["naive_phase_spread_deg"] =
      json::array({c.naive_phase_spread_deg[0], c.naive_phase_spread_deg[1]});
  emit(a.out, out.dump(2) + "\n", "dephasing",
       {{"delta_hz", a.phys.delta_hz},
        {"j_hz", a.phys.j_hz},
        {"nu1_hz", a.nu1_hz},
        {"steps", a.phys.steps},
        {"dwell_us", a.phys.dwell_us},
        {"b1_sigma", a.ens.b1_sigma},
        {"ensemble", a.ens.ensemble},
        {"seed", a.ens.seed},
        {"out", a.out}},
       a.ens.seed, write_manifest);
}

struct NoiseArgs {
  CommonPhysics phys;
  double nu1_hz = 441.8;
  double phase_jitter_deg = 2.0;
  int trials = 100;
  std::uint64_t seed = 12345;
  std::string out;
};

void run_noise(const NoiseArgs& a, bool write_manifest) {
  if (a.trials < 1) throw CLI::ValidationError("--trials", "must be >= 1");
  if (a.phase_jitter_deg < 0.0) throw CLI::ValidationError("--phase-jitter-deg", "must be >= 0");
  const SpinSystem system(a.phys.delta_hz, a.phys.j_hz);
  const SequenceParams params{a.nu1_hz, a.phys.steps, a.phys.dwell_us * 1e-6};
  const JitterStats s =
      jitter_robustness(system, params, deg2rad(a.phase_jitter_deg), a.trials, a.seed);
  json out;
  out["mean_controlled_deg"] = s.mean_controlled_deg;
  out["std_controlled_deg"] = s.std_controlled_deg;
  out["geometric_std_deg"] = s.geometric_std_deg;
  out["naive_phase_std_deg"] = s.naive_phase_std_deg;
  out["controlled_deg"] = s.controlled_deg;
  out["geometric_controlled_deg"] = s.geometric_controlled_deg;
  json omegas = json::array();
  for (const auto& o : s.solid_angle_sr) omegas.push_back(json::array({o[0], o[1]}));
  out["solid_angle_sr"] = omegas;
  emit(a.out, out.dump(2) + "\n", "noise",
       {{"delta_hz", a.phys.delta_hz},
        {"j_hz", a.phys.j_hz},
        {"nu1_hz", a.nu1_hz},
        {"steps", a.phys.steps},
        {"dwell_us", a.phys.dwell_us},
        {"phase_jitter_deg", a.phase_jitter_deg},
        {"trials", a.trials},
        {"seed", a.seed},
        {"out", a.out}},
       a.seed, write_manifest);
}

// ------------------------------------------------------------- validate ----

struct ValidateArgs {
  std::string path;
  bool adiabaticity = false;
  double delta_hz = 221.3;
  double j_hz = 209.2;
  double threshold = kDefaultQThreshold;
};

int run_validate(const ValidateArgs& a) {
  std::ifstream in(a.path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << a.path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const ParseResult res = parse_sequence(buf.str());
  if (!res.ok()) {
    for (const ParseError& e : res.errors) std::cerr << a.path << ":" << e.to_string() << "\n";
    return 2;
  }
  std::cout << format_sequence(res.sequence);
  if (a.adiabaticity) {
    const SpinSystem system(a.delta_hz, a.j_hz);
    const AdiabaticityReport rep = adiabaticity_report(res.sequence, system, a.threshold);
    std::cout << "# adiabaticity (threshold " << fmt(a.threshold) << ")\n";
    for (const SegmentQ& sq : rep.segments) {
      std::cout << "# segment " << sq.segment_index << " min_q";
      for (int m = 0; m < 2; ++m) {
        std::cout << " line" << m << "=";
        if (sq.min_q[m] >= kQInfinity)
          std::cout << "inf";
        else
          std::cout << fmt(sq.min_q[m]);
      }
      std::cout << (sq.flagged ? " FLAGGED" : "") << "\n";
    }
    std::cout << "# overall min_q ";
    if (rep.overall_min_q() >= kQInfinity)
      std::cout << "inf";
    else
      std::cout << fmt(rep.overall_min_q());
    std::cout << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- replay ----

int run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << manifest_path << "\n";
    return 1;
  }
  json m = json::parse(in, nullptr, false);
  if (m.is_discarded() || !m.contains("subcommand") || !m.contains("parameters")) {
    std::cerr << "error: not a valid manifest: " << manifest_path << "\n";
    return 2;
  }
  const std::string sub = m["subcommand"];
  const json& p = m["parameters"];
  auto phys = [&](CommonPhysics& c) {
    c.delta_hz = p.value("delta_hz", c.delta_hz);
    c.j_hz = p.value("j_hz", c.j_hz);
    c.steps = p.value("steps", c.steps);
    c.dwell_us = p.value("dwell_us", c.dwell_us);
  };
  auto ens = [&](EnsembleOpts& e) {
    e.b1_sigma = p.value("b1_sigma", e.b1_sigma);
    e.ensemble = p.value("ensemble", e.ensemble);
    e.seed = p.value("seed", e.seed);
  };
  if (sub == "sweep") {
    SweepArgs a;
    phys(a.phys);
    ens(a.ens);
    a.nu1_max_hz = p.value("nu1_max_hz", a.nu1_max_hz);
    a.grid_step_hz = p.value("grid_step_hz", a.grid_step_hz);
    a.out = p.value("out", a.out);
    run_sweep(a, false);
  } else if (sub == "gate") {
    GateArgs a;
    phys(a.phys);
    ens(a.ens);
    a.nu1_hz = p.value("nu1_hz", a.nu1_hz);
    a.out = p.value("out", a.out);
    run_gate(a, false);
  } else if (sub == "optimize") {
    OptimizeArgs a;
    a.j_hz = p.value("j_hz", a.j_hz);
    a.target_deg = p.value("target_deg", a.target_deg);
    a.out = p.value("out", a.out);
    run_optimize(a, false);
  } else if (sub == "adiabaticity") {
    AdiabaticityArgs a;
    phys(a.phys);
    a.nu1_hz = p.value("nu1_hz", a.nu1_hz);
    a.dwells_us = p.value("dwells_us", a.dwells_us);
    a.out = p.value("out", a.out);
    run_adiabaticity(a, false);
  } else if (sub == "dephasing") {
    DephasingArgs a;
    phys(a.phys);
    ens(a.ens);
    a.nu1_hz = p.value("nu1_hz", a.nu1_hz);
    a.out = p.value("out", a.out);
    run_dephasing(a, false);
  } else if (sub == "noise") {
    NoiseArgs a;
    phys(a.phys);
    a.nu1_hz = p.value("nu1_hz", a.nu1_hz);
    a.phase_jitter_deg = p.value("phase_jitter_deg", a.phase_jitter_deg);
    a.trials = p.value("trials", a.trials);
    a.seed = p.value("seed", a.seed);
    a.out = p.value("out", a.out);
    run_noise(a, false);
  } else {
    std::cerr << "error: unknown subcommand in manifest: " << sub << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional geometric phase gate simulator for two weakly coupled spins"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "RF amplitude sweep, CSV of phases per line");
  add_physics_flags(sweep_cmd, sweep.phys);
  add_ensemble_flags(sweep_cmd, sweep.ens);
  sweep_cmd->add_option("--nu1-max-hz", sweep.nu1_max_hz, "top of the nu1 grid (Hz)")
      ->capture_default_str();
  sweep_cmd->add_option("--grid-step-hz", sweep.grid_step_hz, "nu1 grid spacing (Hz)")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "output CSV path (stdout if omitted)");

  GateArgs gate;
  auto* gate_cmd = app.add_subcommand("gate", "single-point gate evaluation, JSON");
  add_physics_flags(gate_cmd, gate.phys);
  add_ensemble_flags(gate_cmd, gate.ens);
  gate_cmd->add_option("--nu1-hz", gate.nu1_hz, "RF amplitude (Hz)")->capture_default_str();
  gate_cmd->add_option("--out", gate.out, "output JSON path (stdout if omitted)");

  OptimizeArgs optimize;
  auto* opt_cmd = app.add_subcommand("optimize", "controlled-pi gate parameter optimum, JSON");
  opt_cmd->add_option("--j-hz", optimize.j_hz, "scalar coupling J (Hz)")->capture_default_str();
  opt_cmd->add_option("--target-deg", optimize.target_deg, "target controlled phase (deg)")
      ->capture_default_str();
  opt_cmd->add_option("--out", optimize.out, "output JSON path (stdout if omitted)");

  AdiabaticityArgs adiab;
  auto* adiab_cmd = app.add_subcommand("adiabaticity", "sweep-rate study, CSV");
  add_physics_flags(adiab_cmd, adiab.phys);
  adiab_cmd->add_option("--nu1-hz", adiab.nu1_hz, "RF amplitude (Hz)")->capture_default_str();
  adiab_cmd->add_option("--dwells-us", adiab.dwells_us, "dwell times to compare (us)")
      ->delimiter(',')
      ->capture_default_str();
  adiab_cmd->add_option("--out", adiab.out, "output CSV path (stdout if omitted)");

  DephasingArgs deph;
  auto* deph_cmd = app.add_subcommand("dephasing", "echo-refocusing comparison, JSON");
  add_physics_flags(deph_cmd, deph.phys);
  add_ensemble_flags(deph_cmd, deph.ens);
  deph_cmd->add_option("--nu1-hz", deph.nu1_hz, "RF amplitude (Hz)")->capture_default_str();
  deph_cmd->add_option("--out", deph.out, "output JSON path (stdout if omitted)");

  NoiseArgs noise;
  auto* noise_cmd = app.add_subcommand("noise", "phase-jitter robustness, JSON");
  add_physics_flags(noise_cmd, noise.phys);
  noise.seed = default_seed();
  noise_cmd->add_option("--nu1-hz", noise.nu1_hz, "RF amplitude (Hz)")->capture_default_str();
  noise_cmd->add_option("--phase-jitter-deg", noise.phase_jitter_deg, "per-step phase jitter (deg)")
      ->capture_default_str();
  noise_cmd->add_option("--trials", noise.trials, "number of jitter trials")
      ->capture_default_str();
  noise_cmd->add_option("--seed", noise.seed, "RNG seed")->capture_default_str();
  noise_cmd->add_option("--out", noise.out, "output JSON path (stdout if omitted)");

  ValidateArgs validate;
  auto* val_cmd = app.add_subcommand("validate", "parse a sequence file, echo canonical form");
  val_cmd->add_option("path", validate.path, "sequence file")->required();
  val_cmd->add_flag("--adiabaticity", validate.adiabaticity, "append a Q report");
  val_cmd->add_option("--delta-hz", validate.delta_hz, "offset for the Q report (Hz)")
      ->capture_default_str();
  val_cmd->add_option("--j-hz", validate.j_hz, "coupling for the Q report (Hz)")
      ->capture_default_str();
  val_cmd->add_option("--threshold", validate.threshold, "Q warning threshold")
      ->capture_default_str();

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest, reproducing its outputs");
  replay_cmd->add_option("manifest", replay_path, "manifest JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help itself; map all usage errors to exit 2, help to 0
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep_cmd->parsed()) run_sweep(sweep, true);
    if (gate_cmd->parsed()) run_gate(gate, true);
    if (opt_cmd->parsed()) run_optimize(optimize, true);
    if (adiab_cmd->parsed()) run_adiabaticity(adiab, true);
    if (deph_cmd->parsed()) run_dephasing(deph, true);
    if (noise_cmd->parsed()) run_noise(noise, true);
    if (val_cmd->parsed()) return run_validate(validate);
    if (replay_cmd->parsed()) return run_replay(replay_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
