#include "cotrap/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cotrap/config.hpp"
#include "cotrap/constants.hpp"
#include "cotrap/csv.hpp"
#include "cotrap/equilibrium.hpp"
#include "cotrap/error.hpp"
#include "cotrap/interactions.hpp"
#include "cotrap/quantum.hpp"
#include "cotrap/sdk.hpp"
#include "cotrap/stability.hpp"

namespace cotrap::cli {

namespace fs = std::filesystem;

namespace {

// 40Ca+ mass, used by `sdk` when no config is given.
constexpr double kCalciumIonMass = 6.6421562664e-26;

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::string convention;
  int seed = 0;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Config file (JSON)")->envname("COTRAP_CONFIG");
  sub->add_option("--out-dir", c.out_dir, "Directory for output files")->capture_default_str();
  sub->add_option("--seed", c.seed, "Accepted for uniformity; no stochastic paths")
      ->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Threads for sweeps (0 = all)")->capture_default_str();
  sub->add_option("--convention", c.convention, "Frequency convention for *_hz keys")
      ->check(CLI::IsMember({"ordinary", "angular"}));
}

SimConfig load(const Common& c) {
  if (c.config.empty()) throw ConfigError("no config given (use --config or COTRAP_CONFIG)");
  std::optional<FrequencyConvention> conv;
  if (!c.convention.empty()) conv = parse_convention(c.convention);
  return load_config(c.config, conv);
}

struct Session {
  const Common& common;
  std::ostringstream log;
  std::vector<fs::path> outputs;

  fs::path open_output(const std::string& name, std::ofstream& file) {
    const fs::path dir(common.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path p = dir / name;
    file.open(p, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + p.string() + "'");
    outputs.push_back(p);
    return p;
  }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::pair<double, double> parse_span(const std::string& text, const std::string& key) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("expected lo:hi for '" + key + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("unparseable range for '" + key + "'");
  }
}

double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("unparseable number for '" + key + "'");
  }
  if (used != text.size()) throw ConfigError("unparseable number for '" + key + "'");
  return v;
}

// --- stability -----------------------------------------------------------

struct StabilityArgs {
  std::string particle;
  std::vector<std::string> scan;
  std::optional<double> p;
};

void stability_table(Session& s, const SimConfig& cfg, Particle part) {
  const ToneRatio ratio = tone_ratio(cfg);
  s.log << "particle = " << to_string(part) << " (" << cfg.particle(part).label << ")\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-4s %14s %14s %14s %5s %8s %8s %16s\n", "axis", "a", "q", "p",
                "ref", "pseudo", "floquet", "omega [rad/s]");
  s.log << line;
  for (Axis ax : {Axis::x, Axis::y}) {
    const StabilityTriplet t = stability_params(cfg, part, ax);
    const FloquetResult fr = floquet_classify(hill_params(cfg, part, ax), ratio.n);
    std::string omega = "unstable";
    try {
      omega = fmt("%.6e", secular_frequency(t, reference_omega(cfg, t)));
    } catch (const NumericalError&) {
    }
    std::snprintf(line, sizeof line, "%-4s %14.6e %14.6e %14.6e %5s %8s %8s %16s\n",
                  std::string(to_string(ax)).c_str(), t.a, t.q, t.p,
                  t.reference_tone == Tone::slow ? "slow" : "fast",
                  is_stable_pseudopotential(t) ? "true" : "false", fr.stable ? "true" : "false",
                  omega.c_str());
    s.log << line;
  }
  try {
    s.log << "omega_z = " << fmt("%.6e", axial_frequency(cfg, part)) << " rad/s\n";
  } catch (const NumericalError& e) {
    s.log << "omega_z = unstable (" << e.what() << ")\n";
  }
  s.log << "stable = "
        << ((floquet_classify(hill_params(cfg, part, Axis::x), ratio.n).stable &&
             floquet_classify(hill_params(cfg, part, Axis::y), ratio.n).stable)
                ? "true"
                : "false")
        << '\n';
}

void cmd_stability(Session& s, const StabilityArgs& a) {
  const SimConfig cfg = load(s.common);
  std::vector<Particle> parts{Particle::nanoparticle, Particle::ion};
  if (!a.particle.empty()) {
    const auto p = parse_particle(a.particle);
    if (!p) throw ConfigError("unknown particle '" + a.particle + "'");
    parts = {*p};
  }
  const ToneRatio ratio = tone_ratio(cfg);
  s.log << "convention = " << to_string(cfg.drive.frequency_convention) << '\n';
  s.log << "tone_ratio = " << fmt("%.6g", ratio.exact)
        << (ratio.commensurate ? "" : " (incommensurate, rounded)") << '\n';
  for (Particle p : parts) stability_table(s, cfg, p);
  for (const auto& w : stability_warnings(cfg)) s.log << "warning: " << w << '\n';

  if (a.scan.empty()) return;
  double a_lo = -0.2, a_hi = 0.2, q_lo = 0.0, q_hi = 1.0;
  int n = 50;
  for (const auto& tok : a.scan) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("scan token '" + tok + "' needs key=value");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "a") std::tie(a_lo, a_hi) = parse_span(val, "a");
    else if (key == "q") std::tie(q_lo, q_hi) = parse_span(val, "q");
    else if (key == "n") {
      const double v = parse_number(val, "n");
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("scan 'n' must be an integer >= 1");
      n = static_cast<int>(v);
    } else throw ConfigError("unknown scan key '" + key + "'");
  }
  ScanSpec spec;
  spec.a_min = a_lo;
  spec.a_max = a_hi;
  spec.q_min = q_lo;
  spec.q_max = q_hi;
  spec.a_count = spec.q_count = n;
  spec.p = 0.0;
  spec.tone_ratio_n = 1;
  if (a.p) {
    spec.p = *a.p;
    spec.tone_ratio_n = ratio.n;
  }
  const auto points = stability_scan(spec, s.common.jobs);
  std::ofstream f;
  const fs::path p = s.open_output("stability_scan.csv", f);
  write_scan_csv(f, points);
  s.log << "wrote " << p.string() << " (" << points.size() << " rows)\n";
}

// --- equilibrium ---------------------------------------------------------

struct EquilibriumArgs {
  std::string sweep;
  std::string gravity, coulomb;
  std::string branch = "above";
  double guess_um = 50.0;
  double trajectory_periods = 0.0;
};

void cmd_equilibrium(Session& s, const EquilibriumArgs& a) {
  SimConfig cfg = load(s.common);
  if (!a.gravity.empty()) cfg.gravity_on = a.gravity == "on";
  if (!a.coulomb.empty()) cfg.coulomb_on = a.coulomb == "on";
  const Branch branch = a.branch == "below" ? Branch::below : Branch::above;
  const double guess = a.guess_um * 1e-6;

  const EquilibriumSolution sol = static_equilibrium(cfg, guess, branch);
  s.log << "v_end_V = " << csv::format(cfg.drive.v_end) << '\n';
  write_equilibrium_report(s.log, sol);

  if (!a.sweep.empty()) {
    const auto volts = parse_range(a.sweep);
    const auto points = separation_vs_voltage(cfg, volts, guess, s.common.jobs, branch);
    std::ofstream f;
    const fs::path p = s.open_output("equilibrium_sweep.csv", f);
    write_equilibrium_csv(f, points);
    s.log << "wrote " << p.string() << " (" << points.size() << " rows)\n";
  }
  if (a.trajectory_periods > 0.0) {
    const double t_end = a.trajectory_periods * kTwoPi / cfg.drive.omega_slow;
    const double dt = default_time_step(cfg);
    const long steps = std::lround(t_end / dt);
    const int stride = static_cast<int>(std::max(1L, steps / 20000));
    const TrajectoryTrace tr = integrate_eom(cfg, state_at_rest(sol), t_end, dt, stride);
    std::ofstream f;
    const fs::path p = s.open_output("trajectory.csv", f);
    write_trajectory_csv(f, tr);
    s.log << "time_avg_z_ion_m = " << csv::format(tr.time_avg_positions[2]) << '\n'
          << "time_avg_z_np_m = " << csv::format(tr.time_avg_positions[5]) << '\n'
          << "wrote " << p.string() << '\n';
  }
}

// --- superpose -----------------------------------------------------------

struct SuperposeArgs {
  std::optional<double> vend;
  std::optional<double> d_eq_um;
  std::string kick_nm = "1:100:50";
  std::vector<std::string> scenarios;
  bool trace = false;
};

Scenario named_scenario(const std::string& name) {
  if (name == "q800") return {"q800", 400.0, 800.0, 43e-6};
  if (name == "q300") return {"q300", 400.0, 300.0, 33e-6};
  throw ConfigError("unknown scenario '" + name + "' (expected q300 or q800)");
}

void cmd_superpose(Session& s, const SuperposeArgs& a) {
  const SimConfig cfg = load(s.common);
  std::vector<double> kicks = parse_range(a.kick_nm);
  for (double& k : kicks) k *= 1e-9;

  std::vector<Scenario> scenarios;
  std::string file = "fig4.csv";
  for (const auto& n : a.scenarios) scenarios.push_back(named_scenario(n));
  if (scenarios.empty()) {
    Scenario sc{"custom", a.vend.value_or(cfg.drive.v_end), cfg.nanoparticle.charge_e, {}};
    if (a.d_eq_um) {
      if (!(*a.d_eq_um > 0.0)) throw ConfigError("--d-eq-um must be > 0");
      sc.d_override = *a.d_eq_um * 1e-6;
    }
    scenarios.push_back(sc);
    file = "fig2.csv";
  }
  const auto rows = superposition_sweep(cfg, kicks, scenarios, s.common.jobs);
  std::ofstream f;
  const fs::path p = s.open_output(file, f);
  write_sweep_csv(f, rows);

  for (const auto& sc : scenarios) {
    double lo = INFINITY, hi = 0.0, z0 = 0.0, d = 0.0;
    for (const auto& r : rows)
      if (r.scenario == sc.name) {
        lo = std::min(lo, r.delta_z_max);
        hi = std::max(hi, r.delta_z_max);
        z0 = r.z0_np;
        d = r.d_eq;
      }
    s.log << "scenario = " << sc.name << ", v_end_V = " << csv::format(sc.v_end)
          << ", charge_e = " << csv::format(sc.charge_e) << ", d_eq_m = " << csv::format(d) << '\n'
          << "  z0_np_m = " << csv::format(z0) << '\n';
    if (!rows.empty())
      s.log << "  delta_z_max_m in [" << csv::format(lo) << ", " << csv::format(hi) << "]\n";
  }
  s.log << "wrote " << p.string() << " (" << rows.size() << " rows)\n";

  if (a.trace && !kicks.empty()) {
    const Scenario& sc = scenarios.front();
    SimConfig c = cfg;
    c.drive.v_end = sc.v_end;
    c.nanoparticle.charge_e = sc.charge_e;
    const ZeroPointData z = zero_point_data(c);
    const DisplacementTrace tr =
        superposition_size(c, sc.d_override, kick_from_displacement(kicks.back(), z.z0_ion));
    std::ofstream tf;
    const fs::path tp = s.open_output("trace.csv", tf);
    write_trace_csv(tf, tr);
    s.log << "wrote " << tp.string() << '\n';
  }
}

// --- forces --------------------------------------------------------------

struct ForcesArgs {
  double separation_um = 20.0;
};

void cmd_forces(Session& s, const ForcesArgs& a) {
  const SimConfig cfg = load(s.common);
  const ForceLedger ledger = force_ledger(cfg, a.separation_um * 1e-6);
  write_ledger_table(s.log, ledger);
  std::ofstream f;
  const fs::path p = s.open_output("forces.csv", f);
  write_ledger_csv(f, ledger);
  s.log << "wrote " << p.string() << '\n';
}

// --- sdk -----------------------------------------------------------------

struct SdkArgs {
  double b_mt = 12.0;
  double trap_mhz = 1.0;
  double lambda_down_nm = 393.366;
  double lambda_up_nm = 854.209;
  bool co_propagating = false;
  double rabi_mhz = 10.0;
  double delta_ghz = 1.0;
  double theta_khz = 10.0;
  double duration_us = 0.0;
  int samples = 257;
  bool alpha_t = false;
};

void cmd_sdk(Session& s, const SdkArgs& a) {
  const double ion_mass = s.common.config.empty() ? kCalciumIonMass : load(s.common).ion.mass;
  IonLevelScheme scheme;
  scheme.lambda_down_e = a.lambda_down_nm * 1e-9;
  scheme.lambda_up_e = a.lambda_up_nm * 1e-9;
  const double b = a.b_mt * 1e-3;
  const double omega_t = kTwoPi * a.trap_mhz * 1e6;

  const double up = zeeman_shift(SpinLevel::up, scheme, b);
  const double down = zeeman_shift(SpinLevel::down, scheme, b);
  const double eta = lamb_dicke(scheme, ion_mass, omega_t, !a.co_propagating);
  s.log << "b_field_T = " << csv::format(b) << '\n'
        << "zeeman_up_MHz = " << fmt("%.4f", up * 1e-6) << '\n'
        << "zeeman_down_MHz = " << fmt("%.4f", down * 1e-6) << '\n'
        << "splitting_MHz = " << fmt("%.4f", qubit_splitting(scheme, b) * 1e-6) << '\n'
        << "lamb_dicke = " << fmt("%.6f", eta) << '\n';

  LaserConfig laser;
  laser.k_alpha = kTwoPi / scheme.lambda_down_e;
  laser.k_beta = (a.co_propagating ? 1.0 : -1.0) * kTwoPi / scheme.lambda_up_e;
  const double g = kHbar * kTwoPi * a.rabi_mhz * 1e6;
  laser.g_alpha_down = laser.g_alpha_up = laser.g_beta_down = laser.g_beta_up = Complex(g, 0.0);
  laser.detuning_big = kTwoPi * a.delta_ghz * 1e9;
  laser.trap_omega = omega_t;
  laser.detuning_small = omega_t - kTwoPi * a.theta_khz * 1e3;

  const StarkShifts stark = ac_stark_shifts(laser);
  s.log << "stark_up_J = " << csv::format(stark.up) << '\n'
        << "stark_down_J = " << csv::format(stark.down) << '\n'
        << "prefactor_abs_per_s = " << csv::format(std::abs(sdk_prefactor(laser, eta))) << '\n'
        << "alpha_bound = " << csv::format(sdk_alpha_bound(laser, eta)) << '\n';
  for (const auto& w : adiabatic_warnings(laser)) s.log << "warning: " << w << '\n';

  if (!a.alpha_t) return;
  if (a.samples < 16) throw ConfigError("--samples must be >= 16");
  const double theta = laser.trap_omega - laser.detuning_small;
  double duration = a.duration_us * 1e-6;
  if (!(duration > 0.0)) {
    if (theta == 0.0) throw ConfigError("--duration-us required on resonance");
    duration = kTwoPi / std::abs(theta);
  }
  std::vector<double> t(static_cast<std::size_t>(a.samples));
  for (int k = 0; k < a.samples; ++k) t[k] = duration * k / (a.samples - 1);
  const auto phi = sdk_phase(laser, eta, t);
  std::ofstream f;
  const fs::path p = s.open_output("alpha.csv", f);
  csv::write_header(f, {"t_s", "alpha_re", "alpha_im", "alpha_abs", "phi_rad"});
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Complex al = sdk_alpha(laser, eta, t[k]);
    f << csv::format(t[k]) << ',' << csv::format(al.real()) << ',' << csv::format(al.imag())
      << ',' << csv::format(std::abs(al)) << ',' << csv::format(phi[k]) << '\n';
  }
  s.log << "wrote " << p.string() << " (" << t.size() << " rows)\n";
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  if (text.find(':') == std::string::npos) return {parse_number(text, "range")};
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.size() != 3) throw ConfigError("range '" + text + "' must be lo:hi:n");
  const double lo = parse_number(parts[0], "range"), hi = parse_number(parts[1], "range");
  const double nd = parse_number(parts[2], "range");
  if (!(nd >= 0.0) || nd != std::floor(nd)) throw ConfigError("range count must be an integer");
  const auto n = static_cast<std::size_t>(nd);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ion-nanoparticle co-trapping simulator", "cotrap"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common c_stab, c_eq, c_sup, c_forces, c_sdk;

  StabilityArgs sa;
  auto* stab = app.add_subcommand("stability", "Stability parameters and Floquet verdicts");
  add_common(stab, c_stab);
  stab->add_option("--particle", sa.particle, "ion | np");
  stab->add_option("--scan", sa.scan, "Stability map: a=lo:hi q=lo:hi n=points")->expected(1, 3);
  stab->add_option("--p", sa.p, "Fast-tone amplitude for --scan (default 0)");

  EquilibriumArgs ea;
  auto* eq = app.add_subcommand("equilibrium", "Axial force balance and voltage sweeps");
  add_common(eq, c_eq);
  eq->add_option("--sweep-vend", ea.sweep, "End-cap voltages lo:hi:n");
  eq->add_option("--gravity", ea.gravity, "on | off")->check(CLI::IsMember({"on", "off"}));
  eq->add_option("--coulomb", ea.coulomb, "on | off")->check(CLI::IsMember({"on", "off"}));
  eq->add_option("--branch", ea.branch, "above | below")
      ->check(CLI::IsMember({"above", "below"}))
      ->capture_default_str();
  eq->add_option("--guess-um", ea.guess_um, "Initial separation guess")->capture_default_str();
  eq->add_option("--trajectory-periods", ea.trajectory_periods,
                 "Integrate this many slow periods from rest and write trajectory.csv");

  SuperposeArgs pa;
  auto* sup = app.add_subcommand("superpose", "Conditional nanoparticle displacement sweeps");
  add_common(sup, c_sup);
  sup->add_option("--vend", pa.vend, "End-cap voltage [V]");
  sup->add_option("--d-eq-um", pa.d_eq_um, "Separation override [um]");
  sup->add_option("--kick-nm", pa.kick_nm, "Ion displacements lo:hi:n or a single value")
      ->capture_default_str();
  sup->add_option("--scenario", pa.scenarios, "q300 | q800 (repeatable)")
      ->check(CLI::IsMember({"q300", "q800"}));
  sup->add_flag("--trace", pa.trace, "Write trace.csv for the largest kick");

  ForcesArgs fa;
  auto* forces = app.add_subcommand("forces", "Interaction ledger");
  add_common(forces, c_forces);
  forces->add_option("--separation-um", fa.separation_um, "Separation [um]")
      ->capture_default_str();

  SdkArgs ka;
  auto* sdk = app.add_subcommand("sdk", "Zeeman shifts, Lamb-Dicke parameter and kick path");
  add_common(sdk, c_sdk);
  sdk->add_option("--b-mt", ka.b_mt, "Magnetic field [mT]")->capture_default_str();
  sdk->add_option("--trap-mhz", ka.trap_mhz, "Ion trap frequency omega_T / 2 pi [MHz]")
      ->capture_default_str();
  sdk->add_option("--lambda-down-nm", ka.lambda_down_nm, "|down> - |e> wavelength")
      ->capture_default_str();
  sdk->add_option("--lambda-up-nm", ka.lambda_up_nm, "|up> - |e> wavelength")
      ->capture_default_str();
  sdk->add_flag("--co-propagating", ka.co_propagating, "Beams co-propagate");
  sdk->add_option("--rabi-mhz", ka.rabi_mhz, "|g| / (2 pi hbar) for every coupling [MHz]")
      ->capture_default_str();
  sdk->add_option("--delta-ghz", ka.delta_ghz, "Single-photon detuning / 2 pi [GHz]")
      ->capture_default_str();
  sdk->add_option("--theta-khz", ka.theta_khz, "(omega_T - delta) / 2 pi [kHz]")
      ->capture_default_str();
  sdk->add_option("--duration-us", ka.duration_us, "alpha(t) window (default one loop)");
  sdk->add_option("--samples", ka.samples, "alpha(t) samples")->capture_default_str();
  sdk->add_flag("--alpha-t", ka.alpha_t, "Write alpha.csv");

  std::vector<std::string> argv_store{"cotrap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  CommandResult result;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    result.log = o.str() + er.str();
    result.exit_code = code == 0 ? kExitOk : kExitConfig;
    return result;
  }

  const Common* common = stab->parsed()     ? &c_stab
                         : eq->parsed()     ? &c_eq
                         : sup->parsed()    ? &c_sup
                         : forces->parsed() ? &c_forces
                                            : &c_sdk;
  Session s{*common, {}, {}};
  try {
    if (stab->parsed()) cmd_stability(s, sa);
    else if (eq->parsed()) cmd_equilibrium(s, ea);
    else if (sup->parsed()) cmd_superpose(s, pa);
    else if (forces->parsed()) cmd_forces(s, fa);
    else cmd_sdk(s, ka);
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfig;
    err << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    result.exit_code = kExitNumerical;
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    result.exit_code = kExitConfig;
    err << "error: " << e.what() << '\n';
  }
  out << s.log.str();
  result.log = s.log.str();
  if (result.exit_code == kExitOk) result.output_paths = std::move(s.outputs);
  return result;
}

}  // namespace cotrap::cli
