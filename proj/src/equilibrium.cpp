#include "cotrap/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "cotrap/csv.hpp"
#include "cotrap/error.hpp"

namespace cotrap {

namespace {

// Axial spring constant 2 Q kappa_end V_end / z0^2 [N/m].
double axial_stiffness(const SimConfig& c, const ParticleSpec& p) {
  const auto& g = c.geometry;
  return 2.0 * p.charge() * g.kappa_end * c.drive.v_end / (g.z0_ax * g.z0_ax);
}

double coulomb_strength(const SimConfig& c) {
  return c.coulomb_on ? kCoulombConstant * c.ion.charge() * c.nanoparticle.charge() : 0.0;
}

double sign_of(Branch b) { return b == Branch::above ? 1.0 : -1.0; }

struct AxialSystem {
  double k_ion, k_np;  // N/m
  double w_ion, w_np;  // weights m g
  double coupling;     // k_e Q_i Q_np
  double sigma;        // +1 when the nanoparticle is above the ion

  double separation(double z_ion, double z_np) const { return sigma * (z_np - z_ion); }

  // Positions in force balance for a prescribed separation.
  double z_ion_at(double d) const { return (-sigma * coupling / (d * d) - w_ion) / k_ion; }
  double z_np_at(double d) const { return (sigma * coupling / (d * d) - w_np) / k_np; }
  double gap(double d) const { return separation(z_ion_at(d), z_np_at(d)) - d; }
};

AxialSystem make_system(const SimConfig& c, Branch b) {
  const double g = c.gravity();
  return {axial_stiffness(c, c.ion), axial_stiffness(c, c.nanoparticle), c.ion.mass * g,
          c.nanoparticle.mass * g, coulomb_strength(c), sign_of(b)};
}

void fill_residuals(const SimConfig& c, EquilibriumSolution& s) {
  if (s.coincident) {
    s.residual_force_ion = axial_stiffness(c, c.ion) * -s.z_ion - c.ion.mass * c.gravity();
    s.residual_force_np =
        axial_stiffness(c, c.nanoparticle) * -s.z_np - c.nanoparticle.mass * c.gravity();
    return;
  }
  s.residual_force_ion = axial_force(c, Particle::ion, s.z_ion, s.z_np);
  s.residual_force_np = axial_force(c, Particle::nanoparticle, s.z_np, s.z_ion);
}

bool converged(const EquilibriumSolution& s) {
  return std::abs(s.residual_force_ion) < kForceTolerance &&
         std::abs(s.residual_force_np) < kForceTolerance;
}

// Independent particles: each sits at its own gravitational sag.
EquilibriumSolution decoupled(const SimConfig& c, const AxialSystem& sys) {
  EquilibriumSolution s;
  auto sag = [](double k, double w, const char* who) {
    if (k > 0.0) return -w / k;
    if (w == 0.0) return 0.0;
    throw NumericalError(std::string("no equilibrium: ") + who + " has no axial confinement");
  };
  s.z_ion = sag(sys.k_ion, sys.w_ion, "ion");
  s.z_np = sag(sys.k_np, sys.w_np, "nanoparticle");
  s.separation = sys.separation(s.z_ion, s.z_np);
  s.coincident = s.z_ion == s.z_np;
  fill_residuals(c, s);
  return s;
}

// Residuals at the rounding level of the largest force on each particle.
bool polished(const AxialSystem& sys, const EquilibriumSolution& s) {
  const double d = sys.separation(s.z_ion, s.z_np);
  const double fc = std::abs(sys.coupling / (d * d));
  const double scale_ion = std::max({fc, std::abs(sys.w_ion), std::abs(sys.k_ion * s.z_ion)});
  const double scale_np = std::max({fc, std::abs(sys.w_np), std::abs(sys.k_np * s.z_np)});
  return std::abs(s.residual_force_ion) <= 1e-14 * scale_ion &&
         std::abs(s.residual_force_np) <= 1e-14 * scale_np;
}

bool newton(const SimConfig& c, const AxialSystem& sys, EquilibriumSolution& s) {
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    fill_residuals(c, s);
    s.iterations = it;
    if (converged(s) && polished(sys, s)) return true;
    const double d = sys.separation(s.z_ion, s.z_np);
    const double curv = 2.0 * sys.coupling / (d * d * d);
    // Jacobian of (F_ion, F_np) with respect to (z_ion, z_np).
    const double j11 = -sys.k_ion - curv, j12 = curv;
    const double j21 = curv, j22 = -sys.k_np - curv;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double dz_ion = -(j22 * s.residual_force_ion - j12 * s.residual_force_np) / det;
    const double dz_np = -(-j21 * s.residual_force_ion + j11 * s.residual_force_np) / det;
    double lambda = 1.0;
    int halvings = 0;
    while (sys.separation(s.z_ion + lambda * dz_ion, s.z_np + lambda * dz_np) <= 0.0) {
      lambda *= 0.5;
      if (++halvings > 60) return false;
    }
    const double zi = s.z_ion + lambda * dz_ion;
    const double zn = s.z_np + lambda * dz_np;
    if (zi == s.z_ion && zn == s.z_np) {
      fill_residuals(c, s);
      return converged(s);
    }
    s.z_ion = zi;
    s.z_np = zn;
  }
  fill_residuals(c, s);
  return converged(s);
}

// gap(d) is strictly decreasing in d, so bisection on the bracket is safe.
double bisect_separation(const AxialSystem& sys, int& iterations) {
  double lo = kBracketMin, hi = kBracketMax;
  double g_lo = sys.gap(lo), g_hi = sys.gap(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0))
    throw NumericalError("no equilibrium: no sign change in separation bracket [1e-8, 1e-2] m");
  for (iterations = 0; iterations < 200; ++iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sys.gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double axial_force(const SimConfig& config, Particle particle, double z_self, double z_other) {
  const ParticleSpec& p = config.particle(particle);
  double f = -axial_stiffness(config, p) * z_self - p.mass * config.gravity();
  if (config.coulomb_on) {
    const double d = z_self - z_other;
    if (d == 0.0) throw NumericalError("zero separation");
    f += coulomb_strength(config) * (d > 0.0 ? 1.0 : -1.0) / (d * d);
  }
  return f;
}

EquilibriumSolution static_equilibrium(const SimConfig& config, double initial_guess_d,
                                       Branch branch) {
  if (!(initial_guess_d > 0.0)) throw ConfigError("initial separation guess must be > 0");
  const AxialSystem sys = make_system(config, branch);
  if (sys.coupling == 0.0) return decoupled(config, sys);
  if (!(sys.k_ion > 0.0 && sys.k_np > 0.0))
    throw NumericalError("no equilibrium: both particles need axial confinement");

  EquilibriumSolution s;
  s.z_np = sys.z_np_at(initial_guess_d);
  s.z_ion = s.z_np - sys.sigma * initial_guess_d;
  if (!newton(config, sys, s)) {
    int bisect_iterations = 0;
    const double d = bisect_separation(sys, bisect_iterations);
    if (!(d > kBracketMin)) throw NumericalError("collapse: separation driven to zero");
    s = EquilibriumSolution{};
    s.z_ion = sys.z_ion_at(d);
    s.z_np = sys.z_np_at(d);
    s.used_bisection = true;
    newton(config, sys, s);
    s.iterations += bisect_iterations;
  }
  s.separation = sys.separation(s.z_ion, s.z_np);
  if (!(s.separation > 0.0)) throw NumericalError("collapse: separation driven to zero");
  fill_residuals(config, s);
  if (!converged(s))
    throw NumericalError("no equilibrium: force residual " +
                         csv::format(std::max(std::abs(s.residual_force_ion),
                                              std::abs(s.residual_force_np))) +
                         " N above tolerance");
  return s;
}

std::vector<VoltagePoint> separation_vs_voltage(const SimConfig& config,
                                                const std::vector<double>& v_end_list,
                                                double initial_guess_d, int jobs, Branch branch) {
  for (double v : v_end_list)
    if (!(v > 0.0)) throw ConfigError("end-cap voltages in a sweep must be > 0");
  std::vector<VoltagePoint> out(v_end_list.size());
  if (jobs == 1) {
    double guess = initial_guess_d;
    for (std::size_t i = 0; i < v_end_list.size(); ++i) {
      SimConfig c = config;
      c.drive.v_end = v_end_list[i];
      out[i] = {v_end_list[i], static_equilibrium(c, guess, branch)};
      if (out[i].solution.separation > 0.0) guess = out[i].solution.separation;
    }
    return out;
  }
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const long count = static_cast<long>(v_end_list.size());
  std::vector<std::string> errors(v_end_list.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    SimConfig c = config;
    c.drive.v_end = v_end_list[i];
    try {
      out[i] = {v_end_list[i], static_equilibrium(c, initial_guess_d, branch)};
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError(e);
  return out;
}

void write_equilibrium_csv(std::ostream& out, const std::vector<VoltagePoint>& points) {
  csv::write_header(out, {"v_end_V", "z_ion_m", "z_np_m", "d_eq_m", "residual_ion_N",
                          "residual_np_N", "iterations", "coincident"});
  for (const auto& p : points) {
    const auto& s = p.solution;
    out << csv::format(p.v_end) << ',' << csv::format(s.z_ion) << ',' << csv::format(s.z_np)
        << ',' << csv::format(s.separation) << ',' << csv::format(s.residual_force_ion) << ','
        << csv::format(s.residual_force_np) << ',' << s.iterations << ','
        << (s.coincident ? "true" : "false") << '\n';
  }
}

void write_equilibrium_report(std::ostream& out, const EquilibriumSolution& s) {
  out << "z_ion_m = " << csv::format(s.z_ion) << '\n'
      << "z_np_m = " << csv::format(s.z_np) << '\n'
      << "d_eq_m = " << csv::format(s.separation) << '\n'
      << "residual_force_ion_N = " << csv::format(s.residual_force_ion) << '\n'
      << "residual_force_np_N = " << csv::format(s.residual_force_np) << '\n'
      << "iterations = " << s.iterations << '\n'
      << "method = " << (s.used_bisection ? "bisection+newton" : "newton") << '\n'
      << "coincident = " << (s.coincident ? "true" : "false") << '\n';
}

PairState state_at_rest(const EquilibriumSolution& eq) {
  PairState s{};
  s[2] = eq.z_ion;
  s[5] = eq.z_np;
  return s;
}

double default_time_step(const SimConfig& config) {
  return kTwoPi / (200.0 * config.drive.omega_fast);
}

namespace {

struct Dynamics {
  const SimConfig& c;
  double qm_ion, qm_np;
  double coupling;
  double g;
  double end_term, r02;

  explicit Dynamics(const SimConfig& cfg)
      : c(cfg),
        qm_ion(charge_to_mass(cfg.ion)),
        qm_np(charge_to_mass(cfg.nanoparticle)),
        coupling(coulomb_strength(cfg)),
        g(cfg.gravity()),
        end_term(cfg.geometry.kappa_end * cfg.drive.v_end /
                 (cfg.geometry.z0_ax * cfg.geometry.z0_ax)),
        r02(cfg.geometry.r0 * cfg.geometry.r0) {}

  PairState derivative(double t, const PairState& s) const {
    const auto& d = c.drive;
    const double rf = c.geometry.kappa_rf * (d.v_slow * std::cos(d.omega_slow * t) +
                                             d.v_fast * std::cos(d.omega_fast * t)) +
                      d.v_offset;
    PairState out{};
    for (int k = 0; k < 6; ++k) out[k] = s[6 + k];
    auto trap = [&](int base, double qm) {
      out[6 + base] = qm * (rf / r02 + end_term) * s[base];
      out[6 + base + 1] = qm * (-rf / r02 + end_term) * s[base + 1];
      out[6 + base + 2] = -2.0 * qm * end_term * s[base + 2] - g;
    };
    trap(0, qm_ion);
    trap(3, qm_np);
    if (coupling != 0.0) {
      const double rx = s[3] - s[0], ry = s[4] - s[1], rz = s[5] - s[2];
      const double r2 = rx * rx + ry * ry + rz * rz;
      const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
      const double f = coupling * inv_r3;
      for (int k = 0; k < 3; ++k) {
        const double comp = f * (k == 0 ? rx : k == 1 ? ry : rz);
        out[6 + k] -= comp / c.ion.mass;
        out[9 + k] += comp / c.nanoparticle.mass;
      }
    }
    return out;
  }
};

PairState axpy(const PairState& y, double h, const PairState& k) {
  PairState out;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

bool all_finite(const PairState& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

TrajectoryTrace integrate_eom(const SimConfig& config, const PairState& initial, double t_end,
                              double dt, int record_stride) {
  if (dt == 0.0 || std::abs(dt) > kTwoPi / (50.0 * config.drive.omega_fast))
    throw ConfigError("time step must satisfy 0 < |dt| <= 2 pi / (50 Omega_f)");
  if (record_stride < 1) throw ConfigError("record stride must be >= 1");
  if (t_end * dt < 0.0) throw ConfigError("t_end and dt must have the same sign");

  const Dynamics dyn(config);
  const long steps = std::lround(t_end / dt);
  TrajectoryTrace tr;
  tr.times.reserve(static_cast<std::size_t>(steps / record_stride + 2));
  tr.states.reserve(tr.times.capacity());
  PairState y = initial;
  tr.times.push_back(0.0);
  tr.states.push_back(y);
  for (long i = 0; i < steps; ++i) {
    const double t = i * dt;
    const PairState k1 = dyn.derivative(t, y);
    const PairState k2 = dyn.derivative(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const PairState k3 = dyn.derivative(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const PairState k4 = dyn.derivative(t + dt, axpy(y, dt, k3));
    for (std::size_t j = 0; j < y.size(); ++j)
      y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (!all_finite(y))
      throw NumericalError("trajectory blow-up after t = " + csv::format(t) + " s");
    if ((i + 1) % record_stride == 0 || i + 1 == steps) {
      tr.times.push_back((i + 1) * dt);
      tr.states.push_back(y);
    }
  }

  // Average over as many whole slow periods as fit, else over the whole run.
  const double slow_period = kTwoPi / config.drive.omega_slow;
  const double span = std::abs(tr.times.back());
  const double periods = std::floor(span / slow_period * (1.0 + 1e-12));
  tr.averaging_window = periods >= 1.0 ? periods * slow_period : span;
  std::size_t last = 0;
  while (last + 1 < tr.times.size() &&
         std::abs(tr.times[last + 1]) <= tr.averaging_window * (1.0 + 1e-12))
    ++last;
  if (last == 0) {
    for (int k = 0; k < 6; ++k) tr.time_avg_positions[k] = tr.states[0][k];
    return tr;
  }
  for (int k = 0; k < 6; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < last; ++i)
      acc += 0.5 * (tr.states[i][k] + tr.states[i + 1][k]) * (tr.times[i + 1] - tr.times[i]);
    tr.time_avg_positions[k] = acc / (tr.times[last] - tr.times[0]);
    double amp = 0.0;
    for (std::size_t i = 0; i <= last; ++i)
      amp = std::max(amp, std::abs(tr.states[i][k] - tr.time_avg_positions[k]));
    tr.micromotion_amplitude[k] = amp;
  }
  return tr;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryTrace& trace) {
  csv::write_header(out, {"t", "z_ion", "z_np", "x_ion", "y_ion", "x_np", "y_np"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const auto& s = trace.states[i];
    out << csv::format(trace.times[i]) << ',' << csv::format(s[2]) << ',' << csv::format(s[5])
        << ',' << csv::format(s[0]) << ',' << csv::format(s[1]) << ',' << csv::format(s[3])
        << ',' << csv::format(s[4]) << '\n';
  }
}

double axial_energy(const SimConfig& config, const PairState& s) {
  const double k_ion = axial_stiffness(config, config.ion);
  const double k_np = axial_stiffness(config, config.nanoparticle);
  const double g = config.gravity();
  double e = 0.5 * config.ion.mass * s[8] * s[8] + 0.5 * config.nanoparticle.mass * s[11] * s[11];
  e += 0.5 * k_ion * s[2] * s[2] + 0.5 * k_np * s[5] * s[5];
  e += config.ion.mass * g * s[2] + config.nanoparticle.mass * g * s[5];
  const double coupling = coulomb_strength(config);
  if (coupling != 0.0) e += coupling / std::abs(s[5] - s[2]);
  return e;
}

}  // namespace cotrap
