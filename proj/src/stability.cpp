#include "cotrap/stability.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "cotrap/csv.hpp"
#include "cotrap/error.hpp"

namespace cotrap {

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

namespace {

struct FieldTerms {
  double end_term;     // kappa_end V_end / z0^2
  double offset_term;  // V_off / r0^2
  double slow_term;    // kappa_rf V_s / r0^2
  double fast_term;    // kappa_rf V_f / r0^2
};

FieldTerms field_terms(const SimConfig& c) {
  const auto& g = c.geometry;
  const auto& d = c.drive;
  const double r02 = g.r0 * g.r0;
  return {g.kappa_end * d.v_end / (g.z0_ax * g.z0_ax), d.v_offset / r02,
          g.kappa_rf * d.v_slow / r02, g.kappa_rf * d.v_fast / r02};
}

// y flips the sign of the offset and of both RF tones.
double axis_sign(Axis axis) { return axis == Axis::y ? -1.0 : 1.0; }

}  // namespace

StabilityTriplet hill_params(const SimConfig& config, Particle particle, Axis axis) {
  const ParticleSpec& sp = config.particle(particle);
  const double qm = charge_to_mass(sp);
  const double om2 = config.drive.omega_slow * config.drive.omega_slow;
  const FieldTerms f = field_terms(config);
  StabilityTriplet t;
  t.axis = axis;
  t.reference_tone = Tone::slow;
  if (axis == Axis::z) {
    t.a = 8.0 * qm * f.end_term / om2;
    return t;
  }
  const double s = axis_sign(axis);
  t.a = -(s * f.offset_term + f.end_term) * 4.0 * qm / om2;
  t.q = s * 2.0 * qm * f.slow_term / om2;
  t.p = s * 2.0 * qm * f.fast_term / om2;
  return t;
}

StabilityTriplet stability_params(const SimConfig& config, Particle particle, Axis axis) {
  if (particle == Particle::nanoparticle) return hill_params(config, particle, axis);

  const double qm = charge_to_mass(config.ion);
  const double of2 = config.drive.omega_fast * config.drive.omega_fast;
  const FieldTerms f = field_terms(config);
  StabilityTriplet t;
  t.axis = axis;
  t.reference_tone = Tone::fast;
  if (axis == Axis::z) {
    t.a = 8.0 * qm * f.end_term / of2;
    return t;
  }
  const double s = axis_sign(axis);
  t.a = -(s * f.offset_term + f.end_term) * 4.0 * qm / of2 - s * 4.0 * qm * f.slow_term / of2;
  t.q = 0.0;
  t.p = s * 2.0 * qm * f.fast_term / of2;
  return t;
}

double reference_omega(const SimConfig& config, const StabilityTriplet& t) {
  return t.reference_tone == Tone::slow ? config.drive.omega_slow : config.drive.omega_fast;
}

namespace {

double radicand(const StabilityTriplet& t) {
  const double k = t.reference_tone == Tone::slow ? t.q : t.p;
  return t.a + 0.5 * k * k;
}

}  // namespace

double secular_frequency(const StabilityTriplet& t, double omega_ref) {
  const double r = radicand(t);
  if (r < 0.0) throw NumericalError("pseudopotential-unstable");
  return 0.5 * omega_ref * std::sqrt(r);
}

SecularFrequencies secular_frequencies(const SimConfig& config, Particle particle) {
  SecularFrequencies out;
  out.particle_label = config.particle(particle).label;
  const auto tx = stability_params(config, particle, Axis::x);
  const auto ty = stability_params(config, particle, Axis::y);
  out.omega_x = secular_frequency(tx, reference_omega(config, tx));
  out.omega_y = secular_frequency(ty, reference_omega(config, ty));
  out.omega_z = axial_frequency(config, particle);
  return out;
}

double axial_frequency(const SimConfig& config, Particle particle) {
  const ParticleSpec& sp = config.particle(particle);
  const auto& g = config.geometry;
  const double a_z = 2.0 * sp.charge() * g.kappa_end * config.drive.v_end /
                     (g.z0_ax * g.z0_ax * sp.mass);
  if (!(a_z > 0.0)) throw NumericalError("no axial confinement");
  return std::sqrt(a_z);
}

bool is_stable_pseudopotential(const StabilityTriplet& t) {
  const double r = radicand(t);
  return r >= 0.0 && r <= 1.0;
}

ToneRatio tone_ratio(const SimConfig& config) {
  ToneRatio r;
  r.exact = config.drive.omega_fast / config.drive.omega_slow;
  r.n = std::max(1, static_cast<int>(std::lround(r.exact)));
  r.commensurate = std::abs(r.exact - r.n) / r.exact <= 0.01;
  return r;
}

namespace {

struct HillCoefficient {
  double a, q, p;
  double two_n;
  double operator()(double T) const {
    double w = a - 2.0 * q * std::cos(2.0 * T);
    if (p != 0.0) w -= 2.0 * p * std::cos(two_n * T);
    return w;
  }
};

// Two fundamental solutions (x1, v1, x2, v2) of x'' = -w(T) x.
struct Fundamental {
  double x1 = 1.0, v1 = 0.0, x2 = 0.0, v2 = 1.0;
};

}  // namespace

FloquetResult floquet_classify(const StabilityTriplet& t, int tone_ratio_n, long steps) {
  if (tone_ratio_n < 1) throw std::invalid_argument("floquet_classify: n must be >= 1");
  HillCoefficient w{t.a, t.q, t.p, 2.0 * tone_ratio_n};
  int n_eff = tone_ratio_n;
  if (t.reference_tone == Tone::fast) {
    w = {t.a, t.p, 0.0, 2.0};
    n_eff = 1;
  }
  if (steps == 0) steps = static_cast<long>(kStepsPerFastPeriod) * n_eff;
  if (steps < 10L * n_eff) throw std::invalid_argument("floquet_classify: steps must be >= 10 n");

  const double period = kPi;
  const double h = period / static_cast<double>(steps);
  Fundamental s;
  FloquetResult r;
  r.period_used = period;
  r.step_count = steps;

  double w0 = w(0.0);
  for (long i = 0; i < steps; ++i) {
    const double T = i * h;
    const double wm = w(T + 0.5 * h);
    const double w1 = w(T + h);
    // RK4 applied to both columns; the system is linear so each column is
    // advanced independently with the same coefficient samples.
    auto advance = [&](double& x, double& v) {
      const double k1x = v, k1v = -w0 * x;
      const double k2x = v + 0.5 * h * k1v, k2v = -wm * (x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v, k3v = -wm * (x + 0.5 * h * k2x);
      const double k4x = v + h * k3v, k4v = -w1 * (x + h * k3x);
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    };
    advance(s.x1, s.v1);
    advance(s.x2, s.v2);
    w0 = w1;
    if ((i & 1023) == 0 && !std::isfinite(s.x1 + s.v1 + s.x2 + s.v2)) {
      r.blow_up = true;
      break;
    }
  }
  if (!std::isfinite(s.x1 + s.v1 + s.x2 + s.v2)) r.blow_up = true;

  r.monodromy = {{{s.x1, s.x2}, {s.v1, s.v2}}};
  r.trace = s.x1 + s.v2;
  r.det = s.x1 * s.v2 - s.x2 * s.v1;
  if (r.blow_up) {
    r.stable = false;
    return r;
  }
  const double at = std::abs(r.trace);
  r.marginal = std::abs(at - 2.0) <= 1e-9;
  r.stable = at < 2.0 - 1e-9;
  return r;
}

ScanSpec make_scan_spec(const SimConfig& config, Particle particle, double a_min, double a_max,
                        double q_min, double q_max, int a_count, int q_count) {
  ScanSpec s;
  s.a_min = a_min;
  s.a_max = a_max;
  s.q_min = q_min;
  s.q_max = q_max;
  s.a_count = a_count;
  s.q_count = q_count;
  s.p = hill_params(config, particle, Axis::x).p;
  s.tone_ratio_n = tone_ratio(config).n;
  return s;
}

namespace {

void check_spec(const ScanSpec& s) {
  if (s.a_count < 1 || s.q_count < 1) throw ConfigError("scan grid must be at least 1x1");
  if (!std::isfinite(s.a_min + s.a_max + s.q_min + s.q_max + s.p))
    throw ConfigError("scan ranges must be finite");
}

double grid_value(double lo, double hi, int count, int i) {
  return count == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(count - 1);
}

ScanPoint scan_point(const ScanSpec& s, int row, int col) {
  StabilityTriplet t;
  t.a = grid_value(s.a_min, s.a_max, s.a_count, row);
  t.q = grid_value(s.q_min, s.q_max, s.q_count, col);
  t.p = s.p;
  const FloquetResult f = floquet_classify(t, s.tone_ratio_n, s.steps);
  return {t.a, t.q, t.p, f.trace, f.det, f.stable};
}

}  // namespace

std::vector<ScanPoint> stability_scan_serial(const ScanSpec& spec) {
  check_spec(spec);
  std::vector<ScanPoint> out;
  out.reserve(static_cast<std::size_t>(spec.a_count) * spec.q_count);
  for (int i = 0; i < spec.a_count; ++i)
    for (int j = 0; j < spec.q_count; ++j) out.push_back(scan_point(spec, i, j));
  return out;
}

std::vector<ScanPoint> stability_scan(const ScanSpec& spec, int jobs) {
  check_spec(spec);
  const long total = static_cast<long>(spec.a_count) * spec.q_count;
  std::vector<ScanPoint> out(static_cast<std::size_t>(total));
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads) if (threads != 1)
  for (long k = 0; k < total; ++k)
    out[static_cast<std::size_t>(k)] =
        scan_point(spec, static_cast<int>(k / spec.q_count), static_cast<int>(k % spec.q_count));
  return out;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& points) {
  csv::write_header(out, {"a", "q", "p", "trace", "stable"});
  for (const auto& pt : points)
    out << csv::format(pt.a) << ',' << csv::format(pt.q) << ',' << csv::format(pt.p) << ','
        << csv::format(pt.trace) << ',' << (pt.stable ? "true" : "false") << '\n';
}

std::vector<std::string> stability_warnings(const SimConfig& config) {
  std::vector<std::string> notes;
  const ToneRatio r = tone_ratio(config);
  if (!r.commensurate)
    notes.push_back("fast/slow frequency ratio " + csv::format(r.exact) +
                    " is not an integer; Floquet analysis uses n = " + std::to_string(r.n));
  for (Particle p : {Particle::ion, Particle::nanoparticle}) {
    for (Axis ax : {Axis::x, Axis::y}) {
      const auto t = stability_params(config, p, ax);
      if (!is_stable_pseudopotential(t))
        notes.push_back(std::string(to_string(p)) + " " + std::string(to_string(ax)) +
                        "-axis fails the pseudopotential stability condition");
    }
    if (config.drive.v_end <= 0.0 || config.particle(p).charge_e <= 0.0)
      notes.push_back(std::string(to_string(p)) + " has no axial confinement");
  }
  return notes;
}

}  // namespace cotrap
