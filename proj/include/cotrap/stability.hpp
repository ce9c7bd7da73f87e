#pragma once

// Stability parameters of the dual-tone linear Paul trap and Floquet
// classification of the Hill equation
//
//   x'' + [a - 2 q cos(2T) - 2 p cos(2 n T)] x = 0,   T = Omega_s t / 2.
//
// Two kernels are provided for parameter scans: a serial reference and an
// OpenMP version. Both produce identical, (row, column)-ordered output.

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "cotrap/config.hpp"

namespace cotrap {

enum class Axis { x, y, z };
enum class Tone { slow, fast };

std::string_view to_string(Axis a);

struct StabilityTriplet {
  double a = 0.0;
  double q = 0.0;  // slow-tone amplitude
  double p = 0.0;  // fast-tone amplitude
  Axis axis = Axis::x;
  Tone reference_tone = Tone::slow;
};

struct SecularFrequencies {
  double omega_x = 0.0;  // rad/s
  double omega_y = 0.0;
  double omega_z = 0.0;
  std::string particle_label;
};

/// Pseudopotential-level parameters. The nanoparticle is referenced to the
/// slow tone; the ion to the fast tone, with the slow tone folded into `a`
/// as a static term (q = 0 for the ion).
StabilityTriplet stability_params(const SimConfig& config, Particle particle, Axis axis);

/// Full two-tone Hill coefficients referenced to the slow tone, for any
/// particle. This is what floquet_classify integrates.
StabilityTriplet hill_params(const SimConfig& config, Particle particle, Axis axis);

/// omega = (Omega/2) sqrt(a + k^2/2), k = q (slow reference) or p (fast).
/// Throws NumericalError("pseudopotential-unstable") for a negative radicand.
double secular_frequency(const StabilityTriplet& t, double omega_ref);

/// Reference drive frequency a triplet was scaled with.
double reference_omega(const SimConfig& config, const StabilityTriplet& t);

SecularFrequencies secular_frequencies(const SimConfig& config, Particle particle);

/// sqrt(2 Q kappa_end V_end / (z0^2 m)); throws on a_z <= 0.
double axial_frequency(const SimConfig& config, Particle particle);

/// 0 <= a + k^2/2 <= 1.
bool is_stable_pseudopotential(const StabilityTriplet& t);

struct ToneRatio {
  int n = 1;
  double exact = 1.0;
  bool commensurate = true;  // |exact - n| / exact <= 1%
};
ToneRatio tone_ratio(const SimConfig& config);

struct FloquetResult {
  std::array<std::array<double, 2>, 2> monodromy{};
  double trace = 0.0;
  double det = 0.0;
  bool stable = false;
  bool marginal = false;  // |trace| within 1e-9 of 2; reported unstable
  bool blow_up = false;
  double period_used = 0.0;
  long step_count = 0;
};

inline constexpr int kStepsPerFastPeriod = 200;

/// Monodromy over T in [0, pi] via fixed-step RK4. Preconditions n >= 1 and
/// steps >= 10 n (std::invalid_argument otherwise). steps = 0 selects the
/// default 200 n. Fast-referenced triplets are integrated as the single-tone
/// Mathieu equation in their own scaled time.
FloquetResult floquet_classify(const StabilityTriplet& t, int tone_ratio_n, long steps = 0);

struct ScanSpec {
  double a_min = 0.0, a_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  int a_count = 1, q_count = 1;
  double p = 0.0;
  int tone_ratio_n = 1;
  long steps = 0;
};

struct ScanPoint {
  double a = 0.0, q = 0.0, p = 0.0;
  double trace = 0.0;
  double det = 0.0;
  bool stable = false;
};

/// Scan spec with p and n taken from the particle's x-axis Hill parameters.
ScanSpec make_scan_spec(const SimConfig& config, Particle particle, double a_min, double a_max,
                        double q_min, double q_max, int a_count, int q_count);

/// Row-major in a (rows) then q (columns).
std::vector<ScanPoint> stability_scan_serial(const ScanSpec& spec);
std::vector<ScanPoint> stability_scan(const ScanSpec& spec, int jobs = 0);

/// Header `a,q,p,trace,stable`, 17 significant digits.
void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& points);

/// Human-readable notes on configurations that will not trap (never throws).
std::vector<std::string> stability_warnings(const SimConfig& config);

}  // namespace cotrap
