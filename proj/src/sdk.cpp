#include "cotrap/sdk.hpp"

#include <cmath>
#include <cstdio>

#include "cotrap/constants.hpp"
#include "cotrap/error.hpp"

namespace cotrap {

namespace {

constexpr double kSeriesThreshold = 1e-6;

double theta(const LaserConfig& l) { return l.trap_omega - l.detuning_small; }

}  // namespace

double zeeman_shift(SpinLevel level, const IonLevelScheme& s, double b_field) {
  if (b_field < 0.0) throw ConfigError("magnetic field must be >= 0");
  const double gm = level == SpinLevel::up ? s.g_lande_up * s.m_j_up
                                           : s.g_lande_down * s.m_j_down;
  return kBohrMagneton * gm * b_field / kPlanck;
}

double qubit_splitting(const IonLevelScheme& s, double b_field) {
  return zeeman_shift(SpinLevel::up, s, b_field) - zeeman_shift(SpinLevel::down, s, b_field);
}

double lamb_dicke(const IonLevelScheme& s, double ion_mass, double trap_omega,
                  bool counter_propagating) {
  if (!(trap_omega > 0.0)) throw ConfigError("trap frequency must be > 0");
  if (!(ion_mass > 0.0)) throw ConfigError("ion mass must be > 0");
  if (!(s.lambda_down_e > 0.0) || !(s.lambda_up_e > 0.0))
    throw ConfigError("transition wavelengths must be > 0");
  const double k1 = kTwoPi / s.lambda_down_e;
  const double k2 = kTwoPi / s.lambda_up_e;
  const double dk = counter_propagating ? k1 + k2 : std::abs(k1 - k2);
  return dk * std::sqrt(kHbar / (2.0 * ion_mass * trap_omega));
}

Complex sdk_prefactor(const LaserConfig& l, double eta) {
  if (l.detuning_big == 0.0) throw ConfigError("detuning Delta must be nonzero");
  const double k = l.k_beta - l.k_alpha;
  const double phi = l.phi_beta - l.phi_alpha;
  const Complex phase = std::polar(1.0, k * l.ion_position - phi);
  return eta * std::conj(l.g_alpha_down) * l.g_beta_up / (kHbar * kHbar * l.detuning_big) * phase;
}

Complex sdk_alpha(const LaserConfig& l, double eta, double t) {
  const Complex p = sdk_prefactor(l, eta);
  const double th = theta(l);
  const double x = th * t;
  if (std::abs(x) < kSeriesThreshold) {
    // (1 - e^{ix}) / (i theta) = -t (1 + ix/2 - x^2/6 + ...)
    return -p * t * Complex(1.0 - x * x / 6.0, x / 2.0);
  }
  const Complex i(0.0, 1.0);
  return p / (i * th) * (1.0 - std::exp(i * x));
}

double sdk_alpha_bound(const LaserConfig& l, double eta) {
  const double th = theta(l);
  if (th == 0.0) return INFINITY;
  return 2.0 * std::abs(sdk_prefactor(l, eta)) / std::abs(th);
}

std::vector<double> path_phase(std::span<const Complex> path) {
  std::vector<double> phi(path.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    // Im of the trapezoid (a* + b*)(b - a) / 2 reduces to Im(a* b).
    acc += std::imag(std::conj(path[k - 1]) * path[k]);
    phi[k] = acc;
  }
  return phi;
}

std::vector<double> sdk_phase(const LaserConfig& l, double eta, std::span<const double> t) {
  if (t.size() < 16) throw ConfigError("phase grid needs at least 16 points");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * std::abs(h))
      throw ConfigError("phase grid must be uniform");
  std::vector<Complex> path(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) path[k] = sdk_alpha(l, eta, t[k]);
  return path_phase(path);
}

StarkShifts ac_stark_shifts(const LaserConfig& l) {
  if (l.detuning_big == 0.0) throw ConfigError("detuning Delta must be nonzero");
  const double denom = kHbar * l.detuning_big;
  return {-(std::norm(l.g_alpha_up) + std::norm(l.g_beta_up)) / denom,
          -(std::norm(l.g_alpha_down) + std::norm(l.g_beta_down)) / denom};
}

std::vector<std::string> adiabatic_warnings(const LaserConfig& l) {
  std::vector<std::string> out;
  const struct {
    const char* name;
    Complex g;
  } couplings[] = {{"g_alpha_down", l.g_alpha_down},
                   {"g_alpha_up", l.g_alpha_up},
                   {"g_beta_down", l.g_beta_down},
                   {"g_beta_up", l.g_beta_up}};
  for (const auto& c : couplings) {
    const double rate = std::abs(c.g) / kHbar;
    if (rate == 0.0) continue;
    const double ratio = std::abs(l.detuning_big) / rate;
    if (ratio < 10.0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "|Delta| / (|%s|/hbar) = %.3g < 10", c.name, ratio);
      out.emplace_back(buf);
    }
  }
  return out;
}

KickSpec kick_from_alpha(Complex alpha, double z0_ion) {
  if (std::abs(alpha) > kMaxKickMagnitude)
    throw ConfigError("kick magnitude |beta| exceeds 20");
  KickSpec k;
  k.beta = alpha;
  k.delta_z_ion = 2.0 * z0_ion * alpha.real();
  return k;
}

KickSpec kick_from_displacement(double delta_z_ion, double z0_ion) {
  if (!(z0_ion > 0.0)) throw ConfigError("ion zero-point width must be > 0");
  return kick_from_alpha(Complex(delta_z_ion / (2.0 * z0_ion), 0.0), z0_ion);
}

}  // namespace cotrap
