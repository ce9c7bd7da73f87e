#include "cotrap/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cotrap/error.hpp"
#include "json.hpp"

namespace cotrap {

using nlohmann::json;

std::string_view to_string(Particle p) {
  return p == Particle::ion ? "ion" : "nanoparticle";
}

std::string_view to_string(FrequencyConvention c) {
  return c == FrequencyConvention::angular ? "angular" : "ordinary";
}

std::optional<Particle> parse_particle(std::string_view s) {
  if (s == "ion" || s == "i") return Particle::ion;
  if (s == "np" || s == "nanoparticle") return Particle::nanoparticle;
  return std::nullopt;
}

std::optional<FrequencyConvention> parse_convention(std::string_view s) {
  if (s == "angular") return FrequencyConvention::angular;
  if (s == "ordinary") return FrequencyConvention::ordinary;
  return std::nullopt;
}

double charge_to_mass(const ParticleSpec& p) { return p.charge() / p.mass; }

namespace {

std::string key_path(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

void reject_unknown(const json& obj, std::string_view section,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key_path(section, key) + "'");
  }
}

const json& section(const json& root, std::string_view name) {
  auto it = root.find(std::string(name));
  if (it == root.end()) throw ConfigError("missing field '" + std::string(name) + "'");
  if (!it->is_object()) throw ConfigError("'" + std::string(name) + "' must be an object");
  return *it;
}

double number(const json& obj, std::string_view sec, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ConfigError("missing field '" + key_path(sec, key) + "'");
  if (!it->is_number()) throw ConfigError("unparseable number for '" + key_path(sec, key) + "'");
  double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError("non-finite value for '" + key_path(sec, key) + "'");
  return v;
}

std::optional<double> optional_number(const json& obj, std::string_view sec, std::string_view key) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return number(obj, sec, key);
}

bool flag(const json& obj, std::string_view sec, std::string_view key, bool fallback) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError("'" + key_path(sec, key) + "' must be true or false");
  return it->get<bool>();
}

// Exactly one of <stem>_hz / <stem>_rads must be present.
double frequency(const json& drive, std::string_view stem, FrequencyConvention convention) {
  const std::string hz = std::string(stem) + "_hz";
  const std::string rads = std::string(stem) + "_rads";
  const bool has_hz = drive.contains(hz);
  const bool has_rads = drive.contains(rads);
  if (has_hz && has_rads)
    throw ConfigError("both 'drive." + hz + "' and 'drive." + rads + "' given; use exactly one");
  if (has_rads) return number(drive, "drive", rads);
  if (!has_hz) throw ConfigError("missing field 'drive." + hz + "' (or 'drive." + rads + "')");
  const double value = number(drive, "drive", hz);
  return convention == FrequencyConvention::ordinary ? kTwoPi * value : value;
}

ParticleSpec particle_spec(const json& root, std::string_view name) {
  const json& obj = section(root, name);
  reject_unknown(obj, name,
                 {"label", "mass", "charge_e", "radius", "rel_permittivity",
                  "polarizability_volume", "magnetic_moment"});
  ParticleSpec p;
  p.mass = number(obj, name, "mass");
  p.charge_e = number(obj, name, "charge_e");
  p.radius = optional_number(obj, name, "radius").value_or(0.0);
  p.rel_permittivity = optional_number(obj, name, "rel_permittivity").value_or(1.0);
  p.polarizability_volume = optional_number(obj, name, "polarizability_volume");
  p.magnetic_moment = optional_number(obj, name, "magnetic_moment");
  if (auto it = obj.find("label"); it != obj.end()) {
    if (!it->is_string()) throw ConfigError("'" + key_path(name, "label") + "' must be a string");
    p.label = it->get<std::string>();
  } else {
    p.label = std::string(name);
  }
  return p;
}

void require(bool ok, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError("'" + key + "' " + rule);
}

void validate_particle(const ParticleSpec& p, std::string_view name) {
  require(p.mass > 0.0, key_path(name, "mass"), "must be > 0");
  require(p.radius >= 0.0, key_path(name, "radius"), "must be >= 0");
  require(p.radius == 0.0 || p.rel_permittivity >= 1.0, key_path(name, "rel_permittivity"),
          "must be >= 1 for a finite-size particle");
  if (p.polarizability_volume)
    require(*p.polarizability_volume >= 0.0, key_path(name, "polarizability_volume"),
            "must be >= 0");
  if (p.magnetic_moment)
    require(*p.magnetic_moment >= 0.0, key_path(name, "magnetic_moment"), "must be >= 0");
}

}  // namespace

void validate(const SimConfig& c) {
  validate_particle(c.ion, "ion");
  validate_particle(c.nanoparticle, "nanoparticle");
  require(c.geometry.r0 > 0.0, "geometry.r0", "must be > 0");
  require(c.geometry.z0_ax > 0.0, "geometry.z0", "must be > 0");
  require(c.geometry.kappa_rf > 0.0 && c.geometry.kappa_rf <= 1.0, "geometry.kappa_rf",
          "must lie in (0, 1]");
  require(c.geometry.kappa_end > 0.0 && c.geometry.kappa_end <= 1.0, "geometry.kappa_end",
          "must lie in (0, 1]");
  require(c.drive.omega_slow > 0.0, "drive.f_slow", "must be > 0");
  require(c.drive.omega_fast > c.drive.omega_slow, "drive.f_fast", "must exceed drive.f_slow");
  require(c.drive.v_slow >= 0.0, "drive.v_slow", "must be >= 0");
  require(c.drive.v_fast >= 0.0, "drive.v_fast", "must be >= 0");
  require(c.drive.v_end >= 0.0, "drive.v_end", "must be >= 0");
  require(c.ion.mass < c.nanoparticle.mass, "ion.mass", "must be smaller than nanoparticle.mass");
  require(c.constants.g_grav() >= 0.0, "options.g_grav", "must be >= 0");
}

SimConfig parse_config(std::string_view json_text, std::optional<FrequencyConvention> convention) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(root, "", {"geometry", "drive", "ion", "nanoparticle", "options"});

  SimConfig c;
  FrequencyConvention file_convention = FrequencyConvention::ordinary;
  double g_grav = kStandardGravity;
  if (root.contains("options")) {
    const json& opt = section(root, "options");
    reject_unknown(opt, "options", {"frequency_convention", "gravity", "coulomb", "g_grav"});
    if (auto it = opt.find("frequency_convention"); it != opt.end()) {
      auto parsed = it->is_string() ? parse_convention(it->get<std::string>()) : std::nullopt;
      if (!parsed)
        throw ConfigError("'options.frequency_convention' must be \"angular\" or \"ordinary\"");
      file_convention = *parsed;
    }
    c.gravity_on = flag(opt, "options", "gravity", true);
    c.coulomb_on = flag(opt, "options", "coulomb", true);
    g_grav = optional_number(opt, "options", "g_grav").value_or(kStandardGravity);
  }
  const FrequencyConvention used = convention.value_or(file_convention);
  c.constants = PhysicalConstants(g_grav);

  const json& geo = section(root, "geometry");
  reject_unknown(geo, "geometry", {"r0", "z0", "kappa_rf", "kappa_end"});
  c.geometry.r0 = number(geo, "geometry", "r0");
  c.geometry.z0_ax = number(geo, "geometry", "z0");
  c.geometry.kappa_rf = number(geo, "geometry", "kappa_rf");
  c.geometry.kappa_end = number(geo, "geometry", "kappa_end");

  const json& drive = section(root, "drive");
  reject_unknown(drive, "drive",
                 {"f_slow_hz", "f_slow_rads", "f_fast_hz", "f_fast_rads", "v_slow", "v_fast",
                  "v_offset", "v_end"});
  c.drive.omega_slow = frequency(drive, "f_slow", used);
  c.drive.omega_fast = frequency(drive, "f_fast", used);
  c.drive.v_slow = number(drive, "drive", "v_slow");
  c.drive.v_fast = number(drive, "drive", "v_fast");
  c.drive.v_offset = number(drive, "drive", "v_offset");
  c.drive.v_end = number(drive, "drive", "v_end");
  c.drive.frequency_convention = used;

  c.ion = particle_spec(root, "ion");
  c.nanoparticle = particle_spec(root, "nanoparticle");

  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path,
                      std::optional<FrequencyConvention> convention) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), convention);
}

namespace {

json particle_json(const ParticleSpec& p) {
  json j = {{"label", p.label},
            {"mass", p.mass},
            {"charge_e", p.charge_e},
            {"radius", p.radius},
            {"rel_permittivity", p.rel_permittivity}};
  if (p.polarizability_volume) j["polarizability_volume"] = *p.polarizability_volume;
  if (p.magnetic_moment) j["magnetic_moment"] = *p.magnetic_moment;
  return j;
}

}  // namespace

std::string serialize_config(const SimConfig& c) {
  json root;
  root["geometry"] = {{"r0", c.geometry.r0},
                      {"z0", c.geometry.z0_ax},
                      {"kappa_rf", c.geometry.kappa_rf},
                      {"kappa_end", c.geometry.kappa_end}};
  root["drive"] = {{"f_slow_rads", c.drive.omega_slow},
                   {"f_fast_rads", c.drive.omega_fast},
                   {"v_slow", c.drive.v_slow},
                   {"v_fast", c.drive.v_fast},
                   {"v_offset", c.drive.v_offset},
                   {"v_end", c.drive.v_end}};
  root["ion"] = particle_json(c.ion);
  root["nanoparticle"] = particle_json(c.nanoparticle);
  root["options"] = {{"frequency_convention", std::string(to_string(c.drive.frequency_convention))},
                     {"gravity", c.gravity_on},
                     {"coulomb", c.coulomb_on},
                     {"g_grav", c.constants.g_grav()}};
  return root.dump(2) + "\n";
}

}  // namespace cotrap
