#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "cotrap/config.hpp"

inline std::string data_path(const std::string& name) {
  return std::string(COTRAP_DATA_DIR) + "/" + name;
}

inline cotrap::SimConfig reference_config(
    std::optional<cotrap::FrequencyConvention> conv = std::nullopt) {
  return cotrap::load_config(data_path("paper_default.cfg"), conv);
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}
