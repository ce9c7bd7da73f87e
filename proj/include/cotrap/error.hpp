#pragma once

#include <stdexcept>
#include <string>

namespace cotrap {

/// Bad or missing input: config files, CLI arguments, violated preconditions
/// on user-facing values. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that could not produce a physical answer (no equilibrium,
/// unstable quadratic form, blow-up). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cotrap
