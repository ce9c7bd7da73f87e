#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace cotrap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> output_paths;
  std::string log;
};

/// Runs one invocation. `args` excludes the program name.
CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lo:hi:n" (n points, endpoints included) or a single value.
std::vector<double> parse_range(const std::string& text);

}  // namespace cotrap::cli
