#include <iostream>

#include "cotrap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cotrap::cli::run(args, std::cout, std::cerr).exit_code;
}
