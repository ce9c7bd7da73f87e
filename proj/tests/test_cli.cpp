#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cotrap/cli.hpp"
#include "cotrap/error.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using cotrap::cli::CommandResult;

namespace {

struct Run {
  CommandResult result;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cotrap_cli_" + name);
  fs::remove_all(p);
  return p;
}

Run invoke(std::vector<std::string> args, const fs::path& dir = {}) {
  if (!dir.empty()) {
    args.push_back("--out-dir");
    args.push_back(dir.string());
  }
  std::ostringstream out, err;
  Run r;
  r.result = cotrap::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> with_config(std::vector<std::string> args) {
  args.push_back("--config");
  args.push_back(data_path("paper_default.cfg"));
  return args;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        row.push_back(NAN);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("range parsing") {
  CHECK(cotrap::cli::parse_range("5") == std::vector<double>{5.0});
  const auto r = cotrap::cli::parse_range("200:500:4");
  CHECK(r == std::vector<double>{200.0, 300.0, 400.0, 500.0});
  CHECK(cotrap::cli::parse_range("1:2:0").empty());
  CHECK_THROWS_AS(cotrap::cli::parse_range("1:2"), cotrap::ConfigError);
  CHECK_THROWS_AS(cotrap::cli::parse_range("1:2:2.5"), cotrap::ConfigError);
  CHECK_THROWS_AS(cotrap::cli::parse_range("x"), cotrap::ConfigError);
}

TEST_CASE("help and argument errors") {
  Run h = invoke({"--help"});
  CHECK(h.result.exit_code == 0);
  for (const char* sub : {"stability", "equilibrium", "superpose", "forces", "sdk"})
    CHECK(h.out.find(sub) != std::string::npos);
  Run hs = invoke({"superpose", "--help"});
  CHECK(hs.result.exit_code == 0);
  for (const char* flag : {"--config", "--out-dir", "--seed", "--jobs", "--vend", "--kick-nm"})
    CHECK(hs.out.find(flag) != std::string::npos);
  CHECK(invoke({}).result.exit_code == 2);
  CHECK(invoke({"bogus"}).result.exit_code == 2);
  CHECK(invoke({"stability", "--convention", "radians"}).result.exit_code == 2);
  Run missing = invoke({"forces"});
  CHECK(missing.result.exit_code == 2);
  CHECK(missing.err.find("config") != std::string::npos);
  CHECK(invoke({"forces", "--config", "/nonexistent/x.cfg"}).result.exit_code == 2);
}

TEST_CASE("stability subcommand") {
  const fs::path dir = scratch("stability");
  Run r = invoke(with_config({"stability", "--particle", "np", "--convention", "angular"}), dir);
  REQUIRE(r.result.exit_code == 0);
  CHECK(r.out.find("stable = true") != std::string::npos);
  CHECK(r.result.output_paths.empty());

  Run o = invoke(with_config({"stability", "--particle", "np", "--convention", "ordinary"}), dir);
  CHECK(o.result.exit_code == 0);
  CHECK(o.out.find("stable = false") != std::string::npos);

  Run s = invoke(with_config({"stability", "--scan", "a=-0.2:0.2", "q=0:1", "n=50"}), dir);
  REQUIRE(s.result.exit_code == 0);
  REQUIRE(s.result.output_paths.size() == 1);
  std::string header;
  const auto rows = read_csv(s.result.output_paths[0], &header);
  CHECK(header == "a,q,p,trace,stable");
  CHECK(rows.size() == 2500);
  CHECK(invoke(with_config({"stability", "--scan", "n=x"}), dir).result.exit_code == 2);
  CHECK(invoke(with_config({"stability", "--particle", "electron"}), dir).result.exit_code == 2);
}

TEST_CASE("equilibrium subcommand") {
  const fs::path dir = scratch("equilibrium");
  Run r = invoke(with_config({"equilibrium"}), dir);
  REQUIRE(r.result.exit_code == 0);
  CHECK(r.out.find("d_eq_m = ") != std::string::npos);
  CHECK(r.out.find("coincident = false") != std::string::npos);

  Run off = invoke(with_config({"equilibrium", "--gravity", "off", "--coulomb", "off"}), dir);
  REQUIRE(off.result.exit_code == 0);
  CHECK(off.out.find("coincident = true") != std::string::npos);

  Run sw = invoke(with_config({"equilibrium", "--sweep-vend", "200:500:7"}), dir);
  REQUIRE(sw.result.exit_code == 0);
  REQUIRE(sw.result.output_paths.size() == 1);
  const auto rows = read_csv(sw.result.output_paths[0]);
  REQUIRE(rows.size() == 7);
  std::string header;
  read_csv(sw.result.output_paths[0], &header);
  const auto col = [&](const std::string& name) {
    std::stringstream ss(header);
    int i = 0;
    for (std::string c; std::getline(ss, c, ','); ++i)
      if (c == name) return i;
    return -1;
  };
  const int d = col("d_eq_m");
  REQUIRE(d >= 0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][d] < rows[i - 1][d]);
  CHECK(invoke(with_config({"equilibrium", "--sweep-vend", "0:100:3"}), dir).result.exit_code == 2);
}

TEST_CASE("superpose subcommand") {
  const fs::path dir = scratch("superpose");
  Run r = invoke(with_config({"superpose", "--vend", "500", "--d-eq-um", "40", "--trace"}), dir);
  REQUIRE(r.result.exit_code == 0);
  REQUIRE(r.result.output_paths.size() == 2);
  CHECK(r.result.output_paths[0].filename() == "fig2.csv");
  const auto rows = read_csv(r.result.output_paths[0]);
  REQUIRE(rows.size() == 50);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] > rows[i - 1][2]);
  const auto trace = read_csv(r.result.output_paths[1]);
  CHECK(trace.size() == 2048);

  Run z = invoke(with_config({"superpose", "--d-eq-um", "40", "--kick-nm", "0"}), dir);
  REQUIRE(z.result.exit_code == 0);
  const auto zr = read_csv(z.result.output_paths[0]);
  REQUIRE(zr.size() == 1);
  CHECK(zr[0][2] == 0.0);

  Run f4 = invoke(with_config({"superpose", "--scenario", "q800", "--scenario", "q300",
                               "--kick-nm", "10:50:5"}),
                  dir);
  REQUIRE(f4.result.exit_code == 0);
  CHECK(f4.result.output_paths[0].filename() == "fig4.csv");
  const auto fr = read_csv(f4.result.output_paths[0]);
  REQUIRE(fr.size() == 10);
  for (int i = 0; i < 5; ++i) CHECK(fr[i + 5][2] > fr[i][2]);
  CHECK(invoke(with_config({"superpose", "--d-eq-um", "-3"}), dir).result.exit_code == 2);
}

TEST_CASE("forces subcommand") {
  const fs::path dir = scratch("forces");
  Run r = invoke(with_config({"forces"}), dir);
  REQUIRE(r.result.exit_code == 0);
  const auto rows = read_csv(r.result.output_paths.at(0));
  CHECK(rows.size() == 4);
  for (const char* name : {"Coulomb", "Dipole", "Casimir", "agnetic"})
    CHECK(r.out.find(name) != std::string::npos);
  Run bad = invoke(with_config({"forces", "--separation-um", "0"}), dir);
  CHECK(bad.result.exit_code == 3);
  CHECK(bad.result.output_paths.empty());
}

TEST_CASE("sdk subcommand") {
  const fs::path dir = scratch("sdk");
  Run r = invoke({"sdk", "--b-mt", "12"}, dir);
  REQUIRE(r.result.exit_code == 0);
  CHECK(r.out.find("zeeman_up_MHz = 302.3") != std::string::npos);
  CHECK(r.out.find("zeeman_down_MHz = 167.9") != std::string::npos);
  CHECK(r.out.find("splitting_MHz = 134.3") != std::string::npos);
  Run zero = invoke({"sdk", "--b-mt", "0"}, dir);
  CHECK(zero.out.find("splitting_MHz = 0.0000") != std::string::npos);
  CHECK(invoke({"sdk", "--b-mt", "-1"}, dir).result.exit_code == 2);

  Run a = invoke({"sdk", "--alpha-t"}, dir);
  REQUIRE(a.result.exit_code == 0);
  const auto rows = read_csv(a.result.output_paths.at(0));
  REQUIRE(rows.size() == 257);
  // |alpha| rises to its extremum at half a loop.
  for (std::size_t i = 1; i <= 128; ++i) CHECK(rows[i][3] > rows[i - 1][3]);
  CHECK(std::abs(rows[256][3]) < 1e-6 * rows[128][3]);
  CHECK(invoke({"sdk", "--alpha-t", "--samples", "8"}, dir).result.exit_code == 2);
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& args : std::vector<std::vector<std::string>>{
           with_config({"stability", "--scan", "n=20", "--jobs", "2"}),
           with_config({"equilibrium", "--sweep-vend", "200:500:4", "--seed", "7"}),
           with_config({"superpose", "--kick-nm", "1:100:10", "--trace"}),
           with_config({"forces"}), {"sdk", "--alpha-t"}}) {
    Run ra = invoke(args, a), rb = invoke(args, b);
    REQUIRE(ra.result.exit_code == 0);
    REQUIRE(ra.result.output_paths.size() == rb.result.output_paths.size());
    for (std::size_t i = 0; i < ra.result.output_paths.size(); ++i)
      CHECK(slurp(ra.result.output_paths[i]) == slurp(rb.result.output_paths[i]));
  }
}
