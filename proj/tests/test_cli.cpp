#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "pipeflow/config.hpp"

using namespace pipeflow;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "pipeflow_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

// runs the CLI binary; returns its exit code
int run_cli(const std::string& args) {
#ifndef PIPEFLOW_CLI_PATH
#error "PIPEFLOW_CLI_PATH must be defined by the build"
#endif
  const std::string cmd = std::string(PIPEFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parser: full round trip of keys") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "full.conf";
  write_file(conf, R"(# full config
section.kind = rectangle
section.a = 1.0
section.b = 2.0
section.modes = 7
nu = 0.5
flux.terms = 1.0:0.5:0 ; 0:0.25:0
time.dt = 0.01
time.T = 4
march.projection = off
sweep.frequencies = 0, 1, 10
probes = 0.5,0.5 ; 0.25,0.75
gate.c = 2.5
gate.nu0 = on
out.dir = /tmp/pipeflow_cli_test/out
)");
  const auto cfg = parse_config(conf);
  CHECK(cfg.kind == SectionKind::rectangle);
  CHECK(cfg.b == doctest::Approx(2.0));
  CHECK(cfg.modes == 7);
  CHECK(cfg.nu == doctest::Approx(0.5));
  REQUIRE(cfg.flux_terms.has_value());
  CHECK(cfg.flux_terms->size() == 3);  // cos pair plus the mean term
  CHECK(cfg.dt == doctest::Approx(0.01));
  CHECK(!cfg.projection);
  CHECK(cfg.sweep_frequencies.size() == 3);
  REQUIRE(cfg.probes.size() == 2);
  CHECK(cfg.probes[1][1] == doctest::Approx(0.75));
  CHECK(cfg.gate_c == doctest::Approx(2.5));
  CHECK(cfg.gate_nu0);
}

TEST_CASE("config parser: diagnostics carry the line number") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "bad.conf";

  write_file(conf, "section.kind = rectangle\nwhatever.key = 3\n");
  try {
    parse_config(conf);
    FAIL("expected an error for the unknown key");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
    CHECK(msg.find("whatever.key") != std::string::npos);
  }

  write_file(conf, "nu = abc\n");
  CHECK_THROWS(parse_config(conf));
  write_file(conf, "nu = -2\n");
  CHECK_THROWS(parse_config(conf));
}

TEST_CASE("config: missing flux file is reported with its path") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "missing_flux.conf";
  write_file(conf, "section.kind = rectangle\nflux.file = /nonexistent/flux.txt\n");
  const auto cfg = parse_config(conf);
  try {
    cfg.load_flux();
    FAIL("expected missing-file error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("/nonexistent/flux.txt") != std::string::npos);
  }
}

TEST_CASE("cli end to end: eigs writes the basis CSV with the analytic lambda") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "eigs.conf";
  const fs::path out = dir / "out_eigs";
  write_file(conf, "section.kind = rectangle\nsection.a = 1\nsection.b = 1\n"
                   "section.modes = 5\nnu = 1\n");
  REQUIRE(run_cli("eigs --config " + conf.string() + " --out " + out.string()) == 0);

  std::ifstream csv(out / "eigs.csv");
  REQUIRE(csv.good());
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header == "k,lambda,beta");
  std::istringstream row(first);
  std::string cell;
  std::getline(row, cell, ',');
  CHECK(cell == "1");
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-12));
  CHECK(fs::exists(out / "carrier.json"));
}

TEST_CASE("cli end to end: exit codes distinguish input errors") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "flow_missing.conf";
  write_file(conf, "section.kind = rectangle\nsection.modes = 5\n"
                   "flux.file = /nonexistent/flux.txt\n");
  CHECK(run_cli("flow --config " + conf.string() + " --out " + (dir / "o1").string()) == 2);
  CHECK(run_cli("flow --config /nonexistent.conf") == 2);

  const fs::path good = dir / "modal.conf";
  write_file(good, "section.kind = rectangle\nsection.modes = 21\nnu = 1\n"
                   "sweep.frequencies = 0, 1, 10\n");
  CHECK(run_cli("modal --config " + good.string() + " --out " + (dir / "o2").string()) == 0);
  CHECK(fs::exists(dir / "o2" / "gain_sweep.csv"));
}

TEST_CASE("cli end to end: march and gate produce their artifacts") {
  const fs::path dir = temp_dir();
  const fs::path conf = dir / "march.conf";
  write_file(conf, "section.kind = rectangle\nsection.modes = 11\nnu = 1\n"
                   "flux.terms = 1.0:0.5:0\ntime.dt = 0.01\ntime.T = 3\n"
                   "gate.c = 1\n");
  const fs::path out = dir / "o3";
  REQUIRE(run_cli("march --config " + conf.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "march_report.json"));

  REQUIRE(run_cli("gate --config " + conf.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "gate.json"));
}
