#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "snlcl/config.hpp"
#include "snlcl/errors.hpp"
#include "snlcl/runner.hpp"

using namespace snlcl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("snlcl_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SNLCL_BINARY) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

// small enough to run in well under a second
const char* kTiny = R"(
[experiment]
preset = smooth_nonlocal
paths = 3
[grid]
n_cells = 256
[time]
n_steps = 32
outputs = 0.25, 0.5
[regularization]
eps_flux = 0.5
eps_initial = 0.25
)";

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("presets") {
  auto all = presets();
  CHECK(all.size() >= 6);
  bool burgers = false;
  for (auto& p : all) {
    auto c = preset(p.name);
    CHECK(c.violations().empty());
    CHECK(c.demo_only == p.demo_only);
    if (p.name == "burgers_shock_demo") burgers = p.demo_only;
  }
  CHECK(burgers);
  CHECK(preset("zero_flux").n_cells == 2048);
}

TEST_CASE("parse errors are collected") {
  CHECK(mentions(errors_of("[grid]\nfoo = 1\n"), "unknown key 'foo'"));
  CHECK(mentions(errors_of("[gird]\nn_cells = 4\n"), "unknown section"));
  CHECK(mentions(errors_of("stray = 1\n"), "outside any section"));
  CHECK(mentions(errors_of("[experiment]\npreset = nowhere\n"), "unknown preset"));
  CHECK_FALSE(errors_of("[grid]\nn_cells = 0\n").empty());
  CHECK_FALSE(errors_of("[grid]\nn_cells = many\n").empty());
  CHECK_FALSE(errors_of("[time]\noutputs = 0.3\n").empty());
  CHECK(mentions(errors_of("[experiment]\ndiagnostics = vibes\n"), "unknown diagnostic"));
  // eps_flux equal to one cell is below the resolution floor
  CHECK_FALSE(errors_of("[grid]\nn_cells = 1024\n[regularization]\neps_flux = 0.015625\n").empty());
  auto two = errors_of("[grid]\nfoo = 1\nbar = 2\n");
  CHECK(two.size() == 2);
}

TEST_CASE("preset values are overridden by the document") {
  auto c = parse_config("[experiment]\npreset = zero_flux\npaths = 5\n[picard]\ntol = 1e-9\n");
  CHECK(c.preset == "zero_flux");
  CHECK(c.n_paths == 5);
  CHECK(c.picard_tol == 1e-9);
  CHECK(c.n_cells == 2048);
}

TEST_CASE("ladder configs coarsen toward the first level") {
  auto c = preset("smooth_nonlocal");
  auto reg = ladder_configs(c, "regularization");
  REQUIRE(reg.size() == 3);
  CHECK(reg[2].eps_flux == c.eps_flux);
  CHECK(reg[0].eps_flux == 4 * c.eps_flux);
  CHECK(reg[0].grid == reg[2].grid);
  auto res = ladder_configs(c, "resolution");
  CHECK(res[0].grid.n_cells() * 4 == res[2].grid.n_cells());
  CHECK(res[0].times.size() - 1 == (res[2].times.size() - 1) / 4);
}

TEST_CASE("csv and hashes") {
  Field f(Grid(0.0, 1.0, 2), {0.0, 0.1, 1.0 / 3.0});
  CHECK(field_csv(f) == "x,u\n0,0\n0.5,0.10000000000000001\n1,0.33333333333333331\n");
  Field bad(Grid(0.0, 1.0, 2), {0.0, std::numeric_limits<double>::quiet_NaN(), 0.0});
  CHECK_THROWS(field_csv(bad));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run writes hashed outputs deterministically") {
  auto cfg = parse_config(kTiny);
  cfg.diagnostics = {"residual", "commutator"};
  std::vector<std::string> digests;
  for (int rep = 0; rep < 2; ++rep) {
    cfg.out_dir = scratch("run" + std::to_string(rep)).string();
    auto r = run_experiment(cfg, RunMode::diagnose);
    REQUIRE(r.exit_code == kOk);
    auto manifest = nlohmann::json::parse(slurp(r.manifest));
    CHECK(manifest["status"] == "ok");
    std::string all;
    for (auto& f : manifest["files"]) {
      auto body = slurp(fs::path(cfg.out_dir) / f["file"].get<std::string>());
      CHECK(sha256_hex(body) == f["sha256"]);
      CHECK(body.size() == f["bytes"].get<std::size_t>());
      all += f["sha256"].get<std::string>();
    }
    CHECK(fs::exists(fs::path(cfg.out_dir) / "u_mean_step0032.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "u_path0_step0016.csv"));
    CHECK(slurp(fs::path(cfg.out_dir) / "u_mean_step0032.csv").rfind("x,u\n", 0) == 0);
    auto diag = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "diagnostics.json"));
    CHECK(diag.contains("mass_identity"));
    CHECK(diag.contains("weak_residual"));
    digests.push_back(all + slurp(r.manifest));
  }
  CHECK(digests[0] == digests[1]);
}

TEST_CASE("mass leaving the window is an invariant violation") {
  auto cfg = parse_config(R"(
[experiment]
preset = constant_drift
paths = 2
[grid]
n_cells = 256
[time]
n_steps = 32
outputs = 0.5
[regularization]
eps_flux = 0.5
eps_initial = 0.25
[flux]
speed = 10
[initial]
center = 5
radius = 1
[diagnostics]
test_center = 0
test_radius = 3
)");
  cfg.out_dir = scratch("leak").string();
  auto r = run_experiment(cfg, RunMode::solve);
  CHECK(r.exit_code == kInvariantViolation);
  CHECK_FALSE(r.violations.empty());
  CHECK(fs::exists(r.manifest));
}

TEST_CASE("command line exit codes") {
  auto dir = scratch("cli");
  write(dir / "tiny.ini", kTiny);
  write(dir / "bad.ini", "[grid]\nfoo = 1\n");
  CHECK(run_cli("presets") == 0);
  CHECK(run_cli("validate " + (dir / "tiny.ini").string()) == 0);
  CHECK(run_cli("validate " + (dir / "bad.ini").string()) == 2);
  CHECK(run_cli("validate " + (dir / "missing.ini").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("solve " + (dir / "tiny.ini").string() + " --paths 0 --quiet --out " + (dir / "o0").string()) == 2);

  const auto a = dir / "a", b = dir / "b";
  const std::string base = "solve " + (dir / "tiny.ini").string() + " --seed 77 --paths 2 --quiet --out ";
  REQUIRE(run_cli(base + a.string()) == 0);
  REQUIRE(run_cli(base + b.string()) == 0);
  for (auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["config"]["experiment"]["seed"] == 77);
  CHECK(m["config"]["experiment"]["paths"] == 2);
}

}  // TEST_SUITE
