#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "snlcl/config.hpp"
#include "snlcl/errors.hpp"
#include "snlcl/runner.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
};

snlcl::ExperimentConfig load(const std::string& path, const Overrides& o) {
  snlcl::ExperimentConfig cfg = snlcl::load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.paths) cfg.n_paths = *o.paths;
  if (o.out) cfg.out_dir = *o.out;
  if (auto v = cfg.violations(); !v.empty()) throw snlcl::ConfigError(std::move(v));
  return cfg;
}

int report_config_error(const snlcl::ConfigError& e) {
  std::cerr << e.what() << "\n";
  return snlcl::kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic nonlocal conservation law simulator"};
  app.require_subcommand(1);
  Overrides o;
  bool quiet = false;
  std::string config_path;

  auto add_run = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "experiment configuration (INI)")->required();
    sub->add_option("--seed", o.seed, "master seed override");
    sub->add_option("--paths", o.paths, "number of Brownian paths")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--quiet", quiet, "suppress progress messages");
    return sub;
  };
  auto* solve = add_run("solve", "run the ensemble and the core invariants");
  auto* diagnose = add_run("diagnose", "solve plus every single-level diagnostic");
  auto* ladder = add_run("ladder", "solve plus the refinement studies");
  auto* list = app.add_subcommand("presets", "list the built-in presets");
  auto* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("config", config_path, "experiment configuration (INI)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : snlcl::kConfigError;
  }

  if (list->parsed()) {
    for (const auto& p : snlcl::presets()) {
      std::cout << p.name << (p.demo_only ? "  [demo only]" : "") << "\n    " << p.summary << "\n";
    }
    return snlcl::kOk;
  }

  try {
    if (validate->parsed()) {
      const auto cfg = load(config_path, o);
      std::cout << "valid: " << cfg.name << " (" << cfg.flux_model << ", " << cfg.n_cells << " cells, " << cfg.n_steps
                << " steps, " << cfg.n_paths << " paths)\n";
      return snlcl::kOk;
    }
    const auto cfg = load(config_path, o);
    const snlcl::RunMode mode = solve->parsed()      ? snlcl::RunMode::solve
                                : diagnose->parsed() ? snlcl::RunMode::diagnose
                                                     : snlcl::RunMode::ladder;
    (void)ladder;
    const auto outcome = snlcl::run_experiment(cfg, mode, quiet);
    if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";
    for (const auto& v : outcome.violations) std::cerr << "invariant violated: " << v << "\n";
    if (!quiet && outcome.exit_code != snlcl::kConfigError) {
      std::cerr << "[snlcl] manifest: " << outcome.manifest.string() << "\n";
    }
    return outcome.exit_code;
  } catch (const snlcl::ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return snlcl::kRuntimeFailure;
  }
}
