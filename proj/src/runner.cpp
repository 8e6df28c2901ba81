#include "snlcl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <openssl/evp.h>

#include "snlcl/diagnostics.hpp"
#include "snlcl/errors.hpp"

namespace snlcl {

namespace fs = std::filesystem;

namespace {

struct Artifact {
  std::string file;
  std::string role;
  std::string sha256;
  std::size_t bytes = 0;
  nlohmann::json extra = nlohmann::json::object();
};

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& file, const std::string& role, const std::string& content,
             nlohmann::json extra = nlohmann::json::object()) {
    std::ofstream out(dir_ / file, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write " + (dir_ / file).string());
    files_.push_back({file, role, sha256_hex(content), content.size(), std::move(extra)});
  }

  nlohmann::json listing() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : files_) {
      nlohmann::json e = {{"file", f.file}, {"role", f.role}, {"sha256", f.sha256}, {"bytes", f.bytes}};
      e.update(f.extra);
      a.push_back(std::move(e));
    }
    return a;
  }

  const fs::path& dir() const noexcept { return dir_; }

 private:
  fs::path dir_;
  std::vector<Artifact> files_;
};

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::solve: return "solve";
    case RunMode::diagnose: return "diagnose";
    case RunMode::ladder: return "ladder";
  }
  return "?";
}

std::set<std::string> active_diagnostics(const ExperimentConfig& cfg, RunMode mode) {
  std::set<std::string> a(cfg.diagnostics.begin(), cfg.diagnostics.end());
  if (mode == RunMode::diagnose) {
    a.insert({"hypothesis", "moments", "commutator", "residual"});
    if (cfg.demo_only) a.insert("steepening");
  }
  if (mode == RunMode::ladder) a.insert({"uniqueness", "convergence"});
  return a;
}

std::string step_tag(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step%04zu", k);
  return buf;
}

Field ensemble_mean(const std::vector<PathSummary>& paths, std::size_t j) {
  const Field& first = paths.front().outputs[j];
  std::vector<double> sum(first.size(), 0.0);
  for (const auto& p : paths) {
    const auto v = p.outputs[j].values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }
  for (double& s : sum) s /= static_cast<double>(paths.size());
  return Field(first.grid(), std::move(sum), first.time_tag());
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

class Log {
 public:
  explicit Log(bool quiet) : quiet_(quiet) {}
  void operator()(const std::string& msg) const {
    if (!quiet_) std::cerr << "[snlcl] " << msg << "\n";
  }

 private:
  bool quiet_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string field_csv(const Field& f) {
  std::string out = "x,u\n";
  char buf[64];
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.grid().node(static_cast<std::ptrdiff_t>(i));
    if (!std::isfinite(f[i])) throw Error("non-finite value at x = " + std::to_string(x) + "; refusing to serialize");
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, f[i]);
    out += buf;
  }
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, RunMode mode, bool quiet) {
  RunOutcome outcome;
  const Log log(quiet);
  const fs::path dir(cfg.out_dir);
  outcome.manifest = dir / "manifest.json";

  nlohmann::json manifest = {{"artifact", "snlcl"},
                             {"versions", {{"snlcl", kVersion}, {"manifest_format", 1}}},
                             {"mode", mode_name(mode)},
                             {"config", to_json(cfg)}};
  if (auto v = cfg.violations(); !v.empty()) {
    outcome.exit_code = kConfigError;
    outcome.error = ConfigError(v).what();
    return outcome;
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    outcome.exit_code = kRuntimeFailure;
    outcome.error = "cannot create output directory " + dir.string() + ": " + ec.message();
    return outcome;
  }
  Writer writer(dir);
  DiagnosticsReport report;

  auto finish = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["files"] = writer.listing();
    if (!outcome.error.empty()) manifest["error"] = outcome.error;
    if (!outcome.violations.empty()) manifest["violations"] = outcome.violations;
    std::ofstream out(outcome.manifest, std::ios::binary);
    out << dump(manifest);
  };

  try {
    const SolverConfig sc = to_solver_config(cfg);
    const auto active = active_diagnostics(cfg, mode);
    const auto want = [&](const char* name) { return active.contains(name); };

    EnsembleHooks hooks;
    if (want("commutator")) {
      for (double e : cfg.commutator_eps_dx) hooks.commutator_eps.push_back(e * sc.grid.dx());
    }
    if (want("residual")) hooks.test_function = BumpKernel(cfg.test_center, cfg.test_radius);

    log("solving " + std::to_string(cfg.n_paths) + " paths of '" + cfg.name + "'");
    const EnsembleResult ens = run_ensemble(sc, cfg.seed, cfg.n_paths, hooks, cfg.threads);
    const BoundsReport& b = ens.bounds;

    // snapshots
    const auto outputs = sc.outputs();
    for (std::size_t j = 0; j < outputs.size(); ++j) {
      const double t = sc.times[outputs[j]];
      const std::string tag = step_tag(outputs[j]);
      writer.write("u_mean_" + tag + ".csv", "snapshot", field_csv(ensemble_mean(ens.paths, j)),
                   {{"statistic", "mean"}, {"time", t}, {"n_paths", ens.paths.size()}});
      writer.write("u_path0_" + tag + ".csv", "snapshot", field_csv(ens.paths.front().outputs[j]),
                   {{"statistic", "exemplar"}, {"time", t}, {"path_index", ens.paths.front().path_index}});
    }

    // invariants
    report.add("mass_identity", "pathwise mass identity of the boundedness step",
               {{"max_relative_drift", b.max_mass_drift}, {"tolerance", kMassTolerance},
                {"holds", b.max_mass_drift <= kMassTolerance}});
    report.add("positivity", "nonnegative data stay nonnegative under the pushforward",
               {{"min_value", b.min_value}, {"holds", b.min_value >= 0.0}});
    report.add("jacobian_positivity", "flow of diffeomorphisms",
               {{"min_jacobian", b.min_jacobian}, {"holds", b.min_jacobian > 0.0}});
    report.add("l2_bound", "L2 bound through the inverse-Jacobian moment", describe(b));
    {
      std::vector<std::vector<double>> inv;
      for (const auto& p : ens.paths) inv.push_back(p.inverse_jacobians.back());
      nlohmann::json m = {{"time", sc.times[outputs.back()]}, {"n_paths", ens.paths.size()}};
      if (inv.size() >= 2) {
        const MomentField mf = inverse_moment_from_samples(sc.grid, inv);
        m["max"] = mf.max_mean();
        m["argmax_x"] = sc.grid.node(static_cast<std::ptrdiff_t>(mf.argmax()));
        m["std_error_at_max"] = mf.std_error[mf.argmax()];
      } else {
        m["max"] = *std::max_element(inv.front().begin(), inv.front().end());
      }
      report.add("jacobian_inverse_moment", "inverse-Jacobian moment lemma", m);
    }
    {
      std::size_t converged = 0;
      int max_iters = 0;
      double max_final = 0.0;
      double mean_iters = 0.0;
      for (const auto& p : ens.paths) {
        converged += p.converged ? 1 : 0;
        max_iters = std::max(max_iters, p.iterations_used);
        mean_iters += p.iterations_used;
        if (!p.distances.empty()) max_final = std::max(max_final, p.distances.back());
      }
      report.add("picard", "regularized iteration of the existence construction",
                 {{"converged_paths", converged},
                  {"n_paths", ens.paths.size()},
                  {"max_iterations", max_iters},
                  {"mean_iterations", mean_iters / static_cast<double>(ens.paths.size())},
                  {"max_final_distance", max_final},
                  {"tolerance", cfg.picard_tol}});
    }
    report.add("boundary_excursions", "truncation of the whole line to the grid window",
               {{"count", b.boundary_excursions}});

    if (want("hypothesis")) {
      log("sampling flux hypotheses");
      const double z_bound = sc.kernel.max_value() * norms(ens.initial).l1;
      const HypothesisBox box{0.0, cfg.horizon, cfg.x_min, cfg.x_max, -z_bound, z_bound};
      report.add("hypothesis", "flux hypotheses (five norms)", describe(verify_hypothesis(sc.flux, box)));
    }
    if (want("commutator")) {
      std::vector<std::vector<double>> sq;
      for (const auto& p : ens.paths) sq.push_back(p.commutator_squares);
      nlohmann::json j = describe(reduce_commutator(hooks.commutator_eps, sq));
      j["eps_in_dx"] = cfg.commutator_eps_dx;
      report.add("commutator", "commutator estimate of the uniqueness proof", j);
    }
    if (want("residual")) {
      std::vector<double> r;
      for (const auto& p : ens.paths) r.push_back(*p.residual);
      double ss = 0.0, mx = 0.0;
      for (double v : r) {
        ss += v * v;
        mx = std::max(mx, std::abs(v));
      }
      report.add("weak_residual", "Ito weak formulation",
                 {{"test_function", {{"center", cfg.test_center}, {"radius", cfg.test_radius}}},
                  {"time", cfg.horizon},
                  {"rms", std::sqrt(ss / static_cast<double>(r.size()))},
                  {"max_abs", mx},
                  {"mean", mean_estimate(r).mean}});
    }
    if (want("moments")) {
      log("inverse-Jacobian moments over the flux width ladder");
      std::vector<double> eps;
      for (double e : cfg.moment_eps_dx) eps.push_back(e * sc.grid.dx());
      nlohmann::json j = describe(moment_stability(sc, eps, cfg.seed, cfg.n_paths, cfg.threads));
      j["eps_in_dx"] = cfg.moment_eps_dx;
      report.add("moment_stability", "inverse-Jacobian moment lemma, uniformity in the regularization", j);
    }
    if (want("uniqueness")) {
      log("uniqueness ladder (" + cfg.ladder_kind + ", " + std::to_string(cfg.ladder_levels) + " levels)");
      const auto ladder = ladder_configs(cfg, cfg.ladder_kind);
      nlohmann::json j = describe(uniqueness_proxy(ladder, cfg.seed, cfg.ladder_paths, cfg.threads));
      j["kind"] = cfg.ladder_kind;
      nlohmann::json widths = nlohmann::json::array();
      for (const auto& c : ladder) widths.push_back({{"eps_flux", c.eps_flux}, {"eps_initial", c.eps_initial},
                                                     {"dx", c.grid.dx()}, {"dt", c.times[1] - c.times[0]}});
      j["levels"] = widths;
      report.add("uniqueness", "uniqueness theorem, as collapse of approximations on shared paths", j);
    }
    if (want("convergence")) {
      log("resolution ladder");
      ConvergenceOptions opt;
      if (cfg.flux_model == "zero_flux") opt.translation_speed = 0.0;
      if (cfg.flux_model == "constant_drift") opt.translation_speed = cfg.flux_params.speed;
      opt.test_function = BumpKernel(cfg.test_center, cfg.test_radius);
      report.add("convergence", "refinement orders of the scheme",
                 describe(convergence_study(ladder_configs(cfg, "resolution"), opt, cfg.seed, cfg.ladder_paths,
                                            cfg.threads)));
    }
    if (want("steepening")) {
      nlohmann::json j = describe(burgers_steepening(sc, cfg.seed, 0));
      j["gated"] = false;
      j["demo_only"] = true;
      report.add("steepening", "shock formation remark for the local limit", j);
    }

    if (!(b.max_mass_drift <= kMassTolerance)) {
      outcome.violations.push_back("relative mass drift " + std::to_string(b.max_mass_drift) + " exceeds " +
                                   std::to_string(kMassTolerance));
    }
    if (!(b.min_value >= 0.0)) outcome.violations.push_back("negative solution value " + std::to_string(b.min_value));
    if (!(b.min_jacobian > 0.0)) outcome.violations.push_back("non-positive Jacobian");

    writer.write("diagnostics.json", "diagnostics", dump(report.document()));
    outcome.exit_code = outcome.violations.empty() ? kOk : kInvariantViolation;
    finish(outcome.violations.empty() ? "ok" : "invariant_violation");
  } catch (const ConfigError& e) {
    outcome.exit_code = kConfigError;
    outcome.error = e.what();
    finish("config_error");
  } catch (const StepSizeError& e) {
    outcome.exit_code = kInvariantViolation;
    outcome.error = e.what();
    outcome.violations.push_back(e.what());
    finish("invariant_violation");
  } catch (const std::exception& e) {
    outcome.exit_code = kRuntimeFailure;
    outcome.error = e.what();
    finish("failed");
  }
  return outcome;
}

}  // namespace snlcl
