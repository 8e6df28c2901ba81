#include "snlcl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "snlcl/errors.hpp"

namespace snlcl {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"experiment", {"name", "preset", "paths", "seed", "threads", "diagnostics"}},
      {"grid", {"x_min", "x_max", "n_cells"}},
      {"time", {"horizon", "n_steps", "outputs"}},
      {"flux", {"model", "amplitude", "speed", "half_width", "step_width", "bump_radius"}},
      {"kernel", {"radius"}},
      {"initial", {"shape", "center", "radius", "scale", "ramp"}},
      {"regularization", {"eps_flux", "eps_initial"}},
      {"picard", {"tol", "max_iters"}},
      {"diagnostics", {"commutator_eps_dx", "moment_eps_dx", "test_center", "test_radius"}},
      {"ladder", {"levels", "kind", "paths"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Collects conversion failures instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void real(const pt::ptree& sec, const std::string& where, const char* key, double& out) {
    if (auto v = sec.get_optional<std::string>(key)) {
      if (auto d = parse_real(*v)) out = *d;
      else bad(where, key, *v, "a finite number");
    }
  }

  template <class Int>
  void integer(const pt::ptree& sec, const std::string& where, const char* key, Int& out) {
    if (auto v = sec.get_optional<std::string>(key)) {
      const std::string s = trim(*v);
      char* end = nullptr;
      errno = 0;
      const long long n = std::strtoll(s.c_str(), &end, 10);
      if (s.empty() || *end != '\0' || errno == ERANGE || n < 0) {
        bad(where, key, *v, "a non-negative integer");
      } else {
        out = static_cast<Int>(n);
      }
    }
  }

  void text(const pt::ptree& sec, const char* key, std::string& out) {
    if (auto v = sec.get_optional<std::string>(key)) out = trim(*v);
  }

  void reals(const pt::ptree& sec, const std::string& where, const char* key, std::vector<double>& out) {
    if (auto v = sec.get_optional<std::string>(key)) {
      std::vector<double> values;
      for (const auto& item : split_list(*v)) {
        if (auto d = parse_real(item)) values.push_back(*d);
        else bad(where, key, item, "a list of finite numbers");
      }
      out = std::move(values);
    }
  }

 private:
  static std::optional<double> parse_real(const std::string& raw) {
    const std::string s = trim(raw);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) return std::nullopt;
    return d;
  }

  void bad(const std::string& where, const char* key, const std::string& value, const char* expected) {
    errors_.push_back(where + "." + key + " = '" + trim(value) + "' is not " + expected);
  }

  std::vector<std::string>& errors_;
};

void apply(const pt::ptree& tree, ExperimentConfig& c, std::vector<std::string>& errors) {
  Reader r(errors);
  auto section = [&](const char* name) -> const pt::ptree* {
    auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };
  if (auto s = section("experiment")) {
    r.text(*s, "name", c.name);
    r.integer(*s, "experiment", "paths", c.n_paths);
    r.integer(*s, "experiment", "seed", c.seed);
    r.integer(*s, "experiment", "threads", c.threads);
    if (auto v = s->get_optional<std::string>("diagnostics")) c.diagnostics = split_list(*v);
  }
  if (auto s = section("grid")) {
    r.real(*s, "grid", "x_min", c.x_min);
    r.real(*s, "grid", "x_max", c.x_max);
    r.integer(*s, "grid", "n_cells", c.n_cells);
  }
  if (auto s = section("time")) {
    r.real(*s, "time", "horizon", c.horizon);
    r.integer(*s, "time", "n_steps", c.n_steps);
    r.reals(*s, "time", "outputs", c.output_times);
  }
  if (auto s = section("flux")) {
    r.text(*s, "model", c.flux_model);
    r.real(*s, "flux", "amplitude", c.flux_params.amplitude);
    r.real(*s, "flux", "speed", c.flux_params.speed);
    r.real(*s, "flux", "half_width", c.flux_params.half_width);
    r.real(*s, "flux", "step_width", c.flux_params.step_width);
    r.real(*s, "flux", "bump_radius", c.flux_params.bump_radius);
  }
  if (auto s = section("kernel")) r.real(*s, "kernel", "radius", c.kernel_radius);
  if (auto s = section("initial")) {
    std::string shape;
    r.text(*s, "shape", shape);
    if (shape == "bump") c.initial.shape = InitialDatum::Shape::bump;
    else if (shape == "plateau") c.initial.shape = InitialDatum::Shape::plateau;
    else if (!shape.empty()) errors.push_back("initial.shape = '" + shape + "' is not one of bump, plateau");
    r.real(*s, "initial", "center", c.initial.center);
    r.real(*s, "initial", "radius", c.initial.radius);
    r.real(*s, "initial", "scale", c.initial.scale);
    r.real(*s, "initial", "ramp", c.initial.ramp);
  }
  if (auto s = section("regularization")) {
    r.real(*s, "regularization", "eps_flux", c.eps_flux);
    r.real(*s, "regularization", "eps_initial", c.eps_initial);
  }
  if (auto s = section("picard")) {
    r.real(*s, "picard", "tol", c.picard_tol);
    r.integer(*s, "picard", "max_iters", c.picard_max_iters);
  }
  if (auto s = section("diagnostics")) {
    r.reals(*s, "diagnostics", "commutator_eps_dx", c.commutator_eps_dx);
    r.reals(*s, "diagnostics", "moment_eps_dx", c.moment_eps_dx);
    r.real(*s, "diagnostics", "test_center", c.test_center);
    r.real(*s, "diagnostics", "test_radius", c.test_radius);
  }
  if (auto s = section("ladder")) {
    r.integer(*s, "ladder", "levels", c.ladder_levels);
    r.text(*s, "kind", c.ladder_kind);
    r.integer(*s, "ladder", "paths", c.ladder_paths);
  }
  if (auto s = section("output")) r.text(*s, "dir", c.out_dir);
}

std::vector<std::size_t> output_indices(const std::vector<double>& output_times, double horizon, std::size_t n_steps,
                                        std::vector<std::string>* errors) {
  std::vector<std::size_t> out;
  const double dt = horizon / static_cast<double>(n_steps);
  for (double t : output_times) {
    const double k = std::round(t / dt);
    if (!(t > 0.0) || t > horizon * (1.0 + 1e-12) || std::abs(k * dt - t) > 1e-9 * std::max(1.0, horizon)) {
      if (errors) errors->push_back("output time " + std::to_string(t) + " is not a positive multiple of dt = " +
                                    std::to_string(dt) + " within the horizon");
      continue;
    }
    out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

bool wants(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end();
}

std::string shape_name(InitialDatum::Shape s) { return s == InitialDatum::Shape::bump ? "bump" : "plateau"; }

}  // namespace

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names = {"hypothesis", "moments",     "commutator", "residual",
                                                 "uniqueness", "convergence", "steepening"};
  return names;
}

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> v;
  const bool grid_ok = std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max && n_cells >= 2;
  if (!grid_ok) {
    v.push_back("grid needs finite x_min < x_max and n_cells >= 2 (got x_min = " + std::to_string(x_min) +
                ", x_max = " + std::to_string(x_max) + ", n_cells = " + std::to_string(n_cells) + ")");
  }
  const bool time_ok = horizon > 0.0 && n_steps >= 1;
  if (!time_ok) {
    v.push_back("time needs horizon > 0 and n_steps >= 1 (got horizon = " + std::to_string(horizon) +
                ", n_steps = " + std::to_string(n_steps) + ")");
  }
  if (time_ok) output_indices(output_times, horizon, n_steps, &v);
  if (n_paths < 1) v.push_back("experiment.paths must be >= 1");
  for (const auto& d : diagnostics) {
    const auto& known = diagnostic_names();
    if (std::find(known.begin(), known.end(), d) == known.end()) {
      v.push_back("unknown diagnostic '" + d + "'");
    }
  }
  if (wants(*this, "moments") && n_paths < 2) v.push_back("the moments diagnostic needs at least 2 paths");
  if (ladder_levels < 2) v.push_back("ladder.levels = " + std::to_string(ladder_levels) + " must be >= 2");
  if (ladder_kind != "regularization" && ladder_kind != "resolution") {
    v.push_back("ladder.kind = '" + ladder_kind + "' is not one of regularization, resolution");
  }
  if (ladder_paths < 1) v.push_back("ladder.paths must be >= 1");
  for (double e : commutator_eps_dx) {
    if (!(e >= 4.0)) v.push_back("commutator width " + std::to_string(e) + " dx is below 4 dx");
  }
  for (double e : moment_eps_dx) {
    if (!(e >= 4.0)) v.push_back("moment width " + std::to_string(e) + " dx is below 4 dx");
  }
  if (commutator_eps_dx.empty()) v.push_back("diagnostics.commutator_eps_dx is empty");
  if (moment_eps_dx.empty()) v.push_back("diagnostics.moment_eps_dx is empty");
  if (grid_ok && (!(test_radius > 0.0) || test_center - test_radius <= x_min || test_center + test_radius >= x_max)) {
    v.push_back("test function support [" + std::to_string(test_center - test_radius) + ", " +
                std::to_string(test_center + test_radius) + "] must lie strictly inside the grid");
  }

  const auto& models = builtin_models();
  if (std::none_of(models.begin(), models.end(), [&](const ModelInfo& m) { return m.name == flux_model; })) {
    v.push_back("unknown flux model '" + flux_model + "'");
    return v;
  }
  if (!grid_ok || !time_ok || !(kernel_radius > 0.0)) {
    if (!(kernel_radius > 0.0)) v.push_back("kernel.radius must be positive");
    return v;
  }
  try {
    const SolverConfig sc = to_solver_config(*this);
    for (auto& s : sc.violations()) v.push_back(std::move(s));
  } catch (const Error& e) {
    v.push_back(e.what());
    return v;
  }
  std::vector<std::string> kinds;
  if (wants(*this, "uniqueness")) kinds.push_back(ladder_kind);
  if (wants(*this, "convergence") && ladder_kind != "resolution") kinds.push_back("resolution");
  if (!v.empty()) kinds.clear();
  for (const auto& kind : kinds) {
    try {
      const auto ladder = ladder_configs(*this, kind);
      for (std::size_t l = 0; l < ladder.size(); ++l) {
        for (auto& s : ladder[l].violations()) v.push_back(kind + " ladder level " + std::to_string(l) + ": " + s);
      }
    } catch (const ConfigError& e) {
      for (const auto& s : e.violations()) v.push_back(s);
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  return v;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("malformed configuration: ") + e.what()});
  }
  std::vector<std::string> errors;
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (body.empty() && !body.data().empty()) {
      errors.push_back("key '" + section + "' is outside any section");
      continue;
    }
    if (it == schema().end()) {
      errors.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) errors.push_back("unknown key '" + key + "' in [" + section + "]");
    }
  }

  ExperimentConfig cfg;
  if (auto name = tree.get_optional<std::string>("experiment.preset")) {
    const std::string p = trim(*name);
    const auto all = presets();
    if (std::any_of(all.begin(), all.end(), [&](const PresetInfo& i) { return i.name == p; })) {
      cfg = preset(p);
    } else {
      errors.push_back("unknown preset '" + p + "'");
    }
  }
  apply(tree, cfg, errors);
  if (errors.empty()) errors = cfg.violations();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<PresetInfo> presets() {
  return {
      {"zero_flux", "pure noise transport; the solution is the datum translated by B_t", false},
      {"constant_drift", "constant drift plus noise; exact translation oracle", false},
      {"smooth_nonlocal", "smooth compactly supported nonlocal flux, 256 paths", false},
      {"linear_fgp2", "irregular linear flux b(x) with jumps; uniqueness ladder over the regularization", false},
      {"discontinuous_flux", "flux with jumps in x, usable only after mollification", false},
      {"burgers_shock_demo", "F = z with a narrow kernel; gradients steepen, outside the flux hypotheses", true},
  };
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.preset = name;
  c.output_times = {0.125, 0.25, 0.375, 0.5};
  c.test_center = 0.0;
  c.test_radius = 4.0;
  if (name == "zero_flux") {
    c.summary = presets()[0].summary;
    c.flux_model = "zero_flux";
    c.n_cells = 2048;
    c.n_steps = 512;
    c.initial.radius = 3.0;
    c.eps_initial = 4.0 * c.dx();
    c.eps_flux = 4.0 * c.dx();
    c.n_paths = 64;
    return c;
  }
  if (name == "constant_drift") {
    c.summary = presets()[1].summary;
    c.flux_model = "constant_drift";
    c.flux_params.speed = 1.0;
    c.initial.center = -1.0;
    c.test_center = -0.5;
    c.n_paths = 64;
    return c;
  }
  if (name == "smooth_nonlocal") {
    c.summary = presets()[2].summary;
    c.flux_model = "smooth_nonlocal";
    c.n_paths = 256;
    c.diagnostics = {"hypothesis"};
    return c;
  }
  if (name == "linear_fgp2") {
    c.summary = presets()[3].summary;
    c.flux_model = "linear_irregular";
    c.flux_params.half_width = 1.0;
    c.flux_params.step_width = 0.05;
    c.n_paths = 64;
    c.ladder_paths = 64;
    c.diagnostics = {"uniqueness"};
    return c;
  }
  if (name == "discontinuous_flux") {
    c.summary = presets()[4].summary;
    c.flux_model = "discontinuous_flux";
    c.flux_params.half_width = 1.0;
    c.n_paths = 64;
    return c;
  }
  if (name == "burgers_shock_demo") {
    c.summary = presets()[5].summary;
    c.demo_only = true;
    c.flux_model = "burgers_like";
    c.n_cells = 2048;
    c.n_steps = 512;
    c.kernel_radius = 0.25;
    c.initial.shape = InitialDatum::Shape::plateau;
    c.initial.center = -2.0;
    c.initial.radius = 1.5;
    c.initial.ramp = 1.0;
    c.initial.scale = 1.0;
    c.eps_flux = 4.0 * c.dx();
    c.eps_initial = 4.0 * c.dx();
    c.test_center = -2.0;
    c.n_paths = 64;
    c.diagnostics = {"steepening"};
    return c;
  }
  throw ConfigError({"unknown preset '" + name + "'"});
}

SolverConfig to_solver_config(const ExperimentConfig& c) {
  SolverConfig s;
  s.grid = Grid(c.x_min, c.x_max, c.n_cells);
  s.times = uniform_time_grid(c.horizon, c.n_steps);
  s.kernel = BumpKernel(0.0, c.kernel_radius);
  s.flux = make_builtin(c.flux_model, c.flux_params);
  s.initial = c.initial;
  s.eps_flux = c.eps_flux;
  s.eps_initial = c.eps_initial;
  s.picard_tol = c.picard_tol;
  s.picard_max_iters = c.picard_max_iters;
  s.output_indices = output_indices(c.output_times, c.horizon, c.n_steps, nullptr);
  return s;
}

std::vector<SolverConfig> ladder_configs(const ExperimentConfig& c, const std::string& kind) {
  if (kind != "regularization" && kind != "resolution") throw ConfigError({"unknown ladder kind '" + kind + "'"});
  std::vector<SolverConfig> out;
  for (std::size_t l = 0; l < c.ladder_levels; ++l) {
    const std::size_t factor = std::size_t{1} << (c.ladder_levels - 1 - l);
    ExperimentConfig level = c;
    level.eps_flux = c.eps_flux * static_cast<double>(factor);
    level.eps_initial = c.eps_initial * static_cast<double>(factor);
    if (kind == "resolution") {
      if (c.n_cells % factor != 0 || c.n_steps % factor != 0 || c.n_cells / factor < 2) {
        throw ConfigError({"resolution ladder: n_cells and n_steps must be divisible by " + std::to_string(factor)});
      }
      level.n_cells = c.n_cells / factor;
      level.n_steps = c.n_steps / factor;
    }
    out.push_back(to_solver_config(level));
  }
  return out;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {
      {"name", c.name},
      {"preset", c.preset},
      {"demo_only", c.demo_only},
      {"grid", {{"x_min", c.x_min}, {"x_max", c.x_max}, {"n_cells", c.n_cells}}},
      {"time", {{"horizon", c.horizon}, {"n_steps", c.n_steps}, {"outputs", c.output_times}}},
      {"flux",
       {{"model", c.flux_model},
        {"amplitude", c.flux_params.amplitude},
        {"speed", c.flux_params.speed},
        {"half_width", c.flux_params.half_width},
        {"step_width", c.flux_params.step_width},
        {"bump_radius", c.flux_params.bump_radius}}},
      {"kernel", {{"radius", c.kernel_radius}}},
      {"initial",
       {{"shape", shape_name(c.initial.shape)},
        {"center", c.initial.center},
        {"radius", c.initial.radius},
        {"scale", c.initial.scale},
        {"ramp", c.initial.ramp}}},
      {"regularization", {{"eps_flux", c.eps_flux}, {"eps_initial", c.eps_initial}}},
      {"picard", {{"tol", c.picard_tol}, {"max_iters", c.picard_max_iters}}},
      {"experiment", {{"paths", c.n_paths}, {"seed", c.seed}, {"diagnostics", c.diagnostics}}},
      {"diagnostics",
       {{"commutator_eps_dx", c.commutator_eps_dx},
        {"moment_eps_dx", c.moment_eps_dx},
        {"test_center", c.test_center},
        {"test_radius", c.test_radius}}},
      {"ladder", {{"levels", c.ladder_levels}, {"kind", c.ladder_kind}, {"paths", c.ladder_paths}}},
  };
}

}  // namespace snlcl
