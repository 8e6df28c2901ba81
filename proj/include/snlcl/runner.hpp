#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "snlcl/config.hpp"
#include "snlcl/grid.hpp"

namespace snlcl {

inline constexpr const char* kVersion = "0.1.0";

enum class RunMode { solve, diagnose, ladder };

/// Process exit codes of the command-line runner.
enum ExitCode : int { kOk = 0, kInvariantViolation = 1, kConfigError = 2, kRuntimeFailure = 3 };

struct RunOutcome {
  int exit_code = kOk;
  std::filesystem::path manifest;
  /// hard invariants that failed (mass, positivity, Jacobian positivity)
  std::vector<std::string> violations;
  std::string error;
};

/// Hard-invariant tolerance on the relative mass drift.
inline constexpr double kMassTolerance = 1e-3;

/// Runs the ensemble and the selected diagnostics, then writes the CSV snapshots,
/// diagnostics.json and manifest.json under cfg.out_dir. Never throws for solver
/// failures: those produce a partial manifest and a nonzero exit code.
RunOutcome run_experiment(const ExperimentConfig& cfg, RunMode mode, bool quiet = true);

/// "x,u" header followed by one row per node, 17 significant digits. Throws on non-finite values.
std::string field_csv(const Field& f);

std::string sha256_hex(const std::string& bytes);

}  // namespace snlcl
