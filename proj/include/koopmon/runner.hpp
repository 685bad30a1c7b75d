#pragma once

// Experiment orchestration and persistence.
//
// A run directory holds
//   manifest.json     resolved configuration, version, wall time, status
//   timeseries.tsv    t P1 P2 purity bx by bz energy drift (every step)
//   snapshots/        ensembles or wavefunctions and density fields
//   waterfall.tsv     configuration-space densities (when enabled)
//   summary.json      final populations, purity and energy drift

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "koopmon/config.hpp"
#include "koopmon/diagnostics.hpp"

namespace koopmon {

struct RunOutcome {
  int exit_code = 0;  ///< 0 ok, 2 solver error
  std::string error;
  DiagnosticsRecord final_record;
  double max_drift = 0.0;
};

/// Runs the configured method and writes the artifact tree into `out`.
/// Solver errors are caught, recorded in the manifest (status "partial")
/// and reported through the exit code.
RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out);

std::vector<DiagnosticsRecord> read_timeseries(const std::filesystem::path& file);

struct RunComparison {
  std::string reference;
  std::string other;
  std::size_t aligned_points = 0;
  double max_dP1 = 0.0;
  double max_dpurity = 0.0;
  double final_dP1 = 0.0;
  double final_dpurity = 0.0;
  /// Per-particle max |dq|, |dp| of the final ensembles; negative when one
  /// of the runs has no particles.
  double max_dq = -1.0;
  double max_dp = -1.0;
};

/// Aligns every run with the first one. Throws ConfigError for runs of
/// different models or unreadable directories.
std::vector<RunComparison> compare(const std::vector<std::filesystem::path>& dirs);
void print_comparison(std::ostream& os, const std::vector<RunComparison>& rows);

/// Version string stamped into manifests.
std::string code_version();

}  // namespace koopmon
