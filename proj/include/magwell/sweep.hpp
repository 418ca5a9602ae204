#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magwell/config.hpp"
#include "magwell/csv.hpp"

namespace magwell {

struct SweepRecord {
  double h = 0.0;
  std::vector<double> eigenvalues;       // ascending
  std::vector<double> solver_residuals;  // relative, per pair
  std::optional<double> residual;        // quasimode ||(H - lambda) Phi|| / ||Phi||
  std::optional<double> lambda_qm;       // quasimode candidate h (lambda0 + h lambda2)
  int iterations = 0;
  double seconds = 0.0;
  std::string error;  // non-empty when this h failed

  bool ok() const { return error.empty(); }
};

struct SweepOutcome {
  std::vector<SweepRecord> records;  // one per configured h, in config order
  int solved = 0;                    // records computed in this run
  int resumed = 0;                   // records taken from an existing output file
  int failed = 0;
  /// Every record ok, solver residuals within tolerance, and (with a
  /// quasimode) lambda0 <= lambda_qm + residual.
  bool checks_pass = false;
  std::vector<std::string> check_failures;
};

struct SweepRunOptions {
  /// Incremental CSV output; empty disables writing (and resuming).
  std::string output;
  bool resume = true;
  /// Worker threads; 0 takes config.sweep.workers, overridden by MAGWELL_WORKERS.
  int workers = 0;
  std::function<void(const SweepRecord&)> on_record;
};

/// Solves one h: assemble, lowest eigenpairs, and optionally the quasimode residual.
SweepRecord solve_one(const ExperimentConfig& config, double h);

/// Runs every h of the sweep. Per-h errors are recorded and the sweep goes on.
/// Completed rows of an output file written for the same config hash are reused.
SweepOutcome run_sweep(const ExperimentConfig& config, const SweepRunOptions& options = {});

/// Columns h, lambda0..lambda{m-1}, residual, iters, seconds, then
/// lambda_qm and solver_residual. Failed rows carry NaN eigenvalues.
CsvTable sweep_table(const ExperimentConfig& config, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_table(const CsvTable& table);

/// Worker count from MAGWELL_WORKERS when set (must be a positive integer),
/// else `fallback`.
int resolve_workers(int fallback);

}  // namespace magwell
