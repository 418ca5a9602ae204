#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "magwell/discrete_operator.hpp"
#include "magwell/eigensolver.hpp"
#include "magwell/field.hpp"
#include "magwell/geometry.hpp"
#include "magwell/trial_state.hpp"

namespace magwell {

struct FieldSpec {
  /// uniform | parabolic | miniwell | expression | csv
  std::string name = "parabolic";
  double b0 = 1.0;
  double beta2 = 2.0;
  double mu0 = 2.0;
  double mu2 = 2.0;
  std::string expression;  // b(s,t) for name = expression
  std::string path;        // CSV with columns s, t, b for name = csv
};

struct MetricSpec {
  /// flat | circle | sphere-equator | hyperbolic-horocycle | csv
  std::string name = "flat";
  double rho = 2.0;
  std::string path;  // CSV with columns s, t, a
  double s_min = -4.0, s_max = 4.0;
  double t_halfwidth = 2.5;
};

struct GridConfig {
  /// Fixed node counts; 0 sizes the grid per h from spacing_factor.
  int Ns = 0, Nt = 0;
  /// Spacing = spacing_factor * sqrt(h / b0) / 8 when sizing per h (<= 1).
  double spacing_factor = 1.0;
  int stencil_order = 2;  // 2 or 4
};

struct SweepConfig {
  std::string scenario = "groundstate";
  std::vector<double> h = {0.12, 0.1, 0.07, 0.05, 0.03, 0.02};  // descending
  int k = 0;
  int j = 0;
  int m = 1;  // eigenpairs per h
  bool quasimode = false;
  std::string output = "sweep.csv";
  int workers = 1;
};

struct SolverConfig {
  double tol = 1e-8;
  /// Shift = shift_factor * h * b0.
  double shift_factor = 0.9;
  InnerSolver inner = InnerSolver::kLdlt;
  int max_basis = 0;
  int max_restarts = 300;
  std::uint64_t seed = 0x6d677731ULL;
};

struct EnvelopeConfig {
  double beta = 0.125;
  int order = 2;
  std::optional<double> x;  // well point; default from the well data
  double cutoff_flat_fraction = 0.8;
  double transverse_support = 0.0;
  double max_mass_loss = 1e-6;
};

struct ExperimentConfig {
  FieldSpec field;
  MetricSpec metric;
  GridConfig grid;
  SweepConfig sweep;
  SolverConfig solver;
  EnvelopeConfig envelope;

  /// Checks ranges, the descending h list, and grid resolution for every h.
  void validate() const;
};

/// INI text with sections [field] [metric] [grid] [sweep] [solver] [envelope].
/// Unknown sections or keys are rejected with ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical INI rendering; parse_config(print_config(c)) reproduces c.
std::string print_config(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical rendering, used to key resumable output.
std::uint64_t config_hash(const ExperimentConfig& config);

SAxis make_axis(const ExperimentConfig& config);
FieldProfile make_field(const ExperimentConfig& config);
BandMetric make_metric(const ExperimentConfig& config);
/// Grid over [s_min, s_max] x [-T, T] for this h.
GridSpec make_grid(const ExperimentConfig& config, double h, double b0);
AssemblyOptions make_assembly_options(const ExperimentConfig& config);
SolverOptions make_solver_options(const ExperimentConfig& config, double h, double b0);
TrialOptions make_trial_options(const ExperimentConfig& config);

/// "0.1, 0.05" -> {0.1, 0.05}.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace magwell
