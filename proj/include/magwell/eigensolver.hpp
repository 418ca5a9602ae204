#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magwell/discrete_operator.hpp"
#include "magwell/sparse.hpp"

namespace magwell {

enum class InnerSolver { kLdlt, kCg };

std::string to_string(InnerSolver s);
InnerSolver parse_inner_solver(const std::string& name);

struct SolverOptions {
  int m = 1;
  /// Relative residual ||Hv - lambda v|| / |lambda| required of every pair.
  double tol = 1e-8;
  /// Shift of the inverse iteration; must lie below the wanted eigenvalues.
  double shift = 0.0;
  InnerSolver inner = InnerSolver::kLdlt;
  /// Krylov basis size; 0 selects min(n, max(2m + 20, 40)).
  int max_basis = 0;
  int max_restarts = 300;
  std::uint64_t seed = 0x6d677731ULL;
  double cg_tol = 1e-13;
  int cg_max_iter = 50000;
  int workers = 1;
};

struct EigenResult {
  double h = 0.0;
  double shift = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;               // ascending
  std::vector<Eigen::VectorXcd> vectors;    // unit vectors of the stored matrix
  std::vector<double> residuals;            // ||Hv - lambda v|| / |lambda|
  int iterations = 0;                       // applications of the shifted inverse
  int restarts = 0;
  long inner_iterations = 0;                // CG iterations (0 for LDLT)
  double seconds = 0.0;
};

/// Sparse LDL^T factorization of A - sigma I that can be refactored at new
/// shifts without repeating the symbolic analysis.
class ShiftedFactorization {
 public:
  explicit ShiftedFactorization(const HermitianCsr& A);
  ~ShiftedFactorization();
  ShiftedFactorization(const ShiftedFactorization&) = delete;
  ShiftedFactorization& operator=(const ShiftedFactorization&) = delete;

  /// Factors A - sigma I. Throws ConvergenceError if the factorization breaks down.
  void factor(double sigma);
  double sigma() const { return sigma_; }
  /// Number of eigenvalues of A below sigma (Sylvester inertia of D).
  std::int64_t negative_count() const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double sigma_ = 0.0;
};

/// Eigenvalue count below E by inertia.
std::int64_t count_below(const HermitianCsr& A, double E);

/// The m eigenpairs nearest the shift from above, i.e. the m lowest when no
/// eigenvalue lies below options.shift. Thick-restart Lanczos on
/// (A - shift)^{-1} with full reorthogonalization; deterministic in options.seed.
EigenResult lowest_eigenpairs(const HermitianCsr& A, const SolverOptions& options);
EigenResult lowest_eigenpairs(const DiscreteOperator& op, const SolverOptions& options);

/// The m eigenpairs nearest sigma on either side (LDLT inner solver only).
EigenResult eigenpairs_near(const HermitianCsr& A, double sigma, int m, const SolverOptions& options);

/// Energy E in (lo, hi) splitting the eigenvalues in the window into two
/// equal halves, found by bisection on the inertia count to absolute width
/// `resolution`. Locates the center of a tight eigenvalue cluster.
double cluster_median(const HermitianCsr& A, double lo, double hi, double resolution);

}  // namespace magwell
