#pragma once

#include <span>
#include <utility>
#include <vector>

namespace magwell {

struct GapReport {
  int count = 0;
  std::vector<std::pair<double, double>> gaps;  // open intervals (lambda_i, lambda_{i+1})
  double min_gap = 0.0;
};

/// Counts consecutive eigenvalues lambda_i < lambda_{i+1}, both inside
/// [lo, hi], separated by at least min_gap. Eigenvalues must be sorted.
GapReport count_gaps(std::span<const double> eigenvalues, double lo, double hi, double min_gap);

/// Default min_gap: three times the solver tolerance times the largest |lambda|.
double default_min_gap(std::span<const double> eigenvalues, double solver_tol);

/// [(2k+1) h b0 + h^2 m_k, (2k+1) h b0 + h^2 M_k] for the range [m_k, M_k] of V_k.
std::pair<double, double> interval_for_band(double h, int k, double b0, double m_k, double M_k);

}  // namespace magwell
