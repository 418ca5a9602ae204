#include "magwell/gaps.hpp"

#include <algorithm>
#include <cmath>

#include "magwell/csv.hpp"
#include "magwell/error.hpp"

namespace magwell {

GapReport count_gaps(std::span<const double> ev, double lo, double hi, double min_gap) {
  if (!(lo < hi)) throw DomainError("gap interval needs lo < hi");
  if (!(min_gap > 0.0)) throw DomainError("min_gap must be positive");
  if (!std::is_sorted(ev.begin(), ev.end())) throw DomainError("eigenvalues must be sorted");
  GapReport r;
  r.min_gap = min_gap;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    const double a = ev[i], b = ev[i + 1];
    if (a < lo || b > hi) continue;
    if (b - a >= min_gap) r.gaps.emplace_back(a, b);
  }
  r.count = static_cast<int>(r.gaps.size());
  return r;
}

double default_min_gap(std::span<const double> ev, double solver_tol) {
  double scale = 0.0;
  for (double v : ev) scale = std::max(scale, std::abs(v));
  return 3.0 * solver_tol * std::max(scale, 1e-300);
}

std::pair<double, double> interval_for_band(double h, int k, double b0, double m_k, double M_k) {
  if (!(h > 0.0) || !(b0 > 0.0)) throw DomainError("h and b0 must be positive");
  if (k < 0) throw DomainError("band index must be >= 0");
  if (m_k > M_k)
    throw DomainError("range of V_k is inverted: m_k = " + format_double(m_k) +
                      " > M_k = " + format_double(M_k));
  const double base = (2.0 * k + 1.0) * h * b0;
  return {base + h * h * m_k, base + h * h * M_k};
}

}  // namespace magwell
