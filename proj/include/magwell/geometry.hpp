#pragma once

#include <functional>
#include <string>

#include "magwell/scalar_field.hpp"

namespace magwell {

/// Longitudinal extent of the band: a closed curve of length L (periodic) or
/// an open interval [s_min, s_max].
struct SAxis {
  double s_min = -1.0;
  double s_max = 1.0;
  bool periodic = false;

  static SAxis interval(double lo, double hi) { return {lo, hi, false}; }
  static SAxis closed_curve(double length) { return {0.0, length, true}; }

  double length() const { return s_max - s_min; }
  /// Maps s into the axis (wraps when periodic); throws OutOfDomainError otherwise.
  double canonical(double s) const;
};

/// Band metric g = a(s,t) ds^2 + dt^2 in Fermi coordinates around the well
/// curve {t = 0}. Immutable once built.
struct BandMetric {
  std::string name;
  ScalarField a;
  SAxis axis;
  double t_halfwidth = 1.0;
  /// Transverse step of the derivative stencils; 0 selects 1e-3 * t_halfwidth.
  double dt = 0.0;

  double step() const { return dt > 0.0 ? dt : 1e-3 * t_halfwidth; }
  double sqrt_det(double s, double t) const;  // sqrt|g| = sqrt(a)

  /// Checks a(s,0) = 1 within `tol` and a > 0 on a sample lattice of the band.
  void validate(double tol = 1e-12, int samples = 33) const;

  static BandMetric flat(SAxis axis, double t_halfwidth);
  /// Circle of radius rho in the Euclidean plane: a = (1 + t/rho)^2.
  static BandMetric circle(double rho, SAxis axis, double t_halfwidth);
  /// Equator of the unit sphere: a = cos^2 t.
  static BandMetric sphere_equator(SAxis axis, double t_halfwidth);
  /// Horocycle y = 1 of the upper half-plane: a = exp(-2t).
  static BandMetric hyperbolic_horocycle(SAxis axis, double t_halfwidth);
  /// Tabulated a(s,t) from CSV columns (s, t, a).
  static BandMetric sampled(const std::filesystem::path& csv, SAxis axis, double t_halfwidth);
};

/// Scalar curvature R(s,t) = 2K with K = -(d_t^2 sqrt a) / sqrt a, by a
/// centered 5-point stencil of step metric.step().
double gauss_curvature(const BandMetric& metric, double s, double t);

/// Taylor data of the metric along the curve:
/// a(s,t) = 1 + a1 t + a2 t^2 + a3 t^3 + O(t^4), kappa = -a1/2, R = 2(kappa^2 - a2).
struct CurveGeometry {
  std::function<double(double)> a1;
  std::function<double(double)> a2;
  std::function<double(double)> a3;
  std::function<double(double)> kappa;
  std::function<double(double)> R;
};

CurveGeometry curve_coefficients(const BandMetric& metric);

}  // namespace magwell
