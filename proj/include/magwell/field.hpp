#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magwell/geometry.hpp"
#include "magwell/scalar_field.hpp"

namespace magwell {

/// Magnetic field density b(s,t) > 0 whose minimum b0 is attained on {t = 0}.
struct FieldProfile {
  std::string name;
  ScalarField b;
  SAxis axis;
  double t_halfwidth = 1.0;
  double b0 = 1.0;

  /// Sets b0 to the minimum of b(s,0) over `samples` points of the axis.
  static FieldProfile make(std::string name, ScalarField b, SAxis axis, double t_halfwidth,
                           int samples = 257);

  static FieldProfile uniform(double b0, SAxis axis, double t_halfwidth);
  /// b = b0 + beta2 t^2 / 2.
  static FieldProfile parabolic(double b0, double beta2, SAxis axis, double t_halfwidth);
  /// b = b0 + (mu0 + mu2 s^2 / 2) t^2 / 2, so beta2(s) = mu0 + mu2 s^2 / 2.
  static FieldProfile miniwell(double b0, double mu0, double mu2, SAxis axis, double t_halfwidth);
};

struct WellOptions {
  int s_samples = 401;
  /// Transverse stencil step; 0 selects 1e-3 * t_halfwidth.
  double dt = 0.0;
  /// Longitudinal stencil step for V_k'' and beta2''; 0 selects min(0.02, L/50).
  double ds = 0.0;
  double gradient_tol = 1e-6;
  double level_tol = 1e-9;
  /// delta_k below this counts as a flat minimum.
  double curvature_tol = 1e-6;
  bool require_miniwell = false;
};

/// Effective longitudinal potential of the k-th Landau band and its minimum.
struct BandWell {
  int k = 0;
  std::function<double(double)> V;
  double x0 = 0.0;
  double V_min = 0.0;
  double delta = 0.0;  // V''(x0)
  double range_min = 0.0;
  double range_max = 0.0;
  bool tie = false;  // several separated samples share the minimum
};

struct WellData {
  double b0 = 0.0;
  std::function<double(double)> beta2;
  double mu0 = 0.0;       // inf beta2
  double x_mu0 = 0.0;     // where it is attained
  double mu2 = 0.0;       // beta2'' there
  std::vector<BandWell> bands;

  const BandWell& band(int k) const;
};

/// beta2(s) = d_t^2 b(s,0); V_k = (2k^2+2k+1) beta2 / (4 b0) + (k^2+k) R / 2.
WellData extract_well(const FieldProfile& field, const CurveGeometry& geometry,
                      std::span<const int> ks, const WellOptions& options = {});

struct QuadraticWellReport {
  bool holds = true;
  struct Violation {
    double s, t, excess;  // excess = b - b0
    bool lower_bound;     // true if C^-1 t^2 <= b - b0 failed
  };
  std::optional<Violation> violation;
  int samples_checked = 0;
};

/// Checks C^-1 t^2 <= b(s,t) - b0 <= C t^2 on a sample lattice of
/// |t| <= halfwidth (t != 0).
QuadraticWellReport validate_quadratic_well(const FieldProfile& field, double C,
                                            double halfwidth, int s_samples = 33,
                                            int t_samples = 64);

/// Gauge with A1 = 0 and A0(s,0) = 0: A0(s,t) = -int_0^t b sqrt(a) dtau,
/// optionally shifted by a pure gauge term d_s phi(s).
class GaugePotential {
 public:
  GaugePotential(FieldProfile field, BandMetric metric);

  /// Pointwise value by adaptive Gauss-Kronrod (rejects error estimates above 1e-9).
  double operator()(double s, double t) const;

  /// A0(s, t_j) for ascending `t_nodes`, by composite Gauss-Legendre marching
  /// outward from t = 0. Excludes the gauge shift.
  std::vector<double> column(double s, std::span<const double> t_nodes) const;

  /// Adds d_s phi to A0. Line integrals along s pick up phi(s1) - phi(s0) exactly.
  GaugePotential with_gradient(std::function<double(double)> phi,
                               std::function<double(double)> dphi) const;

  /// int_{s0}^{s1} (d_s phi) ds, zero without a gauge shift.
  double gradient_increment(double s0, double s1) const;

  const FieldProfile& field() const { return field_; }
  const BandMetric& metric() const { return metric_; }

 private:
  FieldProfile field_;
  BandMetric metric_;
  std::function<double(double)> phi_, dphi_;
};

inline GaugePotential gauge_potential(const FieldProfile& field, const BandMetric& metric) {
  return GaugePotential(field, metric);
}

}  // namespace magwell
