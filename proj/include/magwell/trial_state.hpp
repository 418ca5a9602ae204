#pragma once

#include <optional>
#include <span>
#include <vector>

#include "magwell/discrete_operator.hpp"
#include "magwell/geometry.hpp"
#include "magwell/oscillator.hpp"

namespace magwell {

/// Even C^3 cutoff: 1 for |x| <= flat, 0 for |x| >= support, with the
/// smoothstep 1 - (35u^4 - 84u^5 + 70u^6 - 20u^7) in between.
struct SmoothCutoff {
  double flat = 0.5;
  double support = 1.0;

  SmoothCutoff() = default;
  SmoothCutoff(double flat, double support);

  double operator()(double x) const { return derivative(x, 0); }
  /// Derivative of order 0..3.
  double derivative(double x, int order) const;
};

/// E(s) = c chi(s - x) exp(-(s - x)^2 / (2 w^2)) with w = h^beta and c chosen
/// so that ||E||_{L^2(R)} = 1.
class GaussianEnvelope {
 public:
  /// `cutoff` acts on s - center; pass std::nullopt for a bare Gaussian.
  GaussianEnvelope(double h, double beta, double center, std::optional<SmoothCutoff> cutoff);

  double h() const { return h_; }
  double beta() const { return beta_; }
  double center() const { return center_; }
  double width() const { return width_; }
  double normalization() const { return c_; }
  const std::optional<SmoothCutoff>& cutoff() const { return cutoff_; }

  /// E^{(d)}(s), d = 0..3.
  double derivative(double s, int d) const;
  double operator()(double s) const { return derivative(s, 0); }

  /// Fraction of ||E||^2 lying outside [lo, hi].
  double mass_loss(double lo, double hi) const;
  /// ||(s - x)^m E^{(d)}||_{L^2(R)} by adaptive quadrature, d = 0..3.
  double moment_norm(int m, int d = 0) const;

  /// Integration window containing the whole support.
  double reach() const;

 private:
  double raw(double s, int d) const;

  double h_, beta_, center_, width_;
  std::optional<SmoothCutoff> cutoff_;
  double c_ = 1.0;
};

struct EnvelopeSamples {
  std::vector<double> s;
  std::vector<double> values;
  double mass_loss = 0.0;
};

/// Samples E_h on `s_nodes`. Throws TruncationError when the mass outside
/// [s_nodes.front(), s_nodes.back()] exceeds max_mass_loss.
EnvelopeSamples gaussian_envelope(const GaussianEnvelope& envelope, std::span<const double> s_nodes,
                                  double max_mass_loss = 1e-6);

struct TrialOptions {
  /// Highest included term: 0 keeps phi0, 1 adds h^{1/2} phi1, 2 adds h phi2.
  int order = 2;
  double beta = 0.125;
  /// Longitudinal cutoff radius; 0 selects the distance from x to the nearer s-edge.
  double cutoff_radius = 0.0;
  double cutoff_flat_fraction = 0.8;
  /// Transverse cutoff support; 0 selects 0.8 * metric.t_halfwidth.
  double transverse_support = 0.0;
  double transverse_flat_fraction = 0.75;
  double max_mass_loss = 1e-6;
};

/// Grid samples of the order-2 quasimode with its candidate eigenvalue.
struct QuasimodeBundle {
  GridSpec grid;
  std::vector<cdouble> samples;  // Phi at grid nodes, flat index i * Nt + j
  int k = 0;
  int order = 2;
  double h = 0.0;
  double beta = 0.125;
  double x = 0.0;            // well point the envelope is centered on
  double width = 0.0;        // h^beta
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  double lambda = 0.0;       // h (lambda0 + h lambda2)
  double mass_loss = 0.0;
  std::optional<double> residual;
};

/// Phi(s,t) = a^{-1/4} h^{-1/4} tau(t) sum_{o <= order} h^{o/2} phi_o(s - x, t / sqrt(h)),
/// with chi0 realized as E_h centered at x and tau the transverse cutoff.
QuasimodeBundle assemble_trial_state(const Order2Quasimode& quasimode, double h, double x,
                                     const GridSpec& grid, const BandMetric& metric,
                                     const TrialOptions& options = {});

/// ||(H - lambda) Phi|| / ||Phi||; stores the value in the bundle.
/// Throws ShapeError when the bundle grid differs from the operator grid.
double residual_norm(const DiscreteOperator& op, QuasimodeBundle& bundle);

}  // namespace magwell
