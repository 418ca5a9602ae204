#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magwell/field.hpp"
#include "magwell/geometry.hpp"
#include "magwell/sparse.hpp"

namespace magwell {

/// Dirichlet box discretized by Ns x Nt interior nodes; the boundary nodes sit
/// on the box edges and carry u = 0. Node (i, j) has flat index i * Nt + j.
struct GridSpec {
  double s_min = -1.0, s_max = 1.0;
  double t_min = -1.0, t_max = 1.0;
  int Ns = 1, Nt = 1;

  static GridSpec box(double s_min, double s_max, double t_min, double t_max, int Ns, int Nt);
  /// Smallest node counts with spacing <= max_spacing in both directions.
  static GridSpec with_max_spacing(double s_min, double s_max, double t_min, double t_max,
                                   double max_spacing);

  double ds() const { return (s_max - s_min) / (Ns + 1); }
  double dt() const { return (t_max - t_min) / (Nt + 1); }
  double s(int i) const { return s_min + (i + 1) * ds(); }
  double t(int j) const { return t_min + (j + 1) * dt(); }
  std::int64_t size() const { return static_cast<std::int64_t>(Ns) * Nt; }
  std::int64_t index(int i, int j) const { return static_cast<std::int64_t>(i) * Nt + j; }
  std::vector<double> s_nodes() const;
  std::vector<double> t_nodes() const;

  /// Largest admissible spacing sqrt(h / b0) / 8.
  static double max_spacing(double h, double b0) { return std::sqrt(h / b0) / 8.0; }
  /// Throws GridResolutionError naming h when either spacing exceeds max_spacing(h, b0).
  void check_resolution(double h, double b0) const;

  bool operator==(const GridSpec&) const = default;
};

struct AssemblyOptions {
  /// Optional potential V(s,t) added to the operator (in the operator's units).
  ScalarField potential;
  bool check_resolution = true;
  /// 2: nearest-neighbour links. 4: adds two-step links, fourth-order accurate
  /// away from the boundary; the form is then no longer a sum of squares.
  int stencil_order = 2;
};

/// Discretization of H = (i h d + A)^*(i h d + A) (+ V) on a band metric.
///
/// The quadratic form is assembled edge by edge with Peierls phases, so the
/// stored matrix M^{-1/2} K M^{-1/2} (M = diag(sqrt(a) ds dt)) is exactly
/// Hermitian. Eigenvectors v of the stored matrix map to grid functions
/// u = M^{-1/2} v.
struct DiscreteOperator {
  double h = 0.0;
  GridSpec grid;
  HermitianCsr matrix;
  std::vector<double> mass;       // sqrt(a) ds dt at each node
  std::vector<double> b;          // field at each node
  std::vector<double> potential;  // V at each node (empty without a potential)
  std::string field_name, metric_name;
  int stencil_order = 2;

  std::int64_t dimension() const { return matrix.n; }
  /// v = M^{1/2} u and back.
  std::vector<cdouble> to_scaled(std::span<const cdouble> u) const;
  std::vector<cdouble> from_scaled(std::span<const cdouble> v) const;
};

DiscreteOperator assemble(double h, const GaugePotential& gauge, const GridSpec& grid,
                          const AssemblyOptions& options = {});
DiscreteOperator assemble(double h, const FieldProfile& field, const BandMetric& metric,
                          const GridSpec& grid, const AssemblyOptions& options = {});

struct QuadraticForm {
  double q_magnetic = 0.0;  // ||(i h d + A) u||^2
  double mass_b = 0.0;      // h int b |u|^2 dx_g
  double norm2 = 0.0;       // int |u|^2 dx_g
  bool touches_boundary = false;
};

/// Evaluates both sides of the Montgomery inequality for a grid function u,
/// with the quadrature used by assemble. The potential, if any, is excluded.
QuadraticForm quadratic_form(const DiscreteOperator& op, std::span<const cdouble> u);

/// Smooth random trial states: Gaussian bumps times random plane-wave phases,
/// centered in the inner part of the box. Deterministic in `seed`.
std::vector<std::vector<cdouble>> random_bump_states(const GridSpec& grid, double h, int count,
                                                     std::uint64_t seed);

struct MontgomeryReport {
  int checked = 0;
  double min_margin = 0.0;  // min over trials of (q - mass_b) / mass_b
  int worst = -1;
  double eps_disc = 0.0;
  int boundary_warnings = 0;
  bool passes = false;
};

/// Passes iff (q - mass_b) / mass_b >= -eps_disc on every trial state.
MontgomeryReport montgomery_check(const DiscreteOperator& op,
                                  const std::vector<std::vector<cdouble>>& trials,
                                  double eps_disc);

/// Relative slack of the discrete inequality on a state that saturates it in
/// the continuum, e.g. the flat Landau ground state: max(0, 1 - q / mass_b).
double montgomery_deficit(const DiscreteOperator& op, std::span<const cdouble> u);

double rayleigh_quotient(const DiscreteOperator& op, std::span<const cdouble> u);

/// ||(H - lambda) u|| / ||u|| in the sqrt|g|-weighted norm.
double residual_norm(const DiscreteOperator& op, std::span<const cdouble> u, double lambda);

}  // namespace magwell
