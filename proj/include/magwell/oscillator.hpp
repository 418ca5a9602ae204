#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace magwell {

using cdouble = std::complex<double>;

/// Orthonormal eigenfunctions of L0 = -d^2/dt1^2 + b0^2 t1^2:
/// psi_m(t1) = b0^{1/4} phi_m(sqrt(b0) t1), phi_m the Hermite functions, with
/// L0 psi_m = (2m+1) b0 psi_m.
class OscillatorBasis {
 public:
  OscillatorBasis(double b0, int max_index);

  double b0() const { return b0_; }
  int max_index() const { return max_index_; }

  /// psi_0..psi_max at t1 by the three-term recurrence.
  std::vector<double> values(double t1) const;
  double value(int m, double t1) const;
  /// psi_m' = sqrt(b0) (sqrt(m/2) psi_{m-1} - sqrt((m+1)/2) psi_{m+1}).
  std::vector<double> derivatives(double t1) const;
  double eigenvalue(int m) const { return (2.0 * m + 1) * b0_; }

 private:
  double b0_;
  int max_index_;
};

/// Gauss-Hermite rule for weight exp(-x^2) by the Golub-Welsch eigenproblem.
struct QuadratureRule {
  std::vector<double> nodes, weights;
};
QuadratureRule gauss_hermite(int n);

/// <t1^p psi_{k+q}, psi_k> from the ladder form t1 = (a + a^dagger) / sqrt(2 b0).
/// Zero when p + q is odd, |q| > p, or k + q < 0.
double moment_table(int k, double b0, int p, int q);

/// sum over (m, d) of c_{m,d} psi_m(t1) chi0^{(d)}(s).
class ModeExpansion {
 public:
  using Key = std::pair<int, int>;  // (m, d)

  ModeExpansion() = default;
  static ModeExpansion single(int m, int d, cdouble c = 1.0);

  cdouble operator()(int m, int d) const;
  void add(int m, int d, cdouble c);
  const std::map<Key, cdouble>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_derivative() const;
  int max_mode() const;
  double max_abs() const;

  ModeExpansion& operator+=(const ModeExpansion& o);
  ModeExpansion& operator-=(const ModeExpansion& o);
  ModeExpansion& operator*=(cdouble c);
  friend ModeExpansion operator+(ModeExpansion a, const ModeExpansion& b) { return a += b; }
  friend ModeExpansion operator-(ModeExpansion a, const ModeExpansion& b) { return a -= b; }
  friend ModeExpansion operator*(cdouble c, ModeExpansion a) { return a *= c; }

  /// Multiplication by t1 (ladder action).
  ModeExpansion times_t1(double b0) const;
  ModeExpansion times_t1_pow(double b0, int p) const;
  /// d/ds: raises every derivative order by one.
  ModeExpansion d_s() const;
  /// Drops terms with |c| <= tol.
  ModeExpansion pruned(double tol = 0.0) const;

 private:
  std::map<Key, cdouble> terms_;
};

/// Solves (L0 - (2k+1) b0) u = rhs with u orthogonal to psi_k. The psi_k
/// components of rhs must vanish to `tol` relative to max |rhs|; otherwise
/// SolvabilityViolationError names the offending coefficient.
ModeExpansion oscillator_resolvent_solve(const ModeExpansion& rhs, int k, double b0,
                                         double tol = 1e-12);

/// Coefficients of the scaled operator expansion
/// h^{-1} |g|^{1/4} H |g|^{-1/4} = L0 + h^{1/2} L1 + h L2 + ...
/// with all band coefficients frozen at the well point.
struct ScaledOperator {
  int k = 0;
  double b0 = 1.0, a1 = 0.0, a2 = 0.0, beta2 = 0.0;

  /// L1 = -2 b0 t1 (i d_s + a1 b0 t1^2 / 4).
  ModeExpansion L1(const ModeExpansion& u) const;
  /// L2 = -d_s^2 + (3i/2) a1 b0 t1^2 d_s + c4 t1^4 + c0 with
  /// c4 = b0 beta2 / 3 - 2 a2 b0^2 / 3 + 23 a1^2 b0^2 / 48 and c0 = a2 / 2 - 3 a1^2 / 16.
  ModeExpansion L2(const ModeExpansion& u) const;
};

struct Order2Quasimode {
  int k = 0;
  double b0 = 1.0;
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  ModeExpansion phi0, phi1, phi2;
  /// Largest |psi_k component| of the first- and second-order right-hand sides
  /// before the solve (the solvability check), relative to the rhs scale.
  double kernel_residual_1 = 0.0;
  double kernel_residual_2 = 0.0;
};

/// lambda0 = (2k+1) b0, lambda1 = 0,
/// lambda2 = beta2 (2k^2+2k+1) / (4 b0) - (k^2+k)(a2 - a1^2/4).
/// Throws ConstructionBugError if a solvability condition fails.
Order2Quasimode build_order2_quasimode(int k, double b0, double a1, double a2, double beta2,
                                       double tol = 1e-12);

/// min(1 + beta, 3/2 - 3 beta) for 0 < beta < 1/2.
double cutoff_exponent(double beta);

}  // namespace magwell
