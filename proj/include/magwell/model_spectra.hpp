#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace magwell {

/// value = sum over terms of coefficient * h^power.
struct AsymptoticEigenvalue {
  double h = 0.0;
  double value = 0.0;
  std::map<double, double> terms;  // power -> coefficient

  /// Recomputes value from the breakdown.
  double sum() const;
};

/// (2k+1) h b0 + h^2 [(2k^2+2k+1) beta2 / (4 b0) + (k^2+k) R / 2].
AsymptoticEigenvalue lambda_band(double h, int k, double b0, double beta2_x, double R_x);

/// h b0 + h^2 mu0 / (4 b0).
AsymptoticEigenvalue groundstate_two_term(double h, double b0, double mu0);

/// (2k+1) b0 h + V_k(x0) h^2 + sqrt(delta_k beta2(x0) (2k+1)) (2j+1) / (2 b0) h^{5/2}.
AsymptoticEigenvalue miniwell_eigenvalue(double h, int j, int k, double b0, double beta2_x0,
                                         double Vk_x0, double delta_k);

enum class LandauGeometry { kFlat, kHyperbolic, kSpherical };

std::string to_string(LandauGeometry g);
LandauGeometry parse_landau_geometry(const std::string& name);

struct LandauLevel {
  int k = 0;
  double value = 0.0;
  int multiplicity = 0;  // 0 when infinite (flat, hyperbolic)
};

struct LandauSpectrum {
  LandauGeometry geometry = LandauGeometry::kFlat;
  std::vector<LandauLevel> levels;
  std::optional<double> ac_threshold;  // hyperbolic only
  /// Spherical only: h^2 * level with h = 1/|n|, i.e. the levels in semiclassical units.
  std::vector<double> rescaled;
  double h = 0.0;   // semiclassical parameter of the unified form
  double b0 = 0.0;  // field strength of the unified form
  double R = 0.0;   // scalar curvature of the unified form
};

/// Flat plane, field b: levels (2k+1) h b for k = 0..k_max.
LandauSpectrum landau_flat(double h, double b, int k_max);
/// Hyperbolic plane (R = -2): (2k+1) h b - h^2 (k^2+k) for k < hb - 1/2, and
/// the continuous spectrum threshold h^2 b^2 + 1/4.
LandauSpectrum landau_hyperbolic(double h, double b);
/// Unit sphere with flux 2s: requires n = 2s a nonzero integer. Levels
/// |n|(2k+1)/2 + k^2 + k with multiplicity |n| + 2k + 1.
LandauSpectrum landau_spherical(double two_s, int k_max);

/// Level predicted by (2k+1) h b0 + h^2 (k^2+k) R / 2.
double unified_landau_level(int k, double h, double b0, double R);

struct ZeemanLevel {
  int n1 = 0, n2 = 0;
  double value = 0.0;
};

struct ZeemanSpectrum {
  double s1 = 0.0, s2 = 0.0;
  double tK = 0.0, dK = 0.0;
  std::vector<ZeemanLevel> levels;  // ascending
};

/// Spectrum of (i d + A)^2 + K(x) with constant field b and quadratic potential
/// K(x) = K11 x1^2 + 2 K12 x1 x2 + K22 x2^2: (2 n1 + 1) s1 + (2 n2 + 1) s2.
ZeemanSpectrum quadratic_zeeman_spectrum(double b, double K11, double K12, double K22, int max_n1,
                                         int max_n2);

struct ModelGroundstate {
  double exact = 0.0;
  double leading = 0.0;
};

/// Lowest eigenvalue of the model operator minus h b0, and its leading term mu0 h^{3/2} / (4 b0).
ModelGroundstate model_p0_groundstate(double h, double b0, double mu0);

}  // namespace magwell
