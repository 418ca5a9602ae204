#include "magwell/model_spectra.hpp"

#include <algorithm>
#include <cmath>

#include "magwell/error.hpp"

namespace magwell {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be positive and finite (got " + std::to_string(v) +
                      ")");
}

AsymptoticEigenvalue make(double h, std::map<double, double> terms) {
  AsymptoticEigenvalue e{h, 0.0, std::move(terms)};
  e.value = e.sum();
  return e;
}

}  // namespace

double AsymptoticEigenvalue::sum() const {
  double v = 0.0;
  for (const auto& [p, c] : terms) v += c * std::pow(h, p);
  return v;
}

AsymptoticEigenvalue lambda_band(double h, int k, double b0, double beta2_x, double R_x) {
  require_positive(h, "h");
  require_positive(b0, "b0");
  if (k < 0) throw DomainError("k must be >= 0");
  const double kk = static_cast<double>(k);
  const double c2 = (2 * kk * kk + 2 * kk + 1) * beta2_x / (4 * b0) + 0.5 * (kk * kk + kk) * R_x;
  return make(h, {{1.0, (2 * kk + 1) * b0}, {2.0, c2}});
}

AsymptoticEigenvalue groundstate_two_term(double h, double b0, double mu0) {
  require_positive(h, "h");
  require_positive(b0, "b0");
  require_positive(mu0, "mu0");
  return make(h, {{1.0, b0}, {2.0, mu0 / (4 * b0)}});
}

AsymptoticEigenvalue miniwell_eigenvalue(double h, int j, int k, double b0, double beta2_x0,
                                         double Vk_x0, double delta_k) {
  require_positive(h, "h");
  require_positive(b0, "b0");
  if (j < 0 || k < 0) throw DomainError("j and k must be >= 0");
  if (!(delta_k > 0.0)) throw DegenerateMiniwellError("delta_k = " + std::to_string(delta_k));
  if (!(beta2_x0 > 0.0)) throw DegeneracyViolationError("beta2(x0) = " + std::to_string(beta2_x0));
  const double c52 = std::sqrt(delta_k * beta2_x0 * (2.0 * k + 1)) * (2.0 * j + 1) / (2 * b0);
  return make(h, {{1.0, (2.0 * k + 1) * b0}, {2.0, Vk_x0}, {2.5, c52}});
}

std::string to_string(LandauGeometry g) {
  switch (g) {
    case LandauGeometry::kFlat: return "flat";
    case LandauGeometry::kHyperbolic: return "hyperbolic";
    case LandauGeometry::kSpherical: return "spherical";
  }
  return "?";
}

LandauGeometry parse_landau_geometry(const std::string& name) {
  if (name == "flat") return LandauGeometry::kFlat;
  if (name == "hyperbolic") return LandauGeometry::kHyperbolic;
  if (name == "spherical") return LandauGeometry::kSpherical;
  throw DomainError("unknown Landau geometry '" + name + "'");
}

double unified_landau_level(int k, double h, double b0, double R) {
  const double kk = static_cast<double>(k);
  return (2 * kk + 1) * h * b0 + 0.5 * h * h * (kk * kk + kk) * R;
}

LandauSpectrum landau_flat(double h, double b, int k_max) {
  require_positive(h, "h");
  require_positive(b, "b");
  LandauSpectrum out;
  out.geometry = LandauGeometry::kFlat;
  out.h = h;
  out.b0 = b;
  for (int k = 0; k <= k_max; ++k) out.levels.push_back({k, (2.0 * k + 1) * h * b, 0});
  return out;
}

LandauSpectrum landau_hyperbolic(double h, double b) {
  require_positive(h, "h");
  require_positive(b, "b");
  LandauSpectrum out;
  out.geometry = LandauGeometry::kHyperbolic;
  out.h = h;
  out.b0 = b;
  out.R = -2.0;
  const double hb = h * b;
  for (int k = 0; k < hb - 0.5; ++k) {
    const double kk = static_cast<double>(k);
    out.levels.push_back({k, (2 * kk + 1) * hb - h * h * (kk * kk + kk), 0});
  }
  out.ac_threshold = hb * hb + 0.25;
  return out;
}

LandauSpectrum landau_spherical(double two_s, int k_max) {
  const double n_real = std::round(two_s);
  if (!std::isfinite(two_s) || std::abs(two_s - n_real) > 1e-12 || n_real == 0.0)
    throw PrequantizationError("flux 2s = " + std::to_string(two_s) +
                               " must be a nonzero integer");
  const int n = static_cast<int>(std::abs(n_real));
  LandauSpectrum out;
  out.geometry = LandauGeometry::kSpherical;
  out.h = 1.0 / n;
  out.b0 = 0.5;
  out.R = 2.0;
  for (int k = 0; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double level = 0.5 * n * (2 * kk + 1) + kk * kk + kk;
    out.levels.push_back({k, level, n + 2 * k + 1});
    out.rescaled.push_back(level / (static_cast<double>(n) * n));
  }
  return out;
}

ZeemanSpectrum quadratic_zeeman_spectrum(double b, double K11, double K12, double K22, int max_n1,
                                         int max_n2) {
  if (max_n1 < 0 || max_n2 < 0) throw DomainError("level caps must be >= 0");
  ZeemanSpectrum z;
  z.tK = K11 + K22;
  z.dK = K11 * K22 - K12 * K12;
  if (z.dK < 0 || z.tK < 0)
    throw ComplexFrequencyError("K is not positive semidefinite (t_K = " + std::to_string(z.tK) +
                                ", d_K = " + std::to_string(z.dK) + ")");
  const double T = z.tK + b * b;
  const double disc = T * T - 4 * z.dK;
  if (disc < 0) throw ComplexFrequencyError("(t_K + b^2)^2 < 4 d_K");
  z.s2 = std::sqrt(0.5 * (T + std::sqrt(disc)));
  // s1 s2 = sqrt(d_K) avoids the cancellation in T - sqrt(disc).
  z.s1 = z.s2 > 0 ? std::sqrt(z.dK) / z.s2 : 0.0;
  for (int n1 = 0; n1 <= max_n1; ++n1)
    for (int n2 = 0; n2 <= max_n2; ++n2)
      z.levels.push_back({n1, n2, (2.0 * n1 + 1) * z.s1 + (2.0 * n2 + 1) * z.s2});
  std::stable_sort(z.levels.begin(), z.levels.end(),
                   [](const ZeemanLevel& a, const ZeemanLevel& c) { return a.value < c.value; });
  return z;
}

ModelGroundstate model_p0_groundstate(double h, double b0, double mu0) {
  require_positive(h, "h");
  require_positive(b0, "b0");
  if (!(mu0 >= 0.0)) throw DomainError("mu0 must be >= 0");
  const double x = std::sqrt(h) * mu0 / 2;
  // h (sqrt(x + b0^2) - b0) without cancellation.
  return {h * x / (std::sqrt(x + b0 * b0) + b0), mu0 * std::pow(h, 1.5) / (4 * b0)};
}

}  // namespace magwell
