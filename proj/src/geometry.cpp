#include "magwell/geometry.hpp"

#include <cmath>
#include <memory>

#include "magwell/error.hpp"

namespace magwell {

double SAxis::canonical(double s) const {
  if (periodic) {
    const double L = length();
    double r = std::fmod(s - s_min, L);
    if (r < 0) r += L;
    return s_min + r;
  }
  const double slack = 1e-12 * std::max(1.0, length());
  if (s < s_min - slack || s > s_max + slack)
    throw OutOfDomainError("s = " + std::to_string(s) + " outside [" + std::to_string(s_min) +
                           ", " + std::to_string(s_max) + "]");
  return s;
}

double BandMetric::sqrt_det(double s, double t) const {
  const double v = a(s, t);
  if (!(v > 0.0))
    throw InvalidMetricError(name + ": a(" + std::to_string(s) + ", " + std::to_string(t) +
                             ") = " + std::to_string(v) + " is not positive");
  return std::sqrt(v);
}

void BandMetric::validate(double tol, int samples) const {
  if (!(t_halfwidth > 0.0)) throw InvalidMetricError(name + ": t_halfwidth must be positive");
  const double L = axis.length();
  if (!(L > 0.0)) throw InvalidMetricError(name + ": empty s-axis");
  for (int i = 0; i < samples; ++i) {
    const double s = axis.s_min + L * i / (samples - 1);
    const double a0 = a(s, 0.0);
    if (std::abs(a0 - 1.0) > tol)
      throw InvalidMetricError(name + ": a(s,0) = " + std::to_string(a0) + " at s = " +
                               std::to_string(s) + " (must be 1)");
    for (int j = 0; j < samples; ++j) {
      const double t = -t_halfwidth + 2.0 * t_halfwidth * j / (samples - 1);
      if (!(a(s, t) > 0.0))
        throw InvalidMetricError(name + ": a <= 0 at (" + std::to_string(s) + ", " +
                                 std::to_string(t) + ")");
    }
  }
}

BandMetric BandMetric::flat(SAxis axis, double t_halfwidth) {
  return {"flat", [](double, double) { return 1.0; }, axis, t_halfwidth};
}

BandMetric BandMetric::circle(double rho, SAxis axis, double t_halfwidth) {
  if (!(rho > 0.0)) throw DomainError("circle radius must be positive");
  if (t_halfwidth >= rho) throw InvalidMetricError("circle band must satisfy t_halfwidth < rho");
  return {"circle(" + std::to_string(rho) + ")",
          [rho](double, double t) {
            const double f = 1.0 + t / rho;
            return f * f;
          },
          axis, t_halfwidth};
}

BandMetric BandMetric::sphere_equator(SAxis axis, double t_halfwidth) {
  if (t_halfwidth >= M_PI / 2)
    throw InvalidMetricError("sphere-equator band must satisfy t_halfwidth < pi/2");
  return {"sphere-equator",
          [](double, double t) {
            const double c = std::cos(t);
            return c * c;
          },
          axis, t_halfwidth};
}

BandMetric BandMetric::hyperbolic_horocycle(SAxis axis, double t_halfwidth) {
  return {"hyperbolic-horocycle", [](double, double t) { return std::exp(-2.0 * t); }, axis,
          t_halfwidth};
}

BandMetric BandMetric::sampled(const std::filesystem::path& csv, SAxis axis, double t_halfwidth) {
  auto grid = std::make_shared<const SampledGrid>(SampledGrid::from_csv(csv, "a"));
  return {"csv:" + csv.string(), [grid](double s, double t) { return (*grid)(s, t); }, axis,
          t_halfwidth};
}

namespace {

// Centered 5-point stencils in t around t0 for f(t) = g(t0 + k*d), k = -2..2.
struct FivePoint {
  double m2, m1, z, p1, p2;
  double d1(double d) const { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * d); }
  double d2(double d) const { return (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * d * d); }
  double d3(double d) const { return (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * d * d * d); }
};

template <class F>
FivePoint sample5(F&& f, double t0, double d) {
  return {f(t0 - 2 * d), f(t0 - d), f(t0), f(t0 + d), f(t0 + 2 * d)};
}

}  // namespace

double gauss_curvature(const BandMetric& metric, double s, double t) {
  const double sc = metric.axis.canonical(s);
  const double T = metric.t_halfwidth;
  if (std::abs(t) > T)
    throw OutOfDomainError("t = " + std::to_string(t) + " outside band |t| <= " + std::to_string(T));
  const double d = metric.step();
  if (std::abs(t) + 2.0 * d > T * (1.0 + 1e-12))
    throw StencilError("curvature stencil at t = " + std::to_string(t) + " leaves the band");
  const auto root = [&](double tt) {
    const double v = metric.a(sc, tt);
    if (!(v > 0.0))
      throw InvalidMetricError(metric.name + ": a <= 0 at stencil point t = " + std::to_string(tt));
    return std::sqrt(v);
  };
  const FivePoint p = sample5(root, t, d);
  const double K = -p.d2(d) / p.z;
  return 2.0 * K;
}

CurveGeometry curve_coefficients(const BandMetric& metric) {
  const double d = metric.step();
  if (2.0 * d > metric.t_halfwidth)
    throw StencilError("t_halfwidth " + std::to_string(metric.t_halfwidth) +
                       " too small for stencil step " + std::to_string(d));
  auto m = std::make_shared<const BandMetric>(metric);
  auto stencil = [m, d](double s) {
    const double sc = m->axis.canonical(s);
    return sample5([&](double t) { return m->a(sc, t); }, 0.0, d);
  };
  CurveGeometry g;
  g.a1 = [stencil, d](double s) { return stencil(s).d1(d); };
  g.a2 = [stencil, d](double s) { return 0.5 * stencil(s).d2(d); };
  g.a3 = [stencil, d](double s) { return stencil(s).d3(d) / 6.0; };
  g.kappa = [a1 = g.a1](double s) { return -0.5 * a1(s); };
  g.R = [stencil, d](double s) {
    const FivePoint p = stencil(s);
    const double kappa = -0.5 * p.d1(d);
    return 2.0 * (kappa * kappa - 0.5 * p.d2(d));
  };
  return g;
}

}  // namespace magwell
