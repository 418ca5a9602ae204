#include <cmath>

#include <gtest/gtest.h>

#include "magwell/error.hpp"
#include "magwell/geometry.hpp"

using namespace magwell;

namespace {

const SAxis kAxis = SAxis::interval(-2.0, 2.0);

std::vector<BandMetric> catalog() {
  return {BandMetric::flat(kAxis, 1.0), BandMetric::circle(2.0, kAxis, 1.0),
          BandMetric::sphere_equator(kAxis, 1.0), BandMetric::hyperbolic_horocycle(kAxis, 1.0),
          BandMetric{"wavy", [](double s, double t) { return std::pow(1.0 + 0.3 * std::sin(s) * t, 2) - 0.2 * t * t; },
                     kAxis, 1.0}};
}

}  // namespace

TEST(GaussCurvature, FlatIsZero) {
  const auto m = BandMetric::flat(kAxis, 1.0);
  EXPECT_NEAR(gauss_curvature(m, 0.3, 0.2), 0.0, 1e-12);
}

TEST(GaussCurvature, SphereEquatorIsTwo) {
  EXPECT_NEAR(gauss_curvature(BandMetric::sphere_equator(kAxis, 1.0), 0.0, 0.0), 2.0, 1e-6);
}

TEST(GaussCurvature, CircleInPlaneIsZero) {
  EXPECT_NEAR(gauss_curvature(BandMetric::circle(2.0, kAxis, 1.0), 0.0, 0.0), 0.0, 1e-6);
}

TEST(GaussCurvature, HyperbolicIsMinusTwo) {
  EXPECT_NEAR(gauss_curvature(BandMetric::hyperbolic_horocycle(kAxis, 1.0), 0.5, 0.3), -2.0, 1e-5);
}

TEST(GaussCurvature, Errors) {
  const auto m = BandMetric::flat(kAxis, 1.0);
  EXPECT_THROW(gauss_curvature(m, 0.0, 1.5), OutOfDomainError);
  EXPECT_THROW(gauss_curvature(m, 3.0, 0.0), OutOfDomainError);
  EXPECT_THROW(gauss_curvature(m, 0.0, 1.0), StencilError);
  const BandMetric bad{"bad", [](double, double t) { return 1.0 - 4.0 * t; }, kAxis, 1.0};
  EXPECT_THROW(gauss_curvature(bad, 0.0, 0.2499), InvalidMetricError);
}

TEST(GaussCurvature, TranslationInvariantForSIndependentMetric) {
  const auto m = BandMetric::sphere_equator(kAxis, 1.0);
  EXPECT_DOUBLE_EQ(gauss_curvature(m, -1.3, 0.4), gauss_curvature(m, 1.1, 0.4));
}

TEST(CurveCoefficients, Flat) {
  const auto g = curve_coefficients(BandMetric::flat(kAxis, 1.0));
  for (double s : {-1.0, 0.0, 1.5}) {
    EXPECT_NEAR(g.a1(s), 0.0, 1e-12);
    EXPECT_NEAR(g.a2(s), 0.0, 1e-9);
    EXPECT_NEAR(g.kappa(s), 0.0, 1e-12);
    EXPECT_NEAR(g.R(s), 0.0, 1e-9);
  }
}

TEST(CurveCoefficients, Circle) {
  const auto g = curve_coefficients(BandMetric::circle(2.0, kAxis, 1.0));
  EXPECT_NEAR(g.a1(0.0), 1.0, 1e-9);
  EXPECT_NEAR(g.kappa(0.0), -0.5, 1e-9);
  EXPECT_NEAR(g.a2(0.0), 0.25, 1e-6);
  EXPECT_NEAR(g.R(0.0), 0.0, 1e-6);
  EXPECT_NEAR(g.a3(0.0), 0.0, 1e-4);
}

TEST(CurveCoefficients, SphereEquator) {
  const auto g = curve_coefficients(BandMetric::sphere_equator(kAxis, 1.0));
  EXPECT_NEAR(g.a1(0.0), 0.0, 1e-12);
  EXPECT_NEAR(g.a2(0.0), -1.0, 1e-6);
  EXPECT_NEAR(g.kappa(0.0), 0.0, 1e-12);
  EXPECT_NEAR(g.R(0.0), 2.0, 1e-6);
}

TEST(CurveCoefficients, StencilTooWide) {
  auto m = BandMetric::flat(kAxis, 1.0);
  m.dt = 0.6;
  EXPECT_THROW(curve_coefficients(m), StencilError);
}

TEST(CurveCoefficients, CurvatureIdentityOnCatalog) {
  for (const auto& m : catalog()) {
    const auto g = curve_coefficients(m);
    for (double s : {-1.5, -0.2, 0.0, 0.9}) {
      const double k = g.kappa(s);
      EXPECT_NEAR(g.a1(s), -2.0 * k, 1e-12) << m.name;
      EXPECT_LT(std::abs(g.a2(s) + 0.5 * g.R(s) - k * k), 1e-6) << m.name;
      EXPECT_NEAR(g.R(s), gauss_curvature(m, s, 0.0), 1e-5) << m.name;
    }
  }
}

TEST(CurveCoefficients, StencilConvergenceOrders) {
  // a = (1 + t)^2 exp(t^3) = 1 + 2t + t^2 + t^3 + 2t^4 + ...
  BandMetric m{"test", [](double, double t) { return std::pow(1.0 + t, 2) * std::exp(t * t * t); }, kAxis, 1.0};
  const auto errors = [&](double dt) {
    m.dt = dt;
    const auto g = curve_coefficients(m);
    return std::pair{std::abs(g.a2(0.0) - 1.0), std::abs(g.a3(0.0) - 1.0)};
  };
  const auto [a2_coarse, a3_coarse] = errors(0.04);
  const auto [a2_fine, a3_fine] = errors(0.02);
  EXPECT_NEAR(a3_coarse / a3_fine, 4.0, 0.4);
  EXPECT_GT(a2_coarse / a2_fine, 4.0);  // fourth order with the 5-point stencil
}

TEST(BandMetric, Validate) {
  EXPECT_NO_THROW(BandMetric::sphere_equator(kAxis, 1.0).validate());
  const BandMetric off{"off", [](double, double) { return 2.0; }, kAxis, 1.0};
  EXPECT_THROW(off.validate(), InvalidMetricError);
  EXPECT_THROW(BandMetric::circle(1.0, kAxis, 1.0), InvalidMetricError);
}

TEST(SAxis, PeriodicWrap) {
  const auto ax = SAxis::closed_curve(2.0);
  EXPECT_NEAR(ax.canonical(2.5), 0.5, 1e-15);
  EXPECT_NEAR(ax.canonical(-0.5), 1.5, 1e-15);
}
