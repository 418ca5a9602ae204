#include <cmath>

#include <gtest/gtest.h>

#include "magwell/error.hpp"
#include "magwell/fit.hpp"
#include "magwell/trial_state.hpp"

using namespace magwell;

TEST(SmoothCutoff, ShapeAndDerivatives) {
  const SmoothCutoff c(0.5, 1.0);
  EXPECT_EQ(c(0.2), 1.0);
  EXPECT_EQ(c(-0.5), 1.0);
  EXPECT_EQ(c(1.0), 0.0);
  EXPECT_NEAR(c(0.75), 0.5, 1e-15);
  const double d = 1e-5;
  for (double x : {-0.9, -0.6, 0.55, 0.7, 0.95})
    for (int order = 1; order <= 3; ++order) {
      const double fd = (c.derivative(x + d, order - 1) - c.derivative(x - d, order - 1)) / (2 * d);
      EXPECT_NEAR(c.derivative(x, order), fd, 1e-4 * std::pow(4.0, order)) << x << " " << order;
    }
  EXPECT_THROW(SmoothCutoff(1.0, 0.5), DomainError);
}

TEST(GaussianEnvelope, UnitNormAndDomain) {
  for (double h : {0.01, 0.05, 0.1}) {
    const GaussianEnvelope e(h, 0.125, 0.3, SmoothCutoff(3.0, 4.0));
    EXPECT_NEAR(e.moment_norm(0), 1.0, 1e-10);
    EXPECT_NEAR(e.width(), std::pow(h, 0.125), 1e-15);
  }
  EXPECT_THROW(GaussianEnvelope(0.1, 0.5, 0.0, std::nullopt), DomainError);
  EXPECT_THROW(GaussianEnvelope(0.1, 0.0, 0.0, std::nullopt), DomainError);
}

TEST(GaussianEnvelope, DerivativesMatchFiniteDifferences) {
  const GaussianEnvelope e(0.05, 0.125, 0.0, SmoothCutoff(1.0, 2.0));
  const double d = 1e-5;
  for (double s : {-1.7, -0.4, 0.2, 1.3})
    for (int order = 1; order <= 3; ++order)
      EXPECT_NEAR(e.derivative(s, order), (e.derivative(s + d, order - 1) - e.derivative(s - d, order - 1)) / (2 * d),
                  1e-5)
          << s << " " << order;
}

TEST(GaussianEnvelope, MomentNormScaling) {
  const double beta = 0.125;
  std::vector<Sample> m1, m2, d1;
  for (double h : {1e-4, 1e-3, 0.01, 0.03, 0.1}) {
    const GaussianEnvelope e(h, beta, 0.0, std::nullopt);
    m1.push_back({h, e.moment_norm(1)});
    m2.push_back({h, e.moment_norm(2)});
    d1.push_back({h, e.moment_norm(1, 1)});
  }
  EXPECT_NEAR(exponent_fit(m1).slope, beta, 0.05 * beta);
  EXPECT_NEAR(exponent_fit(m2).slope, 2 * beta, 0.05 * 2 * beta);
  // ||s E'|| is h-independent for a Gaussian: slope beta (m - 1) = 0.
  EXPECT_NEAR(exponent_fit(d1).slope, 0.0, 1e-6);
}

TEST(GaussianEnvelope, MassLossAndTruncation) {
  const GaussianEnvelope e(0.1, 0.125, 0.0, std::nullopt);
  const double w = e.width();
  const std::vector<double> wide = {-6 * w, 0.0, 6 * w};
  EXPECT_LT(gaussian_envelope(e, wide).mass_loss, 1e-8);
  const std::vector<double> narrow = {-w, 0.0, w};
  EXPECT_THROW(gaussian_envelope(e, narrow), TruncationError);
  EXPECT_NEAR(e.mass_loss(-w, w), std::erfc(1.0), 1e-9);
}

namespace {

struct FlatDesk {
  SAxis axis = SAxis::interval(-4.0, 4.0);
  BandMetric metric = BandMetric::flat(axis, 2.0);
  GridSpec grid = GridSpec::with_max_spacing(-4.0, 4.0, -2.0, 2.0, GridSpec::max_spacing(0.05, 1.0));
};

}  // namespace

TEST(TrialState, CandidateEigenvalue) {
  FlatDesk d;
  const auto q = build_order2_quasimode(0, 1.0, 0.0, 0.0, 2.0);
  const auto grid = GridSpec::with_max_spacing(-4.0, 4.0, -2.0, 2.0, GridSpec::max_spacing(0.1, 1.0));
  const auto b = assemble_trial_state(q, 0.1, 0.0, grid, d.metric);
  EXPECT_NEAR(b.lambda, 0.105, 1e-15);
  EXPECT_EQ(b.mass_loss, 0.0);
  EXPECT_EQ(static_cast<std::int64_t>(b.samples.size()), grid.size());
  EXPECT_FALSE(b.residual.has_value());
}

TEST(TrialState, GaussianRayleighQuotientAboveLandauLevel) {
  FlatDesk d;
  const double h = 0.05;
  const auto op = assemble(h, FieldProfile::uniform(1.0, d.axis, 2.0), d.metric, d.grid);
  const auto q = build_order2_quasimode(0, 1.0, 0.0, 0.0, 2.0);
  TrialOptions o;
  o.order = 0;
  const auto b = assemble_trial_state(q, h, 0.0, d.grid, d.metric, o);
  // The discrete Landau level sits a relative O(dx^2 / h) below h b0.
  EXPECT_GE(rayleigh_quotient(op, b.samples), h * (1.0 - 5e-3));
}

TEST(TrialState, ResidualDecreasesWithOrderAndShapeCheck) {
  FlatDesk d;
  const double h = 0.05;
  const auto op = assemble(h, FieldProfile::parabolic(1.0, 2.0, d.axis, 2.0), d.metric, d.grid);
  const auto q = build_order2_quasimode(0, 1.0, 0.0, 0.0, 2.0);
  double prev = 1e300;
  for (int order = 0; order <= 2; ++order) {
    TrialOptions o;
    o.order = order;
    auto b = assemble_trial_state(q, h, 0.0, d.grid, d.metric, o);
    const double r = residual_norm(op, b);
    EXPECT_LT(r, prev);
    EXPECT_EQ(*b.residual, r);
    prev = r;
  }
  EXPECT_LT(prev, 10 * h * h);

  auto b = assemble_trial_state(q, h, 0.0, d.grid, d.metric);
  const double r = residual_norm(op, b);
  b.lambda += 0.1 * h;
  const double shifted = residual_norm(op, b);
  EXPECT_LE(shifted, r + 0.1 * h + 1e-15);
  EXPECT_GE(shifted, 0.1 * h - r);

  auto other = b;
  other.grid.Ns += 1;
  EXPECT_THROW(residual_norm(op, other), ShapeError);
}

TEST(TrialState, EnvelopeBeyondGridIsReported) {
  FlatDesk d;
  const auto q = build_order2_quasimode(0, 1.0, 0.0, 0.0, 2.0);
  TrialOptions o;
  o.cutoff_radius = 3.0;
  EXPECT_THROW(assemble_trial_state(q, 0.05, 3.8, d.grid, d.metric, o), TruncationError);
  EXPECT_THROW(assemble_trial_state(q, 0.05, 5.0, d.grid, d.metric), DomainError);
}
