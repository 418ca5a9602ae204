#include <cmath>
#include <random>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <gtest/gtest.h>

#include "magwell/error.hpp"
#include "magwell/oscillator.hpp"

using namespace magwell;

namespace {

// psi_m from the closed form with physicists' Hermite polynomials.
double psi_closed(int m, double b0, double t) {
  const double x = std::sqrt(b0) * t;
  if (std::abs(x) > 40.0) return 0.0;
  const double norm = std::pow(2.0, m) * boost::math::factorial<double>(static_cast<unsigned>(m)) * std::sqrt(M_PI);
  return std::pow(b0, 0.25) * boost::math::hermite(static_cast<unsigned>(m), x) * std::exp(-0.5 * x * x) / std::sqrt(norm);
}

double moment_oracle(int k, double b0, int p, int q) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  return integrator.integrate([&](double t) {
    const double w = psi_closed(k + q, b0, t) * psi_closed(k, b0, t);
    return w == 0.0 ? 0.0 : std::pow(t, p) * w;
  });
}

}  // namespace

TEST(OscillatorBasis, MatchesClosedForm) {
  const OscillatorBasis basis(1.7, 8);
  for (double t : {-2.0, -0.3, 0.0, 0.8, 3.1}) {
    const auto v = basis.values(t);
    for (int m = 0; m <= 8; ++m) EXPECT_NEAR(v[static_cast<std::size_t>(m)], psi_closed(m, 1.7, t), 1e-12);
  }
}

TEST(OscillatorBasis, Orthonormal) {
  const double b0 = 0.8;
  const int M = 10;
  const OscillatorBasis basis(b0, M);
  const auto rule = gauss_hermite(4 * M);
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= M; ++n) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        // Substitution t = x / sqrt(b0) against weight exp(-x^2).
        const double t = rule.nodes[i] / std::sqrt(b0);
        s += rule.weights[i] * std::exp(rule.nodes[i] * rule.nodes[i]) * basis.value(m, t) * basis.value(n, t) / std::sqrt(b0);
      }
      EXPECT_NEAR(s, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
}

TEST(OscillatorBasis, EigenRelation) {
  const double b0 = 1.3, d = 1e-2;
  const OscillatorBasis basis(b0, 6);
  for (int m = 0; m <= 6; ++m) {
    double r2 = 0.0;
    for (double t = -5.0; t <= 5.0; t += 0.05) {
      const auto f = [&](double x) { return basis.value(m, x); };
      const double second = (-f(t - 2 * d) + 16 * f(t - d) - 30 * f(t) + 16 * f(t + d) - f(t + 2 * d)) / (12 * d * d);
      const double L0 = -second + b0 * b0 * t * t * f(t);
      r2 += 0.05 * std::pow(L0 - basis.eigenvalue(m) * f(t), 2);
    }
    EXPECT_LT(std::sqrt(r2), 1e-6) << m;
  }
}

TEST(OscillatorBasis, Derivatives) {
  const OscillatorBasis basis(2.0, 5);
  const double t = 0.37, d = 1e-5;
  const auto der = basis.derivatives(t);
  for (int m = 0; m <= 5; ++m)
    EXPECT_NEAR(der[static_cast<std::size_t>(m)], (basis.value(m, t + d) - basis.value(m, t - d)) / (2 * d), 1e-8);
}

TEST(GaussHermite, Moments) {
  const auto rule = gauss_hermite(12);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    m0 += rule.weights[i];
    m2 += rule.weights[i] * x * x;
    m4 += rule.weights[i] * std::pow(x, 4);
  }
  EXPECT_NEAR(m0, std::sqrt(M_PI), 1e-13);
  EXPECT_NEAR(m2, std::sqrt(M_PI) / 2, 1e-13);
  EXPECT_NEAR(m4, 3 * std::sqrt(M_PI) / 4, 1e-13);
}

TEST(MomentTable, Examples) {
  EXPECT_NEAR(moment_table(0, 1.0, 2, 0), 0.5, 1e-15);
  EXPECT_NEAR(moment_table(0, 1.0, 4, 0), 0.75, 1e-15);
  EXPECT_EQ(moment_table(1, 1.0, 1, 0), 0.0);
  EXPECT_EQ(moment_table(0, 1.0, 2, -2), 0.0);
  for (int k = 0; k <= 6; ++k) {
    const double b0 = 1.4;
    EXPECT_NEAR(moment_table(k, b0, 2, 0), (2 * k + 1) / (2 * b0), 1e-13);
    EXPECT_NEAR(moment_table(k, b0, 4, 0), 3.0 * (2 * k * k + 2 * k + 1) / (4 * b0 * b0), 1e-13);
  }
}

TEST(MomentTable, QuadratureOracle) {
  for (double b0 : {0.7, 1.0, 2.3})
    for (int k = 0; k <= 6; ++k)
      for (int p = 0; p <= 4; ++p)
        for (int q = -4; q <= 4; ++q) {
          if (k + q < 0) continue;
          const double expected = (std::abs(q) > p) ? 0.0 : moment_oracle(k, b0, p, q);
          EXPECT_NEAR(moment_table(k, b0, p, q), expected, 1e-10) << k << " " << p << " " << q;
        }
}

TEST(Resolvent, Examples) {
  const double b0 = 1.5;
  const int k = 2;
  const auto up = oscillator_resolvent_solve(ModeExpansion::single(k + 2, 0), k, b0);
  EXPECT_NEAR(std::abs(up(k + 2, 0) - 1.0 / (4 * b0)), 0.0, 1e-15);
  const auto down = oscillator_resolvent_solve(ModeExpansion::single(k - 1, 1), k, b0);
  EXPECT_NEAR(std::abs(down(k - 1, 1) + 1.0 / (2 * b0)), 0.0, 1e-15);
  EXPECT_THROW(oscillator_resolvent_solve(ModeExpansion::single(k, 0), k, b0), SolvabilityViolationError);
  ModeExpansion tiny = ModeExpansion::single(k + 1, 0);
  tiny.add(k, 0, 1e-14);
  const auto ok = oscillator_resolvent_solve(tiny, k, b0);
  EXPECT_EQ(ok(k, 0), cdouble(0.0));
}

TEST(Order2Quasimode, FlatGroundState) {
  const auto q = build_order2_quasimode(0, 1.0, 0.0, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(q.lambda0, 1.0);
  EXPECT_NEAR(q.lambda2, 0.5, 1e-15);
  ASSERT_EQ(q.phi1.terms().size(), 1u);
  // phi1 = (L0 - b0)^{-1}(2 i b0 t1 d_s phi0) = i / sqrt(2 b0) psi_1 chi0'.
  EXPECT_NEAR(std::abs(q.phi1(1, 1) - cdouble(0.0, 1.0 / std::sqrt(2.0))), 0.0, 1e-15);
  EXPECT_LT(q.kernel_residual_2, 1e-12);
}

TEST(Order2Quasimode, ExcitedBandWithCurvature) {
  const auto q = build_order2_quasimode(1, 1.0, 0.0, 1.0, 2.0);
  EXPECT_NEAR(q.lambda2, 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(q.lambda0, 3.0);
}

TEST(Order2Quasimode, RandomizedKernelCheck) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = trial % 4;
    const double b0 = 0.5 + 1.5 * (U(rng) + 1) / 2, beta2 = 0.2 + 3.0 * (U(rng) + 1) / 2;
    const auto q = build_order2_quasimode(k, b0, U(rng), U(rng), beta2);
    EXPECT_LT(q.kernel_residual_1, 1e-12);
    EXPECT_LT(q.kernel_residual_2, 1e-12);
  }
}

TEST(Order2Quasimode, WrongLambda2IsDetected) {
  // Rebuilding the second-order right-hand side with a perturbed lambda2 must leave a kernel component.
  const ScaledOperator L{1, 1.2, 0.3, -0.4, 1.7};
  const auto q = build_order2_quasimode(1, 1.2, 0.3, -0.4, 1.7);
  ModeExpansion rhs = cdouble(q.lambda2 + 1e-3) * q.phi0;
  rhs -= L.L2(q.phi0);
  rhs -= L.L1(q.phi1);
  EXPECT_THROW(oscillator_resolvent_solve(rhs, 1, 1.2), SolvabilityViolationError);
}

TEST(CutoffExponent, Values) {
  EXPECT_DOUBLE_EQ(cutoff_exponent(0.125), 9.0 / 8.0);
  EXPECT_DOUBLE_EQ(cutoff_exponent(0.25), 0.75);
  EXPECT_NEAR(cutoff_exponent(1e-9), 1.0, 1e-8);
  for (double b = 0.01; b < 0.5; b += 0.01) EXPECT_LE(cutoff_exponent(b), 9.0 / 8.0 + 1e-15);
  EXPECT_THROW(cutoff_exponent(0.5), DomainError);
  EXPECT_THROW(cutoff_exponent(0.0), DomainError);
}

TEST(ModeExpansion, Algebra) {
  auto a = ModeExpansion::single(2, 0, 2.0);
  a += ModeExpansion::single(2, 0, -2.0);
  EXPECT_TRUE(a.pruned().empty());
  const auto t2 = ModeExpansion::single(0, 0).times_t1_pow(1.0, 2);
  EXPECT_NEAR(t2(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(t2(2, 0).real(), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_EQ(ModeExpansion::single(3, 1).d_s().max_derivative(), 2);
}
