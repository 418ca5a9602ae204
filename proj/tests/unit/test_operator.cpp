#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "magwell/eigensolver.hpp"
#include "magwell/error.hpp"
#include "magwell/discrete_operator.hpp"

using namespace magwell;

namespace {

FieldProfile zero_field(SAxis axis, double T) { return FieldProfile{"zero", [](double, double) { return 0.0; }, axis, T, 0.0}; }

std::vector<cdouble> random_vector(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cdouble> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

cdouble dot(std::span<const cdouble> a, std::span<const cdouble> b) {
  cdouble s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST(Operator, DirichletLaplacianOnSquare) {
  const double pi = std::numbers::pi;
  const auto axis = SAxis::interval(0.0, pi);
  const auto metric = BandMetric::flat(axis, pi / 2);
  const auto grid = GridSpec::box(0.0, pi, -pi / 2, pi / 2, 128, 128);
  AssemblyOptions o;
  o.check_resolution = false;
  const auto op = assemble(1.0, zero_field(axis, pi / 2), metric, grid, o);
  SolverOptions so;
  so.m = 3;
  so.shift = 1.0;
  const auto r = lowest_eigenpairs(op, so);
  EXPECT_NEAR(r.values[0], 2.0, 2e-3);
  EXPECT_NEAR(r.values[1], 5.0, 5e-3);
  EXPECT_NEAR(r.values[2], 5.0, 5e-3);
}

TEST(Operator, ExactlyHermitianAndNonnegative) {
  const auto axis = SAxis::interval(-2.0, 2.0);
  const auto metric = BandMetric::circle(2.0, axis, 1.0);
  const auto field = FieldProfile::parabolic(1.0, 2.0, axis, 1.0);
  const double h = 0.2;
  const auto grid = GridSpec::with_max_spacing(-2.0, 2.0, -1.0, 1.0, GridSpec::max_spacing(h, 1.0));
  const auto op = assemble(h, field, metric, grid);
  EXPECT_TRUE(op.matrix.is_exactly_hermitian());

  std::vector<cdouble> Hx(static_cast<std::size_t>(op.dimension())), Hy(Hx.size());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = random_vector(op.dimension(), seed);
    const auto y = random_vector(op.dimension(), seed + 100);
    op.matrix.matvec(x, Hx);
    op.matrix.matvec(y, Hy);
    EXPECT_NEAR(std::abs(dot(y, Hx) - std::conj(dot(x, Hy))), 0.0, 1e-9 * std::abs(dot(y, Hx)) + 1e-12);
    EXPECT_GE(rayleigh_quotient(op, op.from_scaled(x)), 0.0);
  }

  const std::vector<cdouble> zero(static_cast<std::size_t>(op.dimension()), 0.0);
  const auto f = quadratic_form(op, zero);
  EXPECT_EQ(f.q_magnetic, 0.0);
  EXPECT_EQ(f.mass_b, 0.0);
  EXPECT_EQ(f.norm2, 0.0);
}

TEST(Operator, GridResolutionError) {
  const auto axis = SAxis::interval(-2.0, 2.0);
  const auto metric = BandMetric::flat(axis, 1.0);
  const auto field = FieldProfile::uniform(1.0, axis, 1.0);
  const auto coarse = GridSpec::box(-2.0, 2.0, -1.0, 1.0, 20, 10);
  try {
    assemble(0.01, field, metric, coarse);
    FAIL() << "coarse grid accepted";
  } catch (const GridResolutionError& e) {
    EXPECT_NE(std::string(e.what()).find("0.01"), std::string::npos);
  }
}

TEST(Operator, GaugeInvariance) {
  const auto axis = SAxis::interval(-3.0, 3.0);
  const auto metric = BandMetric::flat(axis, 2.0);
  const auto field = FieldProfile::parabolic(1.0, 2.0, axis, 2.0);
  const double h = 0.1;
  const auto grid = GridSpec::with_max_spacing(-3.0, 3.0, -2.0, 2.0, GridSpec::max_spacing(h, 1.0));
  const GaugePotential A(field, metric);
  const auto shifted = A.with_gradient([](double s) { return std::sin(2 * s) + 0.3 * s * s; },
                                       [](double s) { return 2 * std::cos(2 * s) + 0.6 * s; });
  SolverOptions so;
  so.m = 3;
  so.shift = 0.9 * h;
  const auto r0 = lowest_eigenpairs(assemble(h, A, grid), so);
  const auto r1 = lowest_eigenpairs(assemble(h, shifted, grid), so);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r1.values[i], r0.values[i], 1e-10 * std::abs(r0.values[i]));
}

TEST(Operator, EigenvectorResidualAndPerturbation) {
  const auto axis = SAxis::interval(-3.0, 3.0);
  const auto metric = BandMetric::flat(axis, 2.0);
  const auto field = FieldProfile::parabolic(1.0, 2.0, axis, 2.0);
  const double h = 0.1;
  const auto grid = GridSpec::with_max_spacing(-3.0, 3.0, -2.0, 2.0, GridSpec::max_spacing(h, 1.0));
  const auto op = assemble(h, field, metric, grid);
  SolverOptions so;
  so.shift = 0.9 * h;
  const auto r = lowest_eigenpairs(op, so);
  const std::vector<cdouble> v(r.vectors[0].data(), r.vectors[0].data() + r.vectors[0].size());
  const auto u = op.from_scaled(v);
  EXPECT_LT(residual_norm(op, u, r.values[0]), 1e-7 * r.values[0]);
  EXPECT_NEAR(residual_norm(op, u, r.values[0] + 0.1 * h), 0.1 * h, 1e-7);
  EXPECT_NEAR(rayleigh_quotient(op, u), r.values[0], 1e-10);
}

TEST(Operator, FourthOrderStencil) {
  const double pi = std::numbers::pi;
  const auto axis = SAxis::interval(0.0, pi);
  const auto metric = BandMetric::flat(axis, pi / 2);
  AssemblyOptions o;
  o.check_resolution = false;
  o.stencil_order = 4;
  SolverOptions so;
  so.shift = 1.0;
  double prev = 0.0;
  for (int n : {15, 31, 63}) {
    const auto grid = GridSpec::box(0.0, pi, -pi / 2, pi / 2, n, n);
    const double err = std::abs(lowest_eigenpairs(assemble(1.0, zero_field(axis, pi / 2), metric, grid, o), so).values[0] - 2.0);
    if (prev > 0.0) EXPECT_GT(prev / err, 12.0) << n;
    prev = err;
  }
  EXPECT_LT(prev, 1e-6);
  o.stencil_order = 3;
  EXPECT_THROW(assemble(1.0, zero_field(axis, pi / 2), metric, GridSpec::box(0.0, pi, -pi / 2, pi / 2, 8, 8), o),
               DomainError);
}

TEST(Operator, FourthOrderHermitianAndGaugeInvariant) {
  const auto axis = SAxis::interval(-3.0, 3.0);
  const auto metric = BandMetric::circle(2.0, axis, 1.5);
  const auto field = FieldProfile::parabolic(1.0, 2.0, axis, 1.5);
  const double h = 0.1;
  const auto grid = GridSpec::with_max_spacing(-3.0, 3.0, -1.5, 1.5, GridSpec::max_spacing(h, 1.0));
  AssemblyOptions o;
  o.stencil_order = 4;
  const GaugePotential A(field, metric);
  const auto shifted = A.with_gradient([](double s) { return std::cos(3 * s); }, [](double s) { return -3 * std::sin(3 * s); });
  const auto op = assemble(h, A, grid, o);
  EXPECT_TRUE(op.matrix.is_exactly_hermitian());
  EXPECT_EQ(op.stencil_order, 4);
  SolverOptions so;
  so.m = 2;
  so.shift = 0.9 * h;
  const auto r0 = lowest_eigenpairs(op, so);
  const auto r1 = lowest_eigenpairs(assemble(h, shifted, grid, o), so);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(r1.values[i], r0.values[i], 1e-10 * r0.values[i]);
}
