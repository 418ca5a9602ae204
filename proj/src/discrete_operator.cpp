#include "magwell/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "magwell/error.hpp"

namespace magwell {

GridSpec GridSpec::box(double s_min, double s_max, double t_min, double t_max, int Ns, int Nt) {
  if (!(s_max > s_min) || !(t_max > t_min)) throw DomainError("empty grid box");
  if (Ns < 1 || Nt < 1) throw DomainError("grid needs at least one interior node per direction");
  return {s_min, s_max, t_min, t_max, Ns, Nt};
}

GridSpec GridSpec::with_max_spacing(double s_min, double s_max, double t_min, double t_max,
                                    double max_spacing) {
  if (!(max_spacing > 0.0)) throw DomainError("max_spacing must be positive");
  const int Ns = std::max(1, static_cast<int>(std::ceil((s_max - s_min) / max_spacing)) - 1);
  const int Nt = std::max(1, static_cast<int>(std::ceil((t_max - t_min) / max_spacing)) - 1);
  return box(s_min, s_max, t_min, t_max, Ns, Nt);
}

std::vector<double> GridSpec::s_nodes() const {
  std::vector<double> v(static_cast<std::size_t>(Ns));
  for (int i = 0; i < Ns; ++i) v[static_cast<std::size_t>(i)] = s(i);
  return v;
}

std::vector<double> GridSpec::t_nodes() const {
  std::vector<double> v(static_cast<std::size_t>(Nt));
  for (int j = 0; j < Nt; ++j) v[static_cast<std::size_t>(j)] = t(j);
  return v;
}

void GridSpec::check_resolution(double h, double b0) const {
  const double limit = max_spacing(h, b0);
  if (ds() > limit * (1 + 1e-12) || dt() > limit * (1 + 1e-12))
    throw GridResolutionError("h = " + std::to_string(h) + ": spacing (" + std::to_string(ds()) +
                              ", " + std::to_string(dt()) + ") exceeds sqrt(h/b0)/8 = " +
                              std::to_string(limit));
}

std::vector<cdouble> DiscreteOperator::to_scaled(std::span<const cdouble> u) const {
  if (static_cast<std::int64_t>(u.size()) != dimension()) throw ShapeError("state size mismatch");
  std::vector<cdouble> v(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) v[n] = u[n] * std::sqrt(mass[n]);
  return v;
}

std::vector<cdouble> DiscreteOperator::from_scaled(std::span<const cdouble> v) const {
  if (static_cast<std::int64_t>(v.size()) != dimension()) throw ShapeError("state size mismatch");
  std::vector<cdouble> u(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) u[n] = v[n] / std::sqrt(mass[n]);
  return u;
}

DiscreteOperator assemble(double h, const GaugePotential& gauge, const GridSpec& grid,
                          const AssemblyOptions& options) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  const FieldProfile& field = gauge.field();
  const BandMetric& metric = gauge.metric();
  if (options.check_resolution) grid.check_resolution(h, field.b0);
  if (options.stencil_order != 2 && options.stencil_order != 4)
    throw DomainError("stencil order must be 2 or 4");

  const int Ns = grid.Ns, Nt = grid.Nt;
  const double ds = grid.ds(), dt = grid.dt();
  const auto s_nodes = grid.s_nodes();
  const auto t_nodes = grid.t_nodes();

  DiscreteOperator op;
  op.h = h;
  op.grid = grid;
  op.field_name = field.name;
  op.metric_name = metric.name;
  op.stencil_order = options.stencil_order;
  const auto N = static_cast<std::size_t>(grid.size());
  op.mass.resize(N);
  op.b.resize(N);
  std::vector<double> diag(N, 0.0);
  for (int i = 0; i < Ns; ++i)
    for (int j = 0; j < Nt; ++j) {
      const auto n = static_cast<std::size_t>(grid.index(i, j));
      op.mass[n] = metric.sqrt_det(s_nodes[static_cast<std::size_t>(i)], t_nodes[static_cast<std::size_t>(j)]) * ds * dt;
      op.b[n] = field.b(s_nodes[static_cast<std::size_t>(i)], t_nodes[static_cast<std::size_t>(j)]);
    }
  if (options.potential) {
    op.potential.resize(N);
    for (int i = 0; i < Ns; ++i)
      for (int j = 0; j < Nt; ++j)
        op.potential[static_cast<std::size_t>(grid.index(i, j))] =
            options.potential(s_nodes[static_cast<std::size_t>(i)], t_nodes[static_cast<std::size_t>(j)]);
  }

  std::vector<Eigen::Triplet<cdouble>> entries;
  entries.reserve(N * (options.stencil_order == 4 ? 9 : 5));
  const auto scaled_pair = [&](std::size_t r, std::size_t c, cdouble k_rc) {
    const cdouble z = k_rc / std::sqrt(op.mass[r] * op.mass[c]);
    entries.emplace_back(static_cast<int>(r), static_cast<int>(c), z);
    entries.emplace_back(static_cast<int>(c), static_cast<int>(r), std::conj(z));
  };

  // Link weights: nearest neighbours only, or the fourth-order combination
  // 4/3 (step 1) and -1/12 (step 2, the 1/4 from the doubled length included).
  // A step-2 link to the ghost node beyond the edge uses the odd reflection
  // u_ghost = -u, which doubles its diagonal weight.
  const bool fourth = options.stencil_order == 4;
  const double c1 = fourth ? 4.0 / 3.0 : 1.0, c2 = -1.0 / 12.0;

  // s-edges: edge e joins s-index e-1 and e (index -1 and Ns are boundary nodes).
  // theta(e, j) = (1/h) int A0(s, t_j) ds over edge e, by 5-point Gauss-Legendre.
  using GL5 = boost::math::quadrature::gauss<double, 5>;
  const auto& gl_x = GL5::abscissa();
  const auto& gl_w = GL5::weights();
  std::vector<double> theta(static_cast<std::size_t>(Ns + 1) * static_cast<std::size_t>(Nt), 0.0);
  const auto th = [&](int e, int j) -> double& {
    return theta[static_cast<std::size_t>(e) * static_cast<std::size_t>(Nt) + static_cast<std::size_t>(j)];
  };
  for (int e = 1; e <= Ns - 1; ++e) {
    const double s0 = grid.s_min + e * ds, sm = s0 + 0.5 * ds;
    for (std::size_t q = 0; q < gl_x.size(); ++q) {
      for (int sign : {-1, 1}) {
        if (gl_x[q] == 0.0 && sign < 0) continue;
        const double sq = sm + sign * gl_x[q] * 0.5 * ds;
        const auto col = gauge.column(sq, t_nodes);
        for (int j = 0; j < Nt; ++j) th(e, j) += gl_w[q] * 0.5 * ds * col[static_cast<std::size_t>(j)];
      }
    }
    const double shift = gauge.gradient_increment(s0, s0 + ds);
    for (int j = 0; j < Nt; ++j) th(e, j) = (th(e, j) + shift) / h;
  }

  // w |e^{-i theta} u_b - u_a|^2 adds w to both diagonals and -w e^{-i theta} at (a, b).
  const auto s_link = [&](int a, int b, int j, double w, double phase) {
    if (a >= 0) diag[static_cast<std::size_t>(grid.index(a, j))] += w;
    if (b <= Ns - 1) diag[static_cast<std::size_t>(grid.index(b, j))] += w;
    if (a >= 0 && b <= Ns - 1)
      scaled_pair(static_cast<std::size_t>(grid.index(a, j)), static_cast<std::size_t>(grid.index(b, j)),
                  -w * cdouble(std::cos(phase), -std::sin(phase)));
  };
  for (int j = 0; j < Nt; ++j) {
    const double tj = t_nodes[static_cast<std::size_t>(j)];
    for (int e = 0; e <= Ns; ++e) {
      const double sm = grid.s_min + (e + 0.5) * ds;
      s_link(e - 1, e, j, c1 * h * h * (dt / ds) / metric.sqrt_det(sm, tj), th(e, j));
    }
    if (fourth)
      for (int a = -2; a <= Ns - 1; ++a) {
        const int b = a + 2;
        const double sm = grid.s_min + (a + 2) * ds;
        const double phase = (a >= 0 && b <= Ns - 1) ? th(a + 1, j) + th(a + 2, j) : 0.0;
        const double ghost = (a == -2 || b == Ns + 1) ? 2.0 : 1.0;
        s_link(a, b, j, ghost * c2 * h * h * (dt / ds) / metric.sqrt_det(sm, tj), phase);
      }
  }

  // t-edges carry no phase (A1 = 0).
  const auto t_link = [&](int i, int a, int b, double w) {
    if (a >= 0) diag[static_cast<std::size_t>(grid.index(i, a))] += w;
    if (b <= Nt - 1) diag[static_cast<std::size_t>(grid.index(i, b))] += w;
    if (a >= 0 && b <= Nt - 1)
      scaled_pair(static_cast<std::size_t>(grid.index(i, a)), static_cast<std::size_t>(grid.index(i, b)),
                  cdouble(-w, 0.0));
  };
  for (int i = 0; i < Ns; ++i) {
    const double si = s_nodes[static_cast<std::size_t>(i)];
    for (int e = 0; e <= Nt; ++e) {
      const double tm = grid.t_min + (e + 0.5) * dt;
      t_link(i, e - 1, e, c1 * h * h * (ds / dt) * metric.sqrt_det(si, tm));
    }
    if (fourth)
      for (int a = -2; a <= Nt - 1; ++a) {
        const double tm = grid.t_min + (a + 2) * dt;
        const double ghost = (a == -2 || a + 2 == Nt + 1) ? 2.0 : 1.0;
        t_link(i, a, a + 2, ghost * c2 * h * h * (ds / dt) * metric.sqrt_det(si, tm));
      }
  }

  for (std::size_t n = 0; n < N; ++n) {
    double d = diag[n] / op.mass[n];
    if (!op.potential.empty()) d += op.potential[n];
    entries.emplace_back(static_cast<int>(n), static_cast<int>(n), cdouble(d, 0.0));
  }
  op.matrix = HermitianCsr::from_triplets(static_cast<std::int64_t>(N), std::move(entries));
  return op;
}

DiscreteOperator assemble(double h, const FieldProfile& field, const BandMetric& metric,
                          const GridSpec& grid, const AssemblyOptions& options) {
  return assemble(h, GaugePotential(field, metric), grid, options);
}

namespace {

double hermitian_form(const DiscreteOperator& op, const std::vector<cdouble>& v) {
  std::vector<cdouble> Hv(v.size());
  op.matrix.matvec(v, Hv);
  double q = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) q += (std::conj(v[n]) * Hv[n]).real();
  return q;
}

}  // namespace

QuadraticForm quadratic_form(const DiscreteOperator& op, std::span<const cdouble> u) {
  const auto v = op.to_scaled(u);
  QuadraticForm r;
  r.q_magnetic = hermitian_form(op, v);
  double umax = 0.0, edge = 0.0;
  const GridSpec& g = op.grid;
  for (int i = 0; i < g.Ns; ++i)
    for (int j = 0; j < g.Nt; ++j) {
      const auto n = static_cast<std::size_t>(g.index(i, j));
      const double p = std::norm(v[n]);
      if (!op.potential.empty()) r.q_magnetic -= op.potential[n] * p;
      r.norm2 += p;
      r.mass_b += op.h * op.b[n] * p;
      const double a = std::abs(u[n]);
      umax = std::max(umax, a);
      if (i == 0 || j == 0 || i == g.Ns - 1 || j == g.Nt - 1) edge = std::max(edge, a);
    }
  r.touches_boundary = umax > 0 && edge > 1e-6 * umax;
  return r;
}

std::vector<std::vector<cdouble>> random_bump_states(const GridSpec& grid, double h, int count,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double Ls = grid.s_max - grid.s_min, Lt = grid.t_max - grid.t_min;
  const double ell = std::sqrt(h);
  std::vector<std::vector<cdouble>> out;
  for (int c = 0; c < count; ++c) {
    const double ws = ell * (1.0 + 3.0 * U(rng)), wt = ell * (1.0 + 3.0 * U(rng));
    const double s0 = grid.s_min + 0.5 * Ls + (U(rng) - 0.5) * std::max(0.0, Ls - 12 * ws);
    const double t0 = grid.t_min + 0.5 * Lt + (U(rng) - 0.5) * std::max(0.0, Lt - 12 * wt);
    const double ps = 2.0 * (U(rng) - 0.5), pt = 2.0 * (U(rng) - 0.5);
    const cdouble amp = std::polar(1.0, 2 * M_PI * U(rng));
    std::vector<cdouble> u(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.Ns; ++i)
      for (int j = 0; j < grid.Nt; ++j) {
        const double x = (grid.s(i) - s0) / ws, y = (grid.t(j) - t0) / wt;
        const double phase = (ps * (grid.s(i) - s0) + pt * (grid.t(j) - t0)) / h;
        u[static_cast<std::size_t>(grid.index(i, j))] =
            amp * std::exp(-0.5 * (x * x + y * y)) * std::polar(1.0, phase);
      }
    out.push_back(std::move(u));
  }
  return out;
}

MontgomeryReport montgomery_check(const DiscreteOperator& op,
                                  const std::vector<std::vector<cdouble>>& trials,
                                  double eps_disc) {
  MontgomeryReport rep;
  rep.eps_disc = eps_disc;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const QuadraticForm q = quadratic_form(op, trials[i]);
    if (q.touches_boundary) ++rep.boundary_warnings;
    if (!(q.mass_b > 0)) continue;
    const double margin = (q.q_magnetic - q.mass_b) / q.mass_b;
    ++rep.checked;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst = static_cast<int>(i);
    }
  }
  rep.passes = rep.checked > 0 && rep.min_margin >= -eps_disc;
  return rep;
}

double montgomery_deficit(const DiscreteOperator& op, std::span<const cdouble> u) {
  const QuadraticForm q = quadratic_form(op, u);
  if (!(q.mass_b > 0)) throw DomainError("state has zero mass");
  return std::max(0.0, 1.0 - q.q_magnetic / q.mass_b);
}

double rayleigh_quotient(const DiscreteOperator& op, std::span<const cdouble> u) {
  const auto v = op.to_scaled(u);
  double n2 = 0.0;
  for (const auto& x : v) n2 += std::norm(x);
  if (!(n2 > 0)) throw DomainError("zero state");
  return hermitian_form(op, v) / n2;
}

double residual_norm(const DiscreteOperator& op, std::span<const cdouble> u, double lambda) {
  const auto v = op.to_scaled(u);
  std::vector<cdouble> Hv(v.size());
  op.matrix.matvec(v, Hv);
  double r2 = 0.0, n2 = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    r2 += std::norm(Hv[n] - lambda * v[n]);
    n2 += std::norm(v[n]);
  }
  if (!(n2 > 0)) throw DomainError("zero state");
  return std::sqrt(r2 / n2);
}

}  // namespace magwell
