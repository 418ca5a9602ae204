#include "magwell/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "magwell/error.hpp"

namespace magwell {

FieldProfile FieldProfile::make(std::string name, ScalarField b, SAxis axis, double t_halfwidth,
                                int samples) {
  FieldProfile f{std::move(name), std::move(b), axis, t_halfwidth, 0.0};
  double b0 = std::numeric_limits<double>::infinity();
  const int n = std::max(samples, 2);
  for (int i = 0; i < n; ++i) {
    const double s = axis.s_min + axis.length() * i / (n - 1);
    b0 = std::min(b0, f.b(s, 0.0));
  }
  if (!(b0 > 0.0)) throw DomainError(f.name + ": b must be positive on the curve (b0 = " +
                                     std::to_string(b0) + ")");
  f.b0 = b0;
  return f;
}

FieldProfile FieldProfile::uniform(double b0, SAxis axis, double t_halfwidth) {
  return make("uniform(" + std::to_string(b0) + ")", [b0](double, double) { return b0; }, axis,
              t_halfwidth);
}

FieldProfile FieldProfile::parabolic(double b0, double beta2, SAxis axis, double t_halfwidth) {
  return make("parabolic(" + std::to_string(b0) + "," + std::to_string(beta2) + ")",
              [b0, beta2](double, double t) { return b0 + 0.5 * beta2 * t * t; }, axis,
              t_halfwidth);
}

FieldProfile FieldProfile::miniwell(double b0, double mu0, double mu2, SAxis axis,
                                    double t_halfwidth) {
  return make("miniwell(" + std::to_string(b0) + "," + std::to_string(mu0) + "," +
                  std::to_string(mu2) + ")",
              [=](double s, double t) { return b0 + 0.5 * (mu0 + 0.5 * mu2 * s * s) * t * t; },
              axis, t_halfwidth);
}

const BandWell& WellData::band(int k) const {
  for (const auto& b : bands)
    if (b.k == k) return b;
  throw DomainError("no well data for band k = " + std::to_string(k));
}

namespace {

// 5-point second derivative of f at x with step d.
template <class F>
double second_difference(F&& f, double x, double d) {
  return (-f(x - 2 * d) + 16 * f(x - d) - 30 * f(x) + 16 * f(x + d) - f(x + 2 * d)) /
         (12 * d * d);
}

struct Minimum {
  double x, value;
  bool tie;
};

// Grid argmin with 3-point parabolic refinement; ties resolved toward smallest s.
Minimum locate_minimum(const std::function<double(double)>& f, const SAxis& axis, int n,
                       double level_tol) {
  const int count = axis.periodic ? n : n + 1;
  const double h = axis.length() / n;
  std::vector<double> xs(static_cast<std::size_t>(count)), vs(xs.size());
  for (int i = 0; i < count; ++i) {
    xs[static_cast<std::size_t>(i)] = axis.s_min + h * i;
    vs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
  }
  const auto it = std::min_element(vs.begin(), vs.end());
  const long imin = it - vs.begin();
  const double vmin = *it;
  const double tol = level_tol * std::max(1.0, std::abs(vmin));
  int near = 0;
  for (double v : vs)
    if (v - vmin <= tol) ++near;

  Minimum m{xs[static_cast<std::size_t>(imin)], vmin, near > 2};
  const bool interior = axis.periodic || (imin > 0 && imin < count - 1);
  if (interior && !m.tie) {
    const auto at = [&](long i) {
      const long c = static_cast<long>(count);
      return vs[static_cast<std::size_t>(((i % c) + c) % c)];
    };
    const double fm = at(imin - 1), f0 = at(imin), fp = at(imin + 1);
    const double denom = fm - 2 * f0 + fp;
    if (denom > 0) {
      const double shift = 0.5 * (fm - fp) / denom;
      if (std::abs(shift) <= 1.0) {
        const double x = m.x + shift * h;
        m.x = axis.periodic ? axis.canonical(x) : x;
        m.value = f(m.x);
      }
    }
  }
  return m;
}

}  // namespace

WellData extract_well(const FieldProfile& field, const CurveGeometry& geometry,
                      std::span<const int> ks, const WellOptions& options) {
  const SAxis& axis = field.axis;
  const double b0 = field.b0;
  const double dt = options.dt > 0 ? options.dt : 1e-3 * field.t_halfwidth;
  if (2 * dt > field.t_halfwidth) throw StencilError("band too thin for the transverse stencil");
  const double ds = options.ds > 0 ? options.ds : std::min(0.02, axis.length() / 50.0);
  const int n = std::max(options.s_samples, 8);

  // Field invariants on the curve.
  for (int i = 0; i <= n; ++i) {
    const double s = axis.s_min + axis.length() * i / n;
    const double v0 = field.b(s, 0.0);
    if (!(v0 > 0.0)) throw DomainError(field.name + ": b <= 0 on the curve");
    if (std::abs(v0 - b0) > 1e-9 * b0)
      throw NotAWellError(field.name + ": b(s,0) = " + std::to_string(v0) + " differs from b0 = " +
                          std::to_string(b0) + " at s = " + std::to_string(s));
    const double grad =
        (field.b(s, -2 * dt) - 8 * field.b(s, -dt) + 8 * field.b(s, dt) - field.b(s, 2 * dt)) /
        (12 * dt);
    if (std::abs(grad) > options.gradient_tol * std::max(1.0, b0))
      throw NotAWellError(field.name + ": d_t b(s,0) = " + std::to_string(grad) + " at s = " +
                          std::to_string(s));
  }

  WellData w;
  w.b0 = b0;
  const ScalarField b = field.b;
  w.beta2 = [b, dt](double s) {
    return (-b(s, -2 * dt) + 16 * b(s, -dt) - 30 * b(s, 0.0) + 16 * b(s, dt) - b(s, 2 * dt)) /
           (12 * dt * dt);
  };
  for (int i = 0; i <= n; ++i) {
    const double s = axis.s_min + axis.length() * i / n;
    const double v = w.beta2(s);
    if (!(v > options.curvature_tol * std::max(1.0, b0)))
      throw DegeneracyViolationError(field.name + ": beta2(" + std::to_string(s) +
                                     ") = " + std::to_string(v) + " is not positive");
  }

  const auto clamp_fd = [&](double x) {
    if (axis.periodic) return x;
    return std::clamp(x, axis.s_min + 2 * ds, axis.s_max - 2 * ds);
  };
  const auto wrap = [&](const std::function<double(double)>& f) {
    return [f, axis](double s) { return f(axis.periodic ? axis.canonical(s) : s); };
  };

  const Minimum mb = locate_minimum(w.beta2, axis, n, options.level_tol);
  w.mu0 = mb.value;
  w.x_mu0 = mb.x;
  w.mu2 = second_difference(wrap(w.beta2), clamp_fd(mb.x), ds);

  for (int k : ks) {
    if (k < 0) throw DomainError("band index must be >= 0");
    BandWell bw;
    bw.k = k;
    const double c_beta = (2.0 * k * k + 2.0 * k + 1.0) / (4.0 * b0);
    const double c_R = 0.5 * (k * k + k);
    const auto beta2 = w.beta2;
    const auto R = geometry.R;
    if (c_R == 0.0) {
      bw.V = [beta2, c_beta](double s) { return c_beta * beta2(s); };
    } else {
      bw.V = [beta2, R, c_beta, c_R](double s) { return c_beta * beta2(s) + c_R * R(s); };
    }
    const Minimum m = locate_minimum(bw.V, axis, n, options.level_tol);
    bw.x0 = m.x;
    bw.V_min = m.value;
    bw.tie = m.tie;
    bw.delta = second_difference(wrap(bw.V), clamp_fd(m.x), ds);
    bw.range_min = m.value;
    bw.range_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
      bw.range_max = std::max(bw.range_max, bw.V(axis.s_min + axis.length() * i / n));
    if (options.require_miniwell) {
      const bool on_edge = !axis.periodic && (m.x <= axis.s_min + 1e-12 || m.x >= axis.s_max - 1e-12);
      if (bw.tie || on_edge || !(bw.delta > options.curvature_tol))
        throw DegenerateMiniwellError("V_" + std::to_string(k) + " has no nondegenerate interior minimum (delta = " +
                                      std::to_string(bw.delta) + (bw.tie ? ", tie" : "") + ")");
    }
    w.bands.push_back(std::move(bw));
  }
  return w;
}

QuadraticWellReport validate_quadratic_well(const FieldProfile& field, double C, double halfwidth,
                                            int s_samples, int t_samples) {
  if (!(C > 0.0)) throw DomainError("C must be positive");
  QuadraticWellReport report;
  std::vector<double> ts;
  for (int j = 1; j <= t_samples; ++j) ts.push_back(halfwidth * j / t_samples);
  for (int j = 1; j <= 20; ++j) ts.push_back(halfwidth * std::pow(0.5, j));  // probe t -> 0
  const SAxis& axis = field.axis;
  for (int i = 0; i < s_samples; ++i) {
    const double s = axis.s_min + axis.length() * i / std::max(1, s_samples - 1);
    for (double tp : ts) {
      for (double t : {tp, -tp}) {
        ++report.samples_checked;
        const double excess = field.b(s, t) - field.b0;
        const double t2 = t * t;
        const bool lower_ok = excess >= t2 / C;
        const bool upper_ok = excess <= C * t2;
        if (!(lower_ok && upper_ok) && report.holds) {
          report.holds = false;
          report.violation = QuadraticWellReport::Violation{s, t, excess, !lower_ok};
        }
      }
    }
  }
  return report;
}

GaugePotential::GaugePotential(FieldProfile field, BandMetric metric)
    : field_(std::move(field)), metric_(std::move(metric)) {}

double GaugePotential::operator()(double s, double t) const {
  const auto integrand = [&](double tau) { return field_.b(s, tau) * metric_.sqrt_det(s, tau); };
  double value = 0.0;
  if (t != 0.0) {
    double err = 0.0, l1 = 0.0;
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, t, 15,
                                                                          1e-14, &err, &l1);
    if (!(err <= 1e-9 * std::max(1.0, l1)) || !std::isfinite(value))
      throw IntegrationError("A0(" + std::to_string(s) + ", " + std::to_string(t) +
                             "): error estimate " + std::to_string(err));
  }
  double shift = dphi_ ? dphi_(s) : 0.0;
  return -value + shift;
}

std::vector<double> GaugePotential::column(double s, std::span<const double> t_nodes) const {
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto integrand = [&](double tau) { return field_.b(s, tau) * metric_.sqrt_det(s, tau); };
  std::vector<double> out(t_nodes.size());
  const auto first_pos = std::lower_bound(t_nodes.begin(), t_nodes.end(), 0.0) - t_nodes.begin();
  // March upward from t = 0.
  double acc = 0.0, prev = 0.0;
  for (auto j = first_pos; j < static_cast<long>(t_nodes.size()); ++j) {
    const double t = t_nodes[static_cast<std::size_t>(j)];
    acc += GL::integrate(integrand, prev, t);
    prev = t;
    out[static_cast<std::size_t>(j)] = -acc;
  }
  // March downward.
  acc = 0.0;
  prev = 0.0;
  for (auto j = first_pos - 1; j >= 0; --j) {
    const double t = t_nodes[static_cast<std::size_t>(j)];
    acc += GL::integrate(integrand, prev, t);
    prev = t;
    out[static_cast<std::size_t>(j)] = -acc;
  }
  for (double v : out)
    if (!std::isfinite(v)) throw IntegrationError("non-finite gauge potential column");
  return out;
}

GaugePotential GaugePotential::with_gradient(std::function<double(double)> phi,
                                             std::function<double(double)> dphi) const {
  GaugePotential g = *this;
  const auto old_phi = phi_;
  const auto old_dphi = dphi_;
  if (old_phi) {
    g.phi_ = [old_phi, phi](double s) { return old_phi(s) + phi(s); };
    g.dphi_ = [old_dphi, dphi](double s) { return old_dphi(s) + dphi(s); };
  } else {
    g.phi_ = std::move(phi);
    g.dphi_ = std::move(dphi);
  }
  return g;
}

double GaugePotential::gradient_increment(double s0, double s1) const {
  return phi_ ? phi_(s1) - phi_(s0) : 0.0;
}

}  // namespace magwell
