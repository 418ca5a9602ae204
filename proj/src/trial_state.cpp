#include "magwell/trial_state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "magwell/error.hpp"

namespace magwell {

namespace {

// p(u) = 1 - (35u^4 - 84u^5 + 70u^6 - 20u^7) and its derivatives on [0, 1].
double smoothstep(double u, int order) {
  const double v = u - u * u;
  switch (order) {
    case 0: return 1.0 - u * u * u * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
    case 1: return -140.0 * v * v * v;
    case 2: return -420.0 * v * v * (1.0 - 2.0 * u);
    case 3: return -840.0 * v * ((1.0 - 2.0 * u) * (1.0 - 2.0 * u) - v);
    default: throw DomainError("cutoff derivative order must be 0..3");
  }
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
  if (!std::isfinite(v)) throw IntegrationError("envelope quadrature produced a non-finite value");
  return v;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

SmoothCutoff::SmoothCutoff(double flat_, double support_) : flat(flat_), support(support_) {
  if (!(flat >= 0.0) || !(support > flat))
    throw DomainError("cutoff needs 0 <= flat < support");
}

double SmoothCutoff::derivative(double x, int order) const {
  if (order < 0 || order > 3) throw DomainError("cutoff derivative order must be 0..3");
  const double ax = std::abs(x);
  if (ax >= support) return 0.0;
  if (ax <= flat) return order == 0 ? 1.0 : 0.0;
  const double L = support - flat;
  const double u = (ax - flat) / L;
  const double sign = (order % 2 == 1 && x < 0) ? -1.0 : 1.0;
  return sign * smoothstep(u, order) / std::pow(L, order);
}

GaussianEnvelope::GaussianEnvelope(double h, double beta, double center,
                                   std::optional<SmoothCutoff> cutoff)
    : h_(h), beta_(beta), center_(center), width_(0.0), cutoff_(cutoff) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("beta must lie in (0, 1/2)");
  width_ = std::pow(h, beta);
  c_ = 1.0;
  const double n2 = integrate([this](double s) { return std::pow(raw(s, 0), 2); }, center_ - reach(),
                              center_ + reach());
  if (!(n2 > 0.0)) throw DomainError("envelope vanishes identically");
  c_ = 1.0 / std::sqrt(n2);
}

double GaussianEnvelope::reach() const {
  const double bare = 14.0 * width_;
  return cutoff_ ? std::min(cutoff_->support, bare) : bare;
}

double GaussianEnvelope::raw(double s, int d) const {
  const double y = s - center_;
  const double w2 = width_ * width_;
  const double g = std::exp(-0.5 * y * y / w2);
  // Gaussian derivatives g^{(n)} = P_n(y) g.
  const double gd[4] = {g, -y / w2 * g, (y * y / (w2 * w2) - 1.0 / w2) * g,
                        (3.0 * y / (w2 * w2) - y * y * y / (w2 * w2 * w2)) * g};
  if (!cutoff_) return gd[d];
  double sum = 0.0;
  for (int j = 0; j <= d; ++j) {
    const double c = cutoff_->derivative(y, j);
    if (c != 0.0) sum += binomial(d, j) * c * gd[d - j];
  }
  return sum;
}

double GaussianEnvelope::derivative(double s, int d) const {
  if (d < 0 || d > 3) throw DomainError("envelope derivative order must be 0..3");
  return c_ * raw(s, d);
}

double GaussianEnvelope::mass_loss(double lo, double hi) const {
  const double a = center_ - reach(), b = center_ + reach();
  const auto f = [this](double s) { return std::pow(derivative(s, 0), 2); };
  double out = 0.0;
  if (lo > a) out += integrate(f, a, std::min(lo, b));
  if (hi < b) out += integrate(f, std::max(hi, a), b);
  return std::clamp(out, 0.0, 1.0);
}

double GaussianEnvelope::moment_norm(int m, int d) const {
  if (m < 0) throw DomainError("moment order must be >= 0");
  const auto f = [this, m, d](double s) {
    const double v = std::pow(s - center_, m) * derivative(s, d);
    return v * v;
  };
  // Split at the center so the integrand's peaks are resolved on both sides.
  return std::sqrt(integrate(f, center_ - reach(), center_) + integrate(f, center_, center_ + reach()));
}

EnvelopeSamples gaussian_envelope(const GaussianEnvelope& envelope, std::span<const double> s_nodes,
                                  double max_mass_loss) {
  if (s_nodes.empty()) throw DomainError("empty s-grid");
  EnvelopeSamples out;
  out.s.assign(s_nodes.begin(), s_nodes.end());
  out.mass_loss = envelope.mass_loss(s_nodes.front(), s_nodes.back());
  if (out.mass_loss > max_mass_loss)
    throw TruncationError("envelope of width " + std::to_string(envelope.width()) + " loses " +
                          std::to_string(out.mass_loss) + " of its mass outside [" +
                          std::to_string(s_nodes.front()) + ", " + std::to_string(s_nodes.back()) + "]");
  out.values.reserve(s_nodes.size());
  for (double s : s_nodes) out.values.push_back(envelope(s));
  return out;
}

QuasimodeBundle assemble_trial_state(const Order2Quasimode& q, double h, double x,
                                     const GridSpec& grid, const BandMetric& metric,
                                     const TrialOptions& opt) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (opt.order < 0 || opt.order > 2) throw DomainError("quasimode order must be 0, 1 or 2");
  if (!(x > grid.s_min && x < grid.s_max))
    throw DomainError("well point s = " + std::to_string(x) + " outside the grid");

  const double radius = opt.cutoff_radius > 0 ? opt.cutoff_radius : std::min(x - grid.s_min, grid.s_max - x);
  const GaussianEnvelope env(h, opt.beta, x, SmoothCutoff(opt.cutoff_flat_fraction * radius, radius));
  const double loss = env.mass_loss(grid.s_min, grid.s_max);
  if (loss > opt.max_mass_loss)
    throw TruncationError("envelope support exceeds the grid; mass loss " + std::to_string(loss));

  const double tsup = opt.transverse_support > 0 ? opt.transverse_support : 0.8 * metric.t_halfwidth;
  const SmoothCutoff tau(opt.transverse_flat_fraction * tsup, tsup);

  ModeExpansion total = q.phi0;
  if (opt.order >= 1) total += std::sqrt(h) * q.phi1;
  if (opt.order >= 2) total += h * q.phi2;
  total = total.pruned();
  const int max_d = std::max(total.max_derivative(), 0);
  if (max_d > 3) throw DomainError("quasimode needs envelope derivatives above order 3");
  const OscillatorBasis basis(q.b0, std::max(total.max_mode(), 0));

  const auto s_nodes = grid.s_nodes();
  const auto t_nodes = grid.t_nodes();
  std::vector<std::vector<double>> E(s_nodes.size());
  for (std::size_t i = 0; i < s_nodes.size(); ++i)
    for (int d = 0; d <= max_d; ++d) E[i].push_back(env.derivative(s_nodes[i], d));
  std::vector<std::vector<double>> psi(t_nodes.size());
  std::vector<double> tau_t(t_nodes.size());
  for (std::size_t j = 0; j < t_nodes.size(); ++j) {
    psi[j] = basis.values(t_nodes[j] / std::sqrt(h));
    tau_t[j] = tau(t_nodes[j]);
  }

  QuasimodeBundle b;
  b.grid = grid;
  b.k = q.k;
  b.order = opt.order;
  b.h = h;
  b.beta = opt.beta;
  b.x = x;
  b.width = env.width();
  b.lambda0 = q.lambda0;
  b.lambda2 = q.lambda2;
  b.lambda = h * (q.lambda0 + h * q.lambda2);
  b.mass_loss = loss;
  b.samples.assign(static_cast<std::size_t>(grid.size()), cdouble(0.0));
  const double pre = std::pow(h, -0.25);
  for (int i = 0; i < grid.Ns; ++i) {
    const auto& Ei = E[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid.Nt; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (tau_t[ju] == 0.0) continue;
      cdouble sum = 0.0;
      for (const auto& [key, c] : total.terms())
        sum += c * psi[ju][static_cast<std::size_t>(key.first)] * Ei[static_cast<std::size_t>(key.second)];
      const double a = metric.a(s_nodes[static_cast<std::size_t>(i)], t_nodes[ju]);
      b.samples[static_cast<std::size_t>(grid.index(i, j))] = pre * tau_t[ju] * std::pow(a, -0.25) * sum;
    }
  }
  return b;
}

double residual_norm(const DiscreteOperator& op, QuasimodeBundle& bundle) {
  if (!(bundle.grid == op.grid) || static_cast<std::int64_t>(bundle.samples.size()) != op.dimension())
    throw ShapeError("quasimode grid " + std::to_string(bundle.grid.Ns) + "x" +
                     std::to_string(bundle.grid.Nt) + " does not match operator grid " +
                     std::to_string(op.grid.Ns) + "x" + std::to_string(op.grid.Nt));
  const double r = residual_norm(op, bundle.samples, bundle.lambda);
  bundle.residual = r;
  return r;
}

}  // namespace magwell
