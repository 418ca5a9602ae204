#include "magwell/oscillator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "magwell/error.hpp"

namespace magwell {

OscillatorBasis::OscillatorBasis(double b0, int max_index) : b0_(b0), max_index_(max_index) {
  if (!(b0 > 0.0)) throw DomainError("oscillator frequency b0 must be positive");
  if (max_index < 0) throw DomainError("max_index must be >= 0");
}

std::vector<double> OscillatorBasis::values(double t1) const {
  std::vector<double> out(static_cast<std::size_t>(max_index_ + 1));
  const double x = std::sqrt(b0_) * t1;
  const double scale = std::pow(b0_, 0.25);
  out[0] = scale * std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (max_index_ >= 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (int m = 1; m < max_index_; ++m) {
    const auto mu = static_cast<std::size_t>(m);
    out[mu + 1] = std::sqrt(2.0 / (m + 1)) * x * out[mu] - std::sqrt(double(m) / (m + 1)) * out[mu - 1];
  }
  return out;
}

double OscillatorBasis::value(int m, double t1) const {
  if (m < 0 || m > max_index_) throw DomainError("oscillator index out of range");
  return values(t1)[static_cast<std::size_t>(m)];
}

std::vector<double> OscillatorBasis::derivatives(double t1) const {
  OscillatorBasis wider(b0_, max_index_ + 1);
  const auto v = wider.values(t1);
  std::vector<double> out(static_cast<std::size_t>(max_index_ + 1));
  for (int m = 0; m <= max_index_; ++m) {
    const auto mu = static_cast<std::size_t>(m);
    const double down = m > 0 ? std::sqrt(0.5 * m) * v[mu - 1] : 0.0;
    out[mu] = std::sqrt(b0_) * (down - std::sqrt(0.5 * (m + 1)) * v[mu + 1]);
  }
  return out;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("quadrature order must be >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(std::sqrt(M_PI) * v * v);
  }
  return rule;
}

double moment_table(int k, double b0, int p, int q) {
  if (!(b0 > 0.0)) throw DomainError("b0 must be positive");
  if (p < 0 || k < 0) throw DomainError("p and k must be >= 0");
  if (k + q < 0 || std::abs(q) > p || (p + q) % 2 != 0) return 0.0;
  // Apply t1 p times to psi_k, then read off the psi_{k+q} coefficient.
  std::vector<double> c(static_cast<std::size_t>(k + p + 1), 0.0);
  c[static_cast<std::size_t>(k)] = 1.0;
  const double inv = 1.0 / std::sqrt(2.0 * b0);
  for (int step = 0; step < p; ++step) {
    std::vector<double> next(c.size(), 0.0);
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (c[m] == 0.0) continue;
      if (m > 0) next[m - 1] += c[m] * std::sqrt(double(m)) * inv;
      if (m + 1 < c.size()) next[m + 1] += c[m] * std::sqrt(double(m + 1)) * inv;
    }
    c.swap(next);
  }
  return c[static_cast<std::size_t>(k + q)];
}

ModeExpansion ModeExpansion::single(int m, int d, cdouble c) {
  ModeExpansion e;
  e.add(m, d, c);
  return e;
}

cdouble ModeExpansion::operator()(int m, int d) const {
  const auto it = terms_.find({m, d});
  return it == terms_.end() ? cdouble{} : it->second;
}

void ModeExpansion::add(int m, int d, cdouble c) {
  if (m < 0 || d < 0) throw DomainError("mode and derivative indices must be >= 0");
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw DomainError("non-finite mode coefficient");
  terms_[{m, d}] += c;
}

int ModeExpansion::max_derivative() const {
  int d = -1;
  for (const auto& [key, c] : terms_) d = std::max(d, key.second);
  return d;
}

int ModeExpansion::max_mode() const {
  int m = -1;
  for (const auto& [key, c] : terms_) m = std::max(m, key.first);
  return m;
}

double ModeExpansion::max_abs() const {
  double v = 0.0;
  for (const auto& [key, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

ModeExpansion& ModeExpansion::operator+=(const ModeExpansion& o) {
  for (const auto& [key, c] : o.terms_) terms_[key] += c;
  return *this;
}

ModeExpansion& ModeExpansion::operator-=(const ModeExpansion& o) {
  for (const auto& [key, c] : o.terms_) terms_[key] -= c;
  return *this;
}

ModeExpansion& ModeExpansion::operator*=(cdouble c) {
  for (auto& [key, v] : terms_) v *= c;
  return *this;
}

ModeExpansion ModeExpansion::times_t1(double b0) const {
  const double inv = 1.0 / std::sqrt(2.0 * b0);
  ModeExpansion out;
  for (const auto& [key, c] : terms_) {
    const auto [m, d] = key;
    if (m > 0) out.add(m - 1, d, c * std::sqrt(double(m)) * inv);
    out.add(m + 1, d, c * std::sqrt(double(m + 1)) * inv);
  }
  return out;
}

ModeExpansion ModeExpansion::times_t1_pow(double b0, int p) const {
  ModeExpansion out = *this;
  for (int i = 0; i < p; ++i) out = out.times_t1(b0);
  return out;
}

ModeExpansion ModeExpansion::d_s() const {
  ModeExpansion out;
  for (const auto& [key, c] : terms_) out.add(key.first, key.second + 1, c);
  return out;
}

ModeExpansion ModeExpansion::pruned(double tol) const {
  ModeExpansion out;
  for (const auto& [key, c] : terms_)
    if (std::abs(c) > tol) out.terms_[key] = c;
  return out;
}

ModeExpansion oscillator_resolvent_solve(const ModeExpansion& rhs, int k, double b0, double tol) {
  if (!(b0 > 0.0)) throw DomainError("b0 must be positive");
  const double scale = std::max(rhs.max_abs(), 1e-300);
  ModeExpansion out;
  for (const auto& [key, c] : rhs.terms()) {
    const auto [m, d] = key;
    if (m == k) {
      if (std::abs(c) > tol * scale)
        throw SolvabilityViolationError("psi_" + std::to_string(k) + " x chi0^(" +
                                        std::to_string(d) + ") coefficient " +
                                        std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") +
                                        std::to_string(c.imag()) + "i");
      continue;
    }
    out.add(m, d, c / (2.0 * (m - k) * b0));
  }
  return out;
}

ModeExpansion ScaledOperator::L1(const ModeExpansion& u) const {
  const cdouble I(0.0, 1.0);
  ModeExpansion inner = I * u.d_s();
  if (a1 != 0.0) inner += cdouble(0.25 * a1 * b0) * u.times_t1_pow(b0, 2);
  return cdouble(-2.0 * b0) * inner.times_t1(b0);
}

ModeExpansion ScaledOperator::L2(const ModeExpansion& u) const {
  const cdouble I(0.0, 1.0);
  const double c4 = b0 * beta2 / 3.0 - 2.0 * a2 * b0 * b0 / 3.0 + 23.0 * a1 * a1 * b0 * b0 / 48.0;
  const double c0 = 0.5 * a2 - 3.0 * a1 * a1 / 16.0;
  ModeExpansion out = cdouble(-1.0) * u.d_s().d_s();
  if (a1 != 0.0) out += (1.5 * I * a1 * b0) * u.d_s().times_t1_pow(b0, 2);
  out += cdouble(c4) * u.times_t1_pow(b0, 4);
  if (c0 != 0.0) out += cdouble(c0) * u;
  return out;
}

namespace {

double kernel_component(const ModeExpansion& rhs, int k) {
  double v = 0.0;
  for (const auto& [key, c] : rhs.terms())
    if (key.first == k) v = std::max(v, std::abs(c));
  return v / std::max(rhs.max_abs(), 1e-300);
}

}  // namespace

Order2Quasimode build_order2_quasimode(int k, double b0, double a1, double a2, double beta2,
                                       double tol) {
  if (k < 0) throw DomainError("k must be >= 0");
  if (!(b0 > 0.0)) throw DomainError("b0 must be positive");
  if (!(beta2 > 0.0)) throw DegeneracyViolationError("beta2 must be positive");
  const double kk = static_cast<double>(k);
  Order2Quasimode q;
  q.k = k;
  q.b0 = b0;
  q.lambda0 = (2 * kk + 1) * b0;
  q.lambda2 = beta2 * (2 * kk * kk + 2 * kk + 1) / (4 * b0) - (kk * kk + kk) * (a2 - 0.25 * a1 * a1);
  const ScaledOperator L{k, b0, a1, a2, beta2};

  q.phi0 = ModeExpansion::single(k, 0);
  try {
    const ModeExpansion rhs1 = cdouble(-1.0) * L.L1(q.phi0);
    q.kernel_residual_1 = kernel_component(rhs1, k);
    q.phi1 = oscillator_resolvent_solve(rhs1, k, b0, tol);

    ModeExpansion rhs2 = cdouble(q.lambda2) * q.phi0;
    rhs2 -= L.L2(q.phi0);
    rhs2 -= L.L1(q.phi1);
    q.kernel_residual_2 = kernel_component(rhs2, k);
    q.phi2 = oscillator_resolvent_solve(rhs2, k, b0, tol);
  } catch (const SolvabilityViolationError& e) {
    throw ConstructionBugError(e.what());
  }
  return q;
}

double cutoff_exponent(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("beta must lie in (0, 1/2)");
  return std::min(1.0 + beta, 1.5 - 3.0 * beta);
}

}  // namespace magwell
