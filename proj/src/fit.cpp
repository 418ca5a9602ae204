#include "magwell/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "magwell/csv.hpp"
#include "magwell/error.hpp"

namespace magwell {

FitReport fit_powers(std::span<const Sample> data, std::span<const double> powers) {
  if (powers.empty()) throw DomainError("no powers to fit");
  std::set<double> distinct;
  for (const auto& d : data) {
    if (!(d.h > 0.0)) throw DomainError("fit requires h > 0");
    distinct.insert(d.h);
  }
  const auto p = static_cast<Eigen::Index>(powers.size());
  if (static_cast<Eigen::Index>(distinct.size()) < p)
    throw IllConditionedFitError(std::to_string(distinct.size()) + " distinct h values for " +
                                 std::to_string(p) + " powers");

  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = data[static_cast<std::size_t>(i)].value;
    for (Eigen::Index j = 0; j < p; ++j)
      X(i, j) = std::pow(data[static_cast<std::size_t>(i)].h, powers[static_cast<std::size_t>(j)]);
  }
  const Eigen::VectorXd scale = X.colwise().norm().transpose();
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd N = Xs.transpose() * Xs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
  const double cond = es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 0.0);
  if (!std::isfinite(cond) || cond > 1e12)
    throw IllConditionedFitError("normal matrix condition number " + format_double(cond) +
                                 " (h values too clustered)");
  const Eigen::VectorXd z = N.ldlt().solve(Xs.transpose() * y);
  const Eigen::VectorXd c = z.cwiseQuotient(scale);

  FitReport r;
  r.powers.assign(powers.begin(), powers.end());
  r.coefficients.assign(c.data(), c.data() + p);
  r.rss = (X * c - y).squaredNorm();
  r.samples = static_cast<int>(n);
  r.condition = cond;
  return r;
}

double ExponentFit::prefactor() const { return std::exp(intercept); }

ExponentFit exponent_fit(std::span<const Sample> data) {
  if (data.size() < 3) throw DomainError("exponent fit needs at least 3 samples");
  std::vector<double> x, y;
  for (const auto& d : data) {
    if (!(d.h > 0.0)) throw DomainError("exponent fit requires h > 0");
    if (!(d.value > 0.0))
      throw DomainError("exponent fit requires positive values (got " + format_double(d.value) +
                        " at h = " + format_double(d.h) + ")");
    x.push_back(std::log(d.h));
    y.push_back(std::log(d.value));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw IllConditionedFitError("all h values coincide");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  f.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
  f.samples = static_cast<int>(x.size());
  return f;
}

std::vector<double> parse_powers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    out.push_back(parse_double(item));
  }
  if (out.empty()) throw ParseError("empty power list '" + text + "'");
  return out;
}

}  // namespace magwell
