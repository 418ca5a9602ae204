#pragma once

#include <span>
#include <string>
#include <vector>

namespace magwell {

struct Sample {
  double h = 0.0;
  double value = 0.0;
};

/// Least-squares fit of value ~ sum_p c_p h^p.
struct FitReport {
  std::vector<double> powers;
  std::vector<double> coefficients;
  double rss = 0.0;
  int samples = 0;
  double condition = 0.0;  // of the column-scaled normal matrix
};

/// Normal equations with unit-norm column scaling. Throws
/// IllConditionedFitError when the scaled system is numerically singular or
/// there are fewer distinct h than powers.
FitReport fit_powers(std::span<const Sample> data, std::span<const double> powers);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;  // log prefactor
  double stderr_slope = 0.0;
  int samples = 0;

  double prefactor() const;
};

/// Ordinary least squares of log(value) on log(h). Requires >= 3 samples with
/// positive values (DomainError otherwise).
ExponentFit exponent_fit(std::span<const Sample> data);

/// "1,2,2.5" -> {1, 2, 2.5}.
std::vector<double> parse_powers(const std::string& text);

}  // namespace magwell
