#pragma once

#include <stdexcept>
#include <string>

namespace magwell {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MAGWELL_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

// Argument outside the mathematical domain of a formula (h <= 0, b0 <= 0, ...).
MAGWELL_DEFINE_ERROR(DomainError)
// Point requested outside the band.
MAGWELL_DEFINE_ERROR(OutOfDomainError)
MAGWELL_DEFINE_ERROR(InvalidMetricError)
MAGWELL_DEFINE_ERROR(StencilError)
MAGWELL_DEFINE_ERROR(DegeneracyViolationError)
MAGWELL_DEFINE_ERROR(NotAWellError)
MAGWELL_DEFINE_ERROR(DegenerateMiniwellError)
MAGWELL_DEFINE_ERROR(IntegrationError)
MAGWELL_DEFINE_ERROR(PrequantizationError)
MAGWELL_DEFINE_ERROR(ComplexFrequencyError)
MAGWELL_DEFINE_ERROR(SolvabilityViolationError)
MAGWELL_DEFINE_ERROR(ConstructionBugError)
MAGWELL_DEFINE_ERROR(TruncationError)
MAGWELL_DEFINE_ERROR(GridResolutionError)
MAGWELL_DEFINE_ERROR(ConvergenceError)
MAGWELL_DEFINE_ERROR(RequestTooLargeError)
MAGWELL_DEFINE_ERROR(ShapeError)
MAGWELL_DEFINE_ERROR(IllConditionedFitError)
MAGWELL_DEFINE_ERROR(ConfigError)
MAGWELL_DEFINE_ERROR(ParseError)
MAGWELL_DEFINE_ERROR(IoError)

#undef MAGWELL_DEFINE_ERROR

}  // namespace magwell
