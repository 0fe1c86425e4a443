#pragma once

#include <stdexcept>
#include <string>

namespace drce {

/// Malformed user input: dimension mismatches, bad CSV cells, out-of-range
/// hyperparameters. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// The ambiguity radius is too small to reach the query neighborhood with any
/// sample mass. Carries the smallest transport slack so callers can report
/// how much larger the radius must be.
class InfeasibleRadiusError : public std::runtime_error {
public:
  InfeasibleRadiusError(const std::string& what, double min_kappa)
      : std::runtime_error(what), min_kappa_(min_kappa) {}

  double min_kappa() const noexcept { return min_kappa_; }

private:
  double min_kappa_;
};

/// Internal numeric failure (non-finite objective value, degenerate bracket).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace drce
