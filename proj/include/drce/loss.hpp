#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "drce/dataset.hpp"
#include "drce/metric.hpp"

namespace drce {

/// Statistical loss with a closed-form worst-case oracle over response balls.
///
/// SquaredScalar  (y - b)^2 on Y = [a, b], interval response metric
/// Pinball        max{-tau(y - b), (1-tau)(y - b)} on Y = [a, b]
/// SquaredVector2 |y - b|_2^2, responses perturbed in a 2-norm ball
/// SquaredVectorInf |y - b|_2^2, responses perturbed in an inf-norm ball
struct LossSpec {
  enum class Kind { SquaredScalar, Pinball, SquaredVector2, SquaredVectorInf };

  Kind kind = Kind::SquaredScalar;
  double tau = 0.5;  // Pinball only
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static LossSpec squared_scalar(
      double lower = -std::numeric_limits<double>::infinity(),
      double upper = std::numeric_limits<double>::infinity());
  static LossSpec pinball(
      double tau, double lower = -std::numeric_limits<double>::infinity(),
      double upper = std::numeric_limits<double>::infinity());
  static LossSpec squared_vector_2ball();
  static LossSpec squared_vector_infball();

  bool scalar() const noexcept {
    return kind == Kind::SquaredScalar || kind == Kind::Pinball;
  }

  /// Checks internal consistency, compatibility with the response dimension
  /// and metric, and that every response lies in [lower, upper] for interval
  /// losses. Throws InputError.
  void validate(const Dataset& data, const GroundMetric& metric) const;

  /// Pointwise loss value l(y, beta).
  double value(std::span<const double> y, std::span<const double> beta) const;

  /// An element of the subdifferential of beta -> l(y, beta). Pinball kinks
  /// (y == beta) take the slope of the (1-tau)(y - beta) branch.
  std::vector<double> beta_subgradient(std::span<const double> y,
                                       std::span<const double> beta) const;
};

}  // namespace drce
