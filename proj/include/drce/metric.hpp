#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drce {

enum class CovariateNorm { One, Two, Infinity };

enum class ResponseMetricKind {
  ScaledAbsolute,  // theta * |y - y'|, responses in R
  TwoNorm,
  InfNorm,
};

/// Ground transport cost D((x,y),(x',y')) = D_X(x,x') + D_Y(y,y').
/// D_X is a (optionally per-coordinate weighted) norm metric, which keeps the
/// projection onto a covariate ball and the transport slack in closed form.
struct GroundMetric {
  CovariateNorm covariate_norm = CovariateNorm::Two;
  /// Per-coordinate positive weights; empty means unweighted.
  std::vector<double> covariate_weights;
  ResponseMetricKind response_metric = ResponseMetricKind::ScaledAbsolute;
  /// Scale of the ScaledAbsolute response metric; must be positive.
  double theta = 1.0;

  /// Throws InputError if weights/theta are invalid or the response metric
  /// does not fit the response dimension.
  void validate(std::size_t covariate_dim, std::size_t response_dim) const;

  double covariate_distance(std::span<const double> a,
                            std::span<const double> b) const;
  double response_distance(std::span<const double> a,
                           std::span<const double> b) const;
};

}  // namespace drce
