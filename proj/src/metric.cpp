#include "drce/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drce/errors.hpp"

namespace drce {
namespace {

double weighted_norm(std::span<const double> a, std::span<const double> b,
                     CovariateNorm norm, std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = std::abs(a[j] - b[j]);
    if (!weights.empty()) d *= weights[j];
    switch (norm) {
      case CovariateNorm::One:
        acc += d;
        break;
      case CovariateNorm::Two:
        acc += d * d;
        break;
      case CovariateNorm::Infinity:
        acc = std::max(acc, d);
        break;
    }
  }
  return norm == CovariateNorm::Two ? std::sqrt(acc) : acc;
}

}  // namespace

void GroundMetric::validate(std::size_t covariate_dim,
                            std::size_t response_dim) const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw InputError("response scale theta must be positive and finite");
  }
  if (!covariate_weights.empty()) {
    if (covariate_weights.size() != covariate_dim) {
      throw InputError("covariate weight count " +
                       std::to_string(covariate_weights.size()) +
                       " does not match dimension " +
                       std::to_string(covariate_dim));
    }
    for (double w : covariate_weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw InputError("covariate weights must be positive and finite");
      }
    }
  }
  if (response_metric == ResponseMetricKind::ScaledAbsolute &&
      response_dim != 1) {
    throw InputError("scaled-absolute response metric requires m == 1");
  }
}

double GroundMetric::covariate_distance(std::span<const double> a,
                                        std::span<const double> b) const {
  if (a.size() != b.size()) {
    throw InputError("covariate dimension mismatch in distance computation");
  }
  return weighted_norm(a, b, covariate_norm, covariate_weights);
}

double GroundMetric::response_distance(std::span<const double> a,
                                       std::span<const double> b) const {
  if (a.size() != b.size()) {
    throw InputError("response dimension mismatch in distance computation");
  }
  switch (response_metric) {
    case ResponseMetricKind::ScaledAbsolute:
      return theta * std::abs(a[0] - b[0]);
    case ResponseMetricKind::TwoNorm:
      return weighted_norm(a, b, CovariateNorm::Two, {});
    case ResponseMetricKind::InfNorm:
      return weighted_norm(a, b, CovariateNorm::Infinity, {});
  }
  return 0.0;
}

}  // namespace drce
