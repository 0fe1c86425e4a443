#include "drce/loss.hpp"

#include <algorithm>
#include <cmath>

#include "drce/errors.hpp"

namespace drce {

LossSpec LossSpec::squared_scalar(double lower, double upper) {
  LossSpec spec;
  spec.kind = Kind::SquaredScalar;
  spec.lower = lower;
  spec.upper = upper;
  return spec;
}

LossSpec LossSpec::pinball(double tau, double lower, double upper) {
  LossSpec spec;
  spec.kind = Kind::Pinball;
  spec.tau = tau;
  spec.lower = lower;
  spec.upper = upper;
  return spec;
}

LossSpec LossSpec::squared_vector_2ball() {
  LossSpec spec;
  spec.kind = Kind::SquaredVector2;
  return spec;
}

LossSpec LossSpec::squared_vector_infball() {
  LossSpec spec;
  spec.kind = Kind::SquaredVectorInf;
  return spec;
}

void LossSpec::validate(const Dataset& data, const GroundMetric& metric) const {
  metric.validate(data.covariate_dim(), data.response_dim());
  if (scalar()) {
    if (data.response_dim() != 1) {
      throw InputError("scalar loss requires response dimension 1");
    }
    if (metric.response_metric != ResponseMetricKind::ScaledAbsolute) {
      throw InputError("scalar losses need the scaled-absolute response "
                       "metric");
    }
    if (!(lower < upper)) {
      throw InputError("response interval must satisfy a < b");
    }
    if (kind == Kind::Pinball && !(tau > 0.0 && tau < 1.0)) {
      throw InputError("pinball tau must lie strictly inside (0, 1)");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double y = data.response_scalar(i);
      if (y < lower || y > upper) {
        throw InputError("response of sample " + std::to_string(i) +
                         " lies outside the declared interval");
      }
    }
  } else {
    const auto want = kind == Kind::SquaredVector2
                          ? ResponseMetricKind::TwoNorm
                          : ResponseMetricKind::InfNorm;
    if (metric.response_metric != want) {
      throw InputError("vector loss and response metric ball do not match");
    }
  }
}

double LossSpec::value(std::span<const double> y,
                       std::span<const double> beta) const {
  switch (kind) {
    case Kind::SquaredScalar: {
      const double d = y[0] - beta[0];
      return d * d;
    }
    case Kind::Pinball: {
      const double d = y[0] - beta[0];
      return std::max(-tau * d, (1.0 - tau) * d);
    }
    case Kind::SquaredVector2:
    case Kind::SquaredVectorInf: {
      double acc = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double d = y[j] - beta[j];
        acc += d * d;
      }
      return acc;
    }
  }
  return 0.0;
}

std::vector<double> LossSpec::beta_subgradient(
    std::span<const double> y, std::span<const double> beta) const {
  std::vector<double> g(beta.size(), 0.0);
  switch (kind) {
    case Kind::SquaredScalar:
      g[0] = -2.0 * (y[0] - beta[0]);
      break;
    case Kind::Pinball:
      // Kink at y == beta resolves to the (1-tau)(y - beta) branch.
      g[0] = y[0] < beta[0] ? tau : -(1.0 - tau);
      break;
    case Kind::SquaredVector2:
    case Kind::SquaredVectorInf:
      for (std::size_t j = 0; j < g.size(); ++j) {
        g[j] = -2.0 * (y[j] - beta[j]);
      }
      break;
  }
  return g;
}

}  // namespace drce
