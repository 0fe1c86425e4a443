#include "drce/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "drce/errors.hpp"
#include "drce/locality.hpp"

namespace drce {
namespace {

// Indices of the k nearest samples, distance ties broken by sample index.
std::vector<std::size_t> knn_indices(const Dataset& data,
                                     std::span<const double> x0,
                                     const GroundMetric& metric,
                                     std::size_t k) {
  if (k < 1 || k > data.size()) {
    throw InputError("k must lie in [1, N]; got " + std::to_string(k));
  }
  const auto distances = covariate_distances(data, x0, metric);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return a < b;
  });
  order.resize(k);
  return order;
}

std::vector<double> mean_response(const Dataset& data,
                                  std::span<const std::size_t> indices) {
  std::vector<double> mean(data.response_dim(), 0.0);
  for (std::size_t i : indices) {
    const auto y = data.response(i);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += y[j];
  }
  for (double& mj : mean) mj /= static_cast<double>(indices.size());
  return mean;
}

}  // namespace

std::vector<double> knn_mean(const Dataset& data, std::span<const double> x0,
                             const GroundMetric& metric, std::size_t k) {
  return mean_response(data, knn_indices(data, x0, metric, k));
}

KernelRegressResult kernel_regress(const Dataset& data,
                                   std::span<const double> x0,
                                   const GroundMetric& metric,
                                   KernelKind kernel, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InputError("bandwidth must be positive");
  }
  const auto distances = covariate_distances(data, x0, metric);

  KernelRegressResult result;
  result.value.assign(data.response_dim(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double u = distances[i] / h;
    double w = 0.0;
    switch (kernel) {
      case KernelKind::Gaussian:
        w = std::exp(-0.5 * u * u);
        break;
      case KernelKind::Epanechnikov:
        w = 0.75 * std::max(0.0, 1.0 - u * u);
        break;
    }
    if (w == 0.0) continue;
    const auto y = data.response(i);
    for (std::size_t j = 0; j < result.value.size(); ++j) {
      result.value[j] += w * y[j];
    }
    total += w;
  }
  if (total == 0.0) {
    // Compact support missed every sample; fall back to the nearest one.
    result.value = mean_response(data, knn_indices(data, x0, metric, 1));
    result.nearest_neighbor_fallback = true;
    return result;
  }
  for (double& vj : result.value) vj /= total;
  return result;
}

std::vector<double> robust_knn(const Dataset& data, std::span<const double> x0,
                               const GroundMetric& metric, const LossSpec& loss,
                               std::size_t k, double rho_resp,
                               const SolverConfig& config) {
  if (rho_resp < 0.0 || !std::isfinite(rho_resp)) {
    throw InputError("response budget must be non-negative");
  }
  auto members = knn_indices(data, x0, metric, k);
  std::sort(members.begin(), members.end());

  // Full participation and a uniform response budget: the objective is the
  // plain average of the per-sample worst cases, minimized with the same
  // machinery as the transport-aware estimator.
  LocalScene scene;
  scene.x0.assign(x0.begin(), x0.end());
  scene.gamma = std::numeric_limits<double>::infinity();
  scene.rho = rho_resp;
  scene.members = std::move(members);
  scene.inner.assign(k, 1);
  scene.budgets.assign(k, rho_resp);
  scene.distances.resize(k);
  for (std::size_t idx = 0; idx < k; ++idx) {
    scene.distances[idx] =
        metric.covariate_distance(x0, data.covariate(scene.members[idx]));
  }

  SolverConfig local = config;
  local.bracket = Bracket::automatic();
  if (loss.scalar()) {
    loss.validate(data, metric);
    // Reuse the scalar pipeline: exact local mean when there is no budget,
    // golden-section search otherwise.
    if (loss.kind == LossSpec::Kind::SquaredScalar && rho_resp == 0.0) {
      return mean_response(data, scene.members);
    }
    auto [lo, hi] = auto_bracket(data, scene, metric, loss);
    const auto objective = [&](double beta) {
      return worst_case_loss(data, scene, metric, loss, {&beta, 1}).f_value;
    };
    return {golden_section(objective, lo, hi, local.tolerance).minimizer};
  }
  return subgradient_descent(data, scene, metric, loss, local).beta_star;
}

}  // namespace drce
