#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drce/dataset.hpp"
#include "drce/loss.hpp"
#include "drce/metric.hpp"
#include "drce/solvers.hpp"

namespace drce {

enum class KernelKind { Gaussian, Epanechnikov };

struct KernelRegressResult {
  std::vector<double> value;
  /// All kernel weights vanished (compact support); the nearest neighbor's
  /// response was returned instead.
  bool nearest_neighbor_fallback = false;
};

/// Mean response of the k nearest samples; distance ties break toward the
/// smaller sample index.
std::vector<double> knn_mean(const Dataset& data, std::span<const double> x0,
                             const GroundMetric& metric, std::size_t k);

/// Kernel-weighted response average with bandwidth h. Gaussian uses
/// K(u) = exp(-u^2/2); Epanechnikov uses K(u) = 0.75 max(0, 1 - u^2).
KernelRegressResult kernel_regress(const Dataset& data,
                                   std::span<const double> x0,
                                   const GroundMetric& metric,
                                   KernelKind kernel, double h);

/// Response-only robustification of k-NN: minimize the average worst-case
/// loss over the k nearest samples, each granted the same response budget
/// rho_resp and full participation (no covariate transport).
std::vector<double> robust_knn(const Dataset& data, std::span<const double> x0,
                               const GroundMetric& metric, const LossSpec& loss,
                               std::size_t k, double rho_resp,
                               const SolverConfig& config = {});

}  // namespace drce
