#include "drce/locality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drce/errors.hpp"

namespace drce {
namespace {

constexpr double kBoundaryTol = 1e-12;

// Tolerant membership comparison: lhs <= rhs up to 1e-12 * max(1, d). Boundary
// samples admitted this way carry zero budget, so the worst-case value only
// gains an unperturbed atom.
bool leq_tolerant(double lhs, double rhs, double d) {
  return lhs <= rhs + kBoundaryTol * std::max(1.0, d);
}

}  // namespace

std::size_t LocalScene::inner_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(inner.begin(), inner.end(), static_cast<char>(1)));
}

std::vector<std::size_t> LocalScene::inner_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (inner[k]) out.push_back(members[k]);
  }
  return out;
}

std::vector<std::size_t> LocalScene::ring_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!inner[k]) out.push_back(members[k]);
  }
  return out;
}

std::vector<double> covariate_distances(const Dataset& data,
                                        std::span<const double> x0,
                                        const GroundMetric& metric) {
  if (x0.size() != data.covariate_dim()) {
    throw InputError("query covariate dimension " + std::to_string(x0.size()) +
                     " does not match dataset dimension " +
                     std::to_string(data.covariate_dim()));
  }
  metric.validate(data.covariate_dim(), data.response_dim());
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = metric.covariate_distance(x0, data.covariate(i));
  }
  return out;
}

double kappa(double distance, double gamma) {
  return std::max(0.0, distance - gamma);
}

double min_kappa(std::span<const double> distances, double gamma) {
  if (distances.empty()) throw InputError("empty distance vector");
  double best = kappa(distances[0], gamma);
  for (double d : distances.subspan(1)) best = std::min(best, kappa(d, gamma));
  return best;
}

bool check_feasible(std::span<const double> distances, double gamma,
                    double rho) {
  for (double d : distances) {
    if (leq_tolerant(d, rho + gamma, d)) return true;
  }
  return false;
}

bool check_feasible(const Dataset& data, const Query& query,
                    const GroundMetric& metric) {
  auto distances = covariate_distances(data, query.x0, metric);
  auto [gamma, rho] = resolve_query(distances, query);
  return check_feasible(distances, gamma, rho);
}

double adaptive_gamma(std::span<const double> distances, double rank) {
  const auto n = distances.size();
  if (n == 0) throw InputError("empty distance vector");
  if (!std::isfinite(rank) || rank < 1.0 || rank > static_cast<double>(n)) {
    throw InputError("adaptive rank " + std::to_string(rank) +
                     " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const auto lo = static_cast<std::size_t>(std::floor(rank)) - 1;
  const auto hi = static_cast<std::size_t>(std::ceil(rank)) - 1;
  const double frac = rank - std::floor(rank);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> resolve_query(std::span<const double> distances,
                                        const Query& query) {
  double gamma = 0.0;
  switch (query.gamma.kind) {
    case GammaRule::Kind::Fixed:
      gamma = query.gamma.value;
      break;
    case GammaRule::Kind::AdaptiveRank:
      gamma = adaptive_gamma(distances, query.gamma.value);
      break;
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw InputError("neighborhood radius must resolve to a finite "
                     "non-negative value");
  }
  double rho = 0.0;
  switch (query.rho.kind) {
    case RhoRule::Kind::Fixed:
      rho = query.rho.value;
      break;
    case RhoRule::Kind::ProportionalToGamma:
      if (query.rho.value < 0.0) {
        throw InputError("rho factor must be non-negative");
      }
      rho = query.rho.value * gamma;
      break;
  }
  if (!std::isfinite(rho) || rho < 0.0) {
    throw InputError("ambiguity radius must resolve to a finite "
                     "non-negative value");
  }
  return {gamma, rho};
}

LocalScene build_local_scene(const Dataset& data, const Query& query,
                             const GroundMetric& metric) {
  auto distances = covariate_distances(data, query.x0, metric);
  auto [gamma, rho] = resolve_query(distances, query);

  LocalScene scene;
  scene.x0.assign(query.x0.begin(), query.x0.end());
  scene.gamma = gamma;
  scene.rho = rho;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double d = distances[i];
    if (!leq_tolerant(d, rho + gamma, d)) continue;
    scene.members.push_back(i);
    scene.inner.push_back(leq_tolerant(d + rho, gamma, d) ? 1 : 0);
    scene.distances.push_back(d);
    scene.budgets.push_back(std::clamp(rho - kappa(d, gamma), 0.0, rho));
  }
  if (scene.members.empty()) {
    const double mk = min_kappa(distances, gamma);
    throw InfeasibleRadiusError(
        "ambiguity radius " + std::to_string(rho) +
            " cannot reach the neighborhood; smallest transport slack is " +
            std::to_string(mk),
        mk);
  }
  return scene;
}

double radius_rule(double n_samples, std::size_t covariate_dim,
                   std::size_t response_dim, double C) {
  if (!(n_samples >= 2.0)) throw InputError("radius rule requires N >= 2");
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw InputError("radius rule constant must be positive");
  }
  const double logn = std::log(n_samples);
  const auto dim = covariate_dim + response_dim;
  if (dim == 2) {
    return C * std::pow(n_samples, -0.5) * std::pow(logn, 0.75);
  }
  const double inv = 1.0 / static_cast<double>(dim);
  return C * std::pow(n_samples, -inv) * std::pow(logn, inv);
}

}  // namespace drce
