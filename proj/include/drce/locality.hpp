#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drce/dataset.hpp"
#include "drce/metric.hpp"

namespace drce {

/// Neighborhood radius: either a fixed value or the (possibly fractional)
/// rank-i smallest covariate distance, linearly interpolated between the
/// floor(i)-th and ceil(i)-th order statistics.
struct GammaRule {
  enum class Kind { Fixed, AdaptiveRank };
  Kind kind = Kind::Fixed;
  double value = 0.0;

  static GammaRule fixed(double gamma) { return {Kind::Fixed, gamma}; }
  static GammaRule adaptive_rank(double rank) {
    return {Kind::AdaptiveRank, rank};
  }
};

/// Ambiguity radius: fixed, or proportional to the resolved neighborhood
/// radius (rho = factor * gamma).
struct RhoRule {
  enum class Kind { Fixed, ProportionalToGamma };
  Kind kind = Kind::Fixed;
  double value = 0.0;

  static RhoRule fixed(double rho) { return {Kind::Fixed, rho}; }
  static RhoRule proportional(double factor) {
    return {Kind::ProportionalToGamma, factor};
  }
};

struct Query {
  std::vector<double> x0;
  GammaRule gamma = GammaRule::fixed(0.0);
  RhoRule rho = RhoRule::fixed(0.0);
};

/// Everything the worst-case evaluation needs about one query point.
/// `members` holds the indices i with
/// d_i <= rho + gamma in ascending order; `inner[k]` marks members with
/// d_i + rho <= gamma (fully transportable inside the neighborhood). Budgets
/// are the response-side transport allowances r_i = rho - max(0, d_i - gamma),
/// clamped to [0, rho].
struct LocalScene {
  std::vector<double> x0;
  double gamma = 0.0;
  double rho = 0.0;
  std::vector<std::size_t> members;
  std::vector<char> inner;        // aligned with members
  std::vector<double> distances;  // aligned with members
  std::vector<double> budgets;    // aligned with members

  std::size_t member_count() const noexcept { return members.size(); }
  std::size_t inner_count() const noexcept;
  std::vector<std::size_t> inner_indices() const;
  std::vector<std::size_t> ring_indices() const;
};

/// Covariate distances d_i = D_X(x0, x_i) for every sample.
std::vector<double> covariate_distances(const Dataset& data,
                                        std::span<const double> x0,
                                        const GroundMetric& metric);

/// Transport slack: the cost of moving sample i's mass onto the fiber above
/// the neighborhood of radius gamma. Equals max(0, d_i - gamma) for norm
/// covariate metrics.
double kappa(double distance, double gamma);

/// Smallest transport slack over all samples; the feasibility threshold for
/// the ambiguity radius.
double min_kappa(std::span<const double> distances, double gamma);

/// True iff some sample can reach the neighborhood within budget rho,
/// i.e. rho >= min_i kappa(d_i, gamma). Uses the same tolerant membership
/// comparison as build_local_scene, so `true` is equivalent to a non-empty
/// member set.
bool check_feasible(std::span<const double> distances, double gamma,
                    double rho);
bool check_feasible(const Dataset& data, const Query& query,
                    const GroundMetric& metric);

/// Rank-interpolated neighborhood radius; `rank` in [1, N], fractional ranks
/// interpolate between adjacent order statistics of the distances.
double adaptive_gamma(std::span<const double> distances, double rank);

/// Resolve the query's gamma/rho rules against concrete distances.
/// Returns {gamma, rho}; throws InputError if either is negative or
/// non-finite.
std::pair<double, double> resolve_query(std::span<const double> distances,
                                        const Query& query);

/// Partition the samples around the query point. Throws InfeasibleRadiusError
/// (carrying min kappa) when no sample is reachable.
LocalScene build_local_scene(const Dataset& data, const Query& query,
                             const GroundMetric& metric);

/// Concentration-style ambiguity radius: C * N^{-1/2} * (ln N)^{3/4} when
/// n + m == 2, otherwise C * N^{-1/(n+m)} * (ln N)^{1/(n+m)}. Natural log;
/// the constant C is always caller-supplied. `n_samples` is real-valued so
/// the formula can be probed analytically.
double radius_rule(double n_samples, std::size_t covariate_dim,
                   std::size_t response_dim, double C);

}  // namespace drce
