#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drce/dataset.hpp"
#include "drce/locality.hpp"
#include "drce/loss.hpp"
#include "drce/metric.hpp"

namespace drce {

/// Result of the greedy ratio maximization over participation masks.
struct AlphaSelection {
  std::vector<char> alpha;  // aligned with the v-value input
  double f_value = 0.0;
};

/// Worst-case conditional expected loss at one estimate, with the per-sample
/// inner maxima, the participation mask, and the attaining responses.
struct WorstCaseEval {
  double f_value = 0.0;
  std::vector<double> v_values;                    // aligned with scene.members
  std::vector<char> alpha;                         // aligned with scene.members
  std::vector<std::vector<double>> attaining_points;  // aligned, one per member

  std::size_t active_count() const noexcept;
};

struct WorstCaseAtom {
  std::vector<double> x;
  std::vector<double> y;
  double mass = 0.0;
  std::size_t source = 0;
  /// Whether the atom lies on the fiber above the query neighborhood. Fixed
  /// at construction so boundary rounding cannot flip membership.
  bool in_neighborhood = false;
};

/// Adversarial distribution attaining the worst-case conditional loss: one
/// atom of mass 1/N per sample.
struct WorstCaseDistribution {
  std::vector<WorstCaseAtom> atoms;

  /// Conditional mean of l(y, beta) over atoms in the neighborhood.
  double conditional_loss(const LossSpec& loss,
                          std::span<const double> beta) const;
  /// Conditional mean response over atoms in the neighborhood (length m).
  std::vector<double> conditional_mean(std::size_t response_dim) const;
};

/// sup (y - beta)^2 over {y in [a,b] : |y - y_hat| <= r}.
double v_star_squared_scalar(double y_hat, double r, double a, double b,
                             double beta);

/// sup of the pinball loss over the same interval.
double v_star_pinball(double y_hat, double r, double a, double b, double beta,
                      double tau);

/// sup |y - beta|_2^2 over the 2-norm ball of radius r around y_hat:
/// (r + |y_hat - beta|_2)^2.
double v_star_vector_2ball(std::span<const double> y_hat, double r,
                           std::span<const double> beta);

/// sup |y - beta|_2^2 over the inf-norm ball: separable corner maximum
/// sum_j max((y_j - b_j - r)^2, (y_j - b_j + r)^2).
double v_star_vector_infball(std::span<const double> y_hat, double r,
                             std::span<const double> beta);

/// A response attaining the inner supremum within budget r. Interval losses
/// return the maximizing endpoint (lower endpoint on exact ties); the 2-norm
/// ball pushes along the ray from beta through y_hat, falling back to the
/// first coordinate direction when y_hat == beta.
std::vector<double> attaining_point(const LossSpec& loss,
                                    std::span<const double> y_hat, double r,
                                    std::span<const double> beta);

/// Maximize (sum_{inner} v + sum_{ring} alpha_i v_i) / (#inner + sum alpha_i)
/// over binary masks alpha, with all inner indices forced to 1.
///
/// Ring values are scanned in decreasing order and the prefix is extended
/// while the next value is at least the running ratio; equality leaves the
/// ratio unchanged, and including it keeps the mask deterministic. With no
/// inner indices the mask activates exactly the maximizers and the ratio is
/// the maximum value.
AlphaSelection select_alpha(std::span<const double> v_values,
                            std::span<const char> inner);

/// Evaluate the worst-case conditional expected loss f(beta) on a scene.
/// Runs in O(|I| (log |I| + cost of one inner oracle)).
WorstCaseEval worst_case_loss(const Dataset& data, const LocalScene& scene,
                              const GroundMetric& metric, const LossSpec& loss,
                              std::span<const double> beta);

/// Subgradient of f at beta: the alpha-weighted average of the loss
/// subgradients at the attaining responses.
std::vector<double> subgradient(const Dataset& data, const LocalScene& scene,
                                const GroundMetric& metric,
                                const LossSpec& loss,
                                std::span<const double> beta);

/// Extract a worst-case distribution at beta. Participating samples move to
/// the boundary projection of their covariate with the attaining response;
/// declined ring samples that started inside the neighborhood are pushed just
/// outside (covariate displacement exactly rho) so the conditional loss over
/// the neighborhood reproduces f(beta); everything else stays in place.
WorstCaseDistribution worst_case_distribution(const Dataset& data,
                                              const LocalScene& scene,
                                              const GroundMetric& metric,
                                              const LossSpec& loss,
                                              std::span<const double> beta);

}  // namespace drce
