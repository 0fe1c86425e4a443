#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "drce/robust_loss.hpp"

namespace drce {

/// Step schedule for the projected subgradient method. Diminishing takes
/// normalized steps of length c0/sqrt(t); Polyak uses (f - f_target)/|g|^2.
struct StepSchedule {
  enum class Kind { Diminishing, Polyak };
  Kind kind = Kind::Diminishing;
  /// Diminishing: initial step length; 0 requests an automatic diameter
  /// estimate. Polyak: the target objective value.
  double value = 0.0;

  static StepSchedule diminishing(double c0 = 0.0) {
    return {Kind::Diminishing, c0};
  }
  static StepSchedule polyak(double f_target) {
    return {Kind::Polyak, f_target};
  }
};

struct Bracket {
  enum class Kind { Auto, Explicit };
  Kind kind = Kind::Auto;
  double lo = 0.0;
  double hi = 0.0;

  static Bracket automatic() { return {}; }
  static Bracket explicit_range(double lo, double hi) {
    return {Kind::Explicit, lo, hi};
  }
};

struct SolverConfig {
  /// Golden-section final bracket width; also the scale of the subgradient
  /// stagnation test.
  double tolerance = 1e-9;
  int max_iterations = 5000;
  StepSchedule step = StepSchedule::diminishing();
  Bracket bracket = Bracket::automatic();
  bool with_worst_case_distribution = false;

  void validate() const;
};

struct RobustSolution {
  std::vector<double> beta_star;
  double f_star = 0.0;
  int iterations = 0;
  /// Set when the iteration budget ran out before the stagnation test fired.
  bool iteration_budget_exhausted = false;
  std::vector<char> alpha;  // participation mask at beta_star
  LocalScene scene;
  std::optional<WorstCaseDistribution> distribution;
};

struct GoldenSectionResult {
  double minimizer = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Golden-section search with the fixed ratio 0.618. The objective must be
/// unimodal on [lo, hi]; stops when the bracket is narrower than epsilon and
/// returns its midpoint. Throws NumericError on non-finite objective values.
GoldenSectionResult golden_section(const std::function<double(double)>& f,
                                   double lo, double hi, double epsilon);

/// Bracket containing the minimizer of the scalar worst-case loss:
/// [min y_i - rho/theta, max y_i + rho/theta] over the scene members,
/// intersected with the loss interval [a, b].
std::pair<double, double> auto_bracket(const Dataset& data,
                                       const LocalScene& scene,
                                       const GroundMetric& metric,
                                       const LossSpec& loss);

/// Projected subgradient descent on f for vector losses. Starts from the
/// local response mean, tracks the best iterate (the raw sequence is not
/// monotone), and stops on max_iterations or when the best value has not
/// improved by more than 1e-10 over a 500-iteration window.
RobustSolution subgradient_descent(const Dataset& data, const LocalScene& scene,
                                   const GroundMetric& metric,
                                   const LossSpec& loss,
                                   const SolverConfig& config = {});

/// Full estimation pipeline: resolve the query, check feasibility, build the
/// scene, then minimize f: golden-section search for scalar responses,
/// subgradient descent otherwise. One-dimensional vector losses are routed
/// through the scalar path, and a scene with no transport budget under
/// squared loss short-circuits to the exact local mean.
RobustSolution estimate(const Dataset& data, const Query& query,
                        const GroundMetric& metric, const LossSpec& loss,
                        const SolverConfig& config = {});

/// Closed-form minimizer for the degenerate-neighborhood squared-loss case
/// (gamma = 0, unbounded scalar responses, unit response scale):
/// 0.5 min_i (y_i - rho + d_i) + 0.5 max_i (y_i + rho - d_i) over the scene.
/// Serves as an independent check of the golden-section path.
double chebyshev_closed_form(const Dataset& data, const LocalScene& scene,
                             const GroundMetric& metric, const LossSpec& loss);

}  // namespace drce
