#include "drce/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drce/errors.hpp"

namespace drce {
namespace {

constexpr double kGoldenRatio = 0.618;
constexpr int kStagnationWindow = 500;
constexpr double kStagnationImprovement = 1e-10;

std::vector<double> local_response_mean(const Dataset& data,
                                        const LocalScene& scene) {
  std::vector<double> mean(data.response_dim(), 0.0);
  for (std::size_t member : scene.members) {
    const auto y = data.response(member);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += y[j];
  }
  const auto count = static_cast<double>(scene.members.size());
  for (double& mj : mean) mj /= count;
  return mean;
}

double max_budget(const LocalScene& scene) {
  double best = 0.0;
  for (double r : scene.budgets) best = std::max(best, r);
  return best;
}

// Step length scale for the diminishing schedule: the diameter of the box
// spanned by the member responses, padded by the perturbation budgets.
double diameter_estimate(const Dataset& data, const LocalScene& scene) {
  const auto m = data.response_dim();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (std::size_t member : scene.members) {
    const auto y = data.response(member);
    for (std::size_t j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], y[j]);
      hi[j] = std::max(hi[j], y[j]);
    }
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  return std::sqrt(acc) + 2.0 * max_budget(scene);
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

RobustSolution finish_solution(const Dataset& data, LocalScene scene,
                               const GroundMetric& metric,
                               const LossSpec& loss,
                               const SolverConfig& config,
                               std::vector<double> beta, int iterations,
                               bool budget_exhausted) {
  auto eval = worst_case_loss(data, scene, metric, loss, beta);
  RobustSolution solution;
  solution.beta_star = std::move(beta);
  solution.f_star = eval.f_value;
  solution.iterations = iterations;
  solution.iteration_budget_exhausted = budget_exhausted;
  solution.alpha = std::move(eval.alpha);
  if (config.with_worst_case_distribution) {
    solution.distribution = worst_case_distribution(data, scene, metric, loss,
                                                    solution.beta_star);
  }
  solution.scene = std::move(scene);
  return solution;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw InputError("solver tolerance must be positive");
  }
  if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
  if (bracket.kind == Bracket::Kind::Explicit && !(bracket.lo < bracket.hi)) {
    throw InputError("explicit bracket requires lo < hi");
  }
  if (step.kind == StepSchedule::Kind::Diminishing && step.value < 0.0) {
    throw InputError("diminishing step scale must be non-negative");
  }
}

GoldenSectionResult golden_section(const std::function<double(double)>& f,
                                   double lo, double hi, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("golden-section tolerance must be positive");
  if (lo > hi) throw InputError("golden-section bracket requires lo <= hi");

  const double r = kGoldenRatio;
  GoldenSectionResult result;
  double b1 = lo;
  double b4 = hi;
  const auto eval = [&](double beta) {
    const double value = f(beta);
    ++result.evaluations;
    if (!std::isfinite(value)) {
      throw NumericError("objective returned a non-finite value at beta = " +
                         std::to_string(beta));
    }
    return value;
  };
  while (std::abs(b4 - b1) > epsilon) {
    const double b2 = r * b1 + (1.0 - r) * b4;
    const double b3 = (1.0 - r) * b1 + r * b4;
    if (eval(b2) <= eval(b3)) {
      b4 = b3;
    } else {
      b1 = b2;
    }
    ++result.iterations;
  }
  result.minimizer = 0.5 * (b1 + b4);
  return result;
}

std::pair<double, double> auto_bracket(const Dataset& data,
                                       const LocalScene& scene,
                                       const GroundMetric& metric,
                                       const LossSpec& loss) {
  if (!loss.scalar()) {
    throw InputError("auto bracket applies to scalar losses only");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t member : scene.members) {
    const double y = data.response_scalar(member);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double pad = scene.rho / metric.theta;
  // Attaining responses stay inside [lo - pad, hi + pad] clipped to the
  // response interval, and f grows beyond them, so the minimizer is inside.
  return {std::max(loss.lower, lo - pad), std::min(loss.upper, hi + pad)};
}

RobustSolution subgradient_descent(const Dataset& data, const LocalScene& scene,
                                   const GroundMetric& metric,
                                   const LossSpec& loss,
                                   const SolverConfig& config) {
  config.validate();
  loss.validate(data, metric);
  if (loss.scalar()) {
    throw InputError("subgradient descent expects a vector loss");
  }

  std::vector<double> beta = local_response_mean(data, scene);
  std::vector<double> best_beta = beta;
  double best_f = worst_case_loss(data, scene, metric, loss, beta).f_value;

  const double c0 = config.step.kind == StepSchedule::Kind::Diminishing &&
                            config.step.value > 0.0
                        ? config.step.value
                        : diameter_estimate(data, scene);

  int iterations = 0;
  bool exhausted = true;
  double window_best = best_f;
  for (int t = 1; t <= config.max_iterations; ++t) {
    iterations = t;
    const auto g = subgradient(data, scene, metric, loss, beta);
    const double gnorm = norm2(g);
    if (gnorm == 0.0) {
      exhausted = false;
      break;  // stationary: beta minimizes the current smooth piece
    }

    double step = 0.0;
    switch (config.step.kind) {
      case StepSchedule::Kind::Diminishing:
        step = c0 / (std::sqrt(static_cast<double>(t)) * gnorm);
        break;
      case StepSchedule::Kind::Polyak: {
        const double f_t =
            worst_case_loss(data, scene, metric, loss, beta).f_value;
        step = std::max(f_t - config.step.value, 0.0) / (gnorm * gnorm);
        break;
      }
    }
    for (std::size_t j = 0; j < beta.size(); ++j) beta[j] -= step * g[j];

    const double f_t = worst_case_loss(data, scene, metric, loss, beta).f_value;
    if (f_t < best_f) {
      best_f = f_t;
      best_beta = beta;
    }
    if (t % kStagnationWindow == 0) {
      if (window_best - best_f <= kStagnationImprovement) {
        exhausted = false;
        break;
      }
      window_best = best_f;
    }
  }

  return finish_solution(data, scene, metric, loss, config,
                         std::move(best_beta), iterations, exhausted);
}

namespace {

RobustSolution solve_scalar(const Dataset& data, LocalScene scene,
                            const GroundMetric& metric, const LossSpec& loss,
                            const SolverConfig& config) {
  // With no transport budget the squared objective is the plain local mean
  // square error, so the minimizer is the member average, exactly.
  if (loss.kind == LossSpec::Kind::SquaredScalar && max_budget(scene) == 0.0) {
    auto beta = local_response_mean(data, scene);
    return finish_solution(data, std::move(scene), metric, loss, config,
                           std::move(beta), 0, false);
  }

  double lo = 0.0;
  double hi = 0.0;
  if (config.bracket.kind == Bracket::Kind::Explicit) {
    lo = config.bracket.lo;
    hi = config.bracket.hi;
  } else {
    std::tie(lo, hi) = auto_bracket(data, scene, metric, loss);
  }
  const auto objective = [&](double beta) {
    return worst_case_loss(data, scene, metric, loss, {&beta, 1}).f_value;
  };
  const auto result = golden_section(objective, lo, hi, config.tolerance);
  return finish_solution(data, std::move(scene), metric, loss, config,
                         {result.minimizer}, result.iterations, false);
}

}  // namespace

RobustSolution estimate(const Dataset& data, const Query& query,
                        const GroundMetric& metric, const LossSpec& loss,
                        const SolverConfig& config) {
  config.validate();
  LossSpec effective = loss;
  GroundMetric effective_metric = metric;
  // One-dimensional vector-ball losses coincide with the unbounded squared
  // scalar loss; route them through the exact scalar machinery.
  if (!loss.scalar() && data.response_dim() == 1) {
    effective = LossSpec::squared_scalar();
    effective_metric.response_metric = ResponseMetricKind::ScaledAbsolute;
    effective_metric.theta = 1.0;
  }
  effective.validate(data, effective_metric);

  auto scene = build_local_scene(data, query, effective_metric);
  if (effective.scalar()) {
    return solve_scalar(data, std::move(scene), effective_metric, effective,
                        config);
  }
  return subgradient_descent(data, scene, effective_metric, effective, config);
}

double chebyshev_closed_form(const Dataset& data, const LocalScene& scene,
                             const GroundMetric& metric, const LossSpec& loss) {
  if (loss.kind != LossSpec::Kind::SquaredScalar ||
      std::isfinite(loss.lower) || std::isfinite(loss.upper)) {
    throw InputError("closed form needs the unbounded squared scalar loss");
  }
  if (scene.gamma != 0.0) {
    throw InputError("closed form applies to a degenerate neighborhood");
  }
  if (metric.theta != 1.0) {
    throw InputError("closed form assumes unit response scale");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scene.members.size(); ++k) {
    const double y = data.response_scalar(scene.members[k]);
    const double d = scene.distances[k];
    lo = std::min(lo, y - scene.rho + d);
    hi = std::max(hi, y + scene.rho - d);
  }
  return 0.5 * lo + 0.5 * hi;
}

}  // namespace drce
