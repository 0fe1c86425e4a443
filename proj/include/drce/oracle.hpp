#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drce/loss.hpp"
#include "drce/metric.hpp"

namespace drce::oracle {

/// Brute-force reference evaluators. Everything in this namespace recomputes
/// a quantity by enumeration, grid search, or random sampling without touching
/// the closed forms it is meant to check. Used by the test suites and the
/// `check` CLI command; exponential or quadratic cost throughout, so keep the
/// instances small.

/// Exhaustive maximum of (sum_inner v + sum alpha_i v_i) / (#inner + sum
/// alpha_i) over binary ring masks; the all-zero ring mask is admissible only
/// when an inner index exists. Ring size is capped at 20.
double max_ratio_enumerate(std::span<const double> v_values,
                           std::span<const char> inner);

/// Maximum of f over an inclusive uniform grid with `steps` intervals; the
/// endpoints are always evaluated.
double grid_max(const std::function<double(double)>& f, double lo, double hi,
                int steps);

/// Maximum of l(y, beta) over the 2-norm sphere |y - y_hat| = r by coarse
/// direction sampling followed by shrinking local refinement.
double sphere_max(const LossSpec& loss, std::span<const double> y_hat,
                  double r, std::span<const double> beta, std::uint64_t seed);

/// Maximum of |y - beta|_2^2 over the inf-norm box of radius r via corner
/// enumeration (the maximum of a convex function over a box is at a vertex).
double box_corner_max(std::span<const double> y_hat, double r,
                      std::span<const double> beta);

/// Minimum of D_X(x, target) over the covariate ball of radius gamma around
/// center, by line search along the center-target segment plus random ball
/// sampling with local refinement.
double ball_min_distance(std::span<const double> center, double gamma,
                         std::span<const double> target,
                         const GroundMetric& metric, std::uint64_t seed);

/// Central finite difference of f at beta with stencil half-width delta.
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> beta, double delta);

/// Minimize f over a uniform grid on a box, then refine the grid around the
/// best point a few times. Returns the best point found.
std::vector<double> grid_min_box(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> lo, std::span<const double> hi, int steps,
    int refinements);

}  // namespace drce::oracle
