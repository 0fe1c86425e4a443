#include "drce/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "drce/errors.hpp"

namespace drce::oracle {
namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> u(dim);
  double len = 0.0;
  do {
    for (auto& uj : u) uj = gauss(rng);
    len = norm2(u);
  } while (len == 0.0);
  for (auto& uj : u) uj /= len;
  return u;
}

}  // namespace

double max_ratio_enumerate(std::span<const double> v_values,
                           std::span<const char> inner) {
  if (v_values.size() != inner.size() || v_values.empty()) {
    throw InputError("bad enumeration input");
  }
  double forced_sum = 0.0;
  std::size_t forced_count = 0;
  std::vector<double> ring;
  for (std::size_t k = 0; k < v_values.size(); ++k) {
    if (inner[k]) {
      forced_sum += v_values[k];
      ++forced_count;
    } else {
      ring.push_back(v_values[k]);
    }
  }
  if (ring.size() > 20) throw InputError("ring too large to enumerate");

  double best = -std::numeric_limits<double>::infinity();
  const std::size_t masks = std::size_t{1} << ring.size();
  for (std::size_t mask = 0; mask < masks; ++mask) {
    double sum = forced_sum;
    std::size_t count = forced_count;
    for (std::size_t b = 0; b < ring.size(); ++b) {
      if (mask & (std::size_t{1} << b)) {
        sum += ring[b];
        ++count;
      }
    }
    if (count == 0) continue;  // some mass must reach the neighborhood
    best = std::max(best, sum / static_cast<double>(count));
  }
  return best;
}

double grid_max(const std::function<double(double)>& f, double lo, double hi,
                int steps) {
  if (steps < 1 || !(lo <= hi)) throw InputError("bad grid");
  double best = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    best = std::max(best, f(x));
  }
  return best;
}

double sphere_max(const LossSpec& loss, std::span<const double> y_hat,
                  double r, std::span<const double> beta, std::uint64_t seed) {
  const std::size_t dim = y_hat.size();
  std::mt19937_64 rng(seed);

  std::vector<double> y(dim);
  const auto value_at = [&](std::span<const double> direction) {
    for (std::size_t j = 0; j < dim; ++j) {
      y[j] = y_hat[j] + r * direction[j];
    }
    return loss.value(y, beta);
  };

  // Coarse pass over random directions, then shrink a sampling cap around
  // the incumbent. Never consults the closed form.
  std::vector<double> best_dir = random_unit(rng, dim);
  double best = value_at(best_dir);
  for (int i = 0; i < 4096; ++i) {
    const auto u = random_unit(rng, dim);
    const double v = value_at(u);
    if (v > best) {
      best = v;
      best_dir = u;
    }
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scale = 0.5;
  for (int round = 0; round < 30; ++round) {
    for (int i = 0; i < 128; ++i) {
      std::vector<double> u(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        u[j] = best_dir[j] + scale * gauss(rng);
      }
      const double len = norm2(u);
      if (len == 0.0) continue;
      for (auto& uj : u) uj /= len;
      const double v = value_at(u);
      if (v > best) {
        best = v;
        best_dir = u;
      }
    }
    scale *= 0.5;
  }
  return best;
}

double box_corner_max(std::span<const double> y_hat, double r,
                      std::span<const double> beta) {
  const std::size_t dim = y_hat.size();
  if (dim > 20) throw InputError("box too large to enumerate");
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t corners = std::size_t{1} << dim;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double y =
          y_hat[j] + ((mask >> j) & 1 ? r : -r);
      acc += (y - beta[j]) * (y - beta[j]);
    }
    best = std::max(best, acc);
  }
  return best;
}

double ball_min_distance(std::span<const double> center, double gamma,
                         std::span<const double> target,
                         const GroundMetric& metric, std::uint64_t seed) {
  const std::size_t dim = center.size();
  std::mt19937_64 rng(seed);

  // Line search along the segment from the center toward the target.
  double best = metric.covariate_distance(center, target);
  std::vector<double> x(dim);
  const auto probe = [&](std::span<const double> point) {
    if (metric.covariate_distance(point, center) <= gamma * (1.0 + 1e-12)) {
      best = std::min(best, metric.covariate_distance(point, target));
    }
  };
  const int steps = 20000;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = center[j] + t * (target[j] - center[j]);
    }
    const double reach = metric.covariate_distance(x, center);
    if (reach > gamma && reach > 0.0) {
      // Pull the point back onto the ball boundary along the same ray.
      const double shrink = gamma / reach;
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = center[j] + shrink * (x[j] - center[j]);
      }
    }
    probe(x);
  }

  // Random interior samples guard against a non-radial optimum.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double w = metric.covariate_weights.empty()
                           ? 1.0
                           : metric.covariate_weights[j];
      x[j] = center[j] + gamma * unit(rng) / w;
    }
    const double reach = metric.covariate_distance(x, center);
    if (reach > gamma) {
      if (reach == 0.0) continue;
      const double shrink = gamma / reach;
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = center[j] + shrink * (x[j] - center[j]);
      }
    }
    probe(x);
  }
  return best;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> beta, double delta) {
  std::vector<double> point(beta.begin(), beta.end());
  std::vector<double> grad(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    const double original = point[j];
    point[j] = original + delta;
    const double up = f(point);
    point[j] = original - delta;
    const double down = f(point);
    point[j] = original;
    grad[j] = (up - down) / (2.0 * delta);
  }
  return grad;
}

std::vector<double> grid_min_box(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> lo, std::span<const double> hi, int steps,
    int refinements) {
  const std::size_t dim = lo.size();
  if (dim == 0 || dim > 3) throw InputError("grid search supports 1-3 dims");

  std::vector<double> cur_lo(lo.begin(), lo.end());
  std::vector<double> cur_hi(hi.begin(), hi.end());
  std::vector<double> best(dim);
  for (int pass = 0; pass <= refinements; ++pass) {
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<int> idx(dim, 0);
    std::vector<double> point(dim);
    const auto total = static_cast<std::size_t>(
        std::pow(static_cast<double>(steps + 1), static_cast<double>(dim)));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (std::size_t j = 0; j < dim; ++j) {
        idx[j] = static_cast<int>(rest % (steps + 1));
        rest /= (steps + 1);
        point[j] =
            cur_lo[j] + (cur_hi[j] - cur_lo[j]) * idx[j] / steps;
      }
      const double value = f(point);
      if (value < best_value) {
        best_value = value;
        best = point;
      }
    }
    // Zoom into two grid cells around the incumbent.
    for (std::size_t j = 0; j < dim; ++j) {
      const double cell = (cur_hi[j] - cur_lo[j]) / steps;
      cur_lo[j] = best[j] - 2.0 * cell;
      cur_hi[j] = best[j] + 2.0 * cell;
    }
  }
  return best;
}

}  // namespace drce::oracle
