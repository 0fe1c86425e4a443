#include "drce/robust_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drce/errors.hpp"

namespace drce {
namespace {

// Response-space perturbation radius for one member: interval losses measure
// responses with theta |y - y'|, so the transport budget shrinks by theta.
double response_radius(const GroundMetric& metric, const LossSpec& loss,
                       double budget) {
  return loss.scalar() ? budget / metric.theta : budget;
}

double v_star(const LossSpec& loss, const GroundMetric& metric,
              std::span<const double> y_hat, double budget,
              std::span<const double> beta) {
  const double r = response_radius(metric, loss, budget);
  switch (loss.kind) {
    case LossSpec::Kind::SquaredScalar:
      return v_star_squared_scalar(y_hat[0], r, loss.lower, loss.upper,
                                   beta[0]);
    case LossSpec::Kind::Pinball:
      return v_star_pinball(y_hat[0], r, loss.lower, loss.upper, beta[0],
                            loss.tau);
    case LossSpec::Kind::SquaredVector2:
      return v_star_vector_2ball(y_hat, r, beta);
    case LossSpec::Kind::SquaredVectorInf:
      return v_star_vector_infball(y_hat, r, beta);
  }
  return 0.0;
}

double norm2(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void check_scene(const Dataset& data, const LocalScene& scene,
                 const GroundMetric& metric, const LossSpec& loss,
                 std::span<const double> beta) {
  loss.validate(data, metric);
  if (beta.size() != data.response_dim()) {
    throw InputError("estimate dimension does not match the response "
                     "dimension");
  }
  if (scene.members.empty()) {
    throw std::logic_error("worst-case loss evaluated on an empty scene");
  }
}

}  // namespace

std::size_t WorstCaseEval::active_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(alpha.begin(), alpha.end(), static_cast<char>(1)));
}

double v_star_squared_scalar(double y_hat, double r, double a, double b,
                             double beta) {
  const double lo = std::max(a, y_hat - r);
  const double hi = std::min(b, y_hat + r);
  const double dl = lo - beta;
  const double dh = hi - beta;
  return std::max(dl * dl, dh * dh);
}

double v_star_pinball(double y_hat, double r, double a, double b, double beta,
                      double tau) {
  const double lo = std::max(a, y_hat - r);
  const double hi = std::min(b, y_hat + r);
  const auto pinball = [&](double y) {
    const double d = y - beta;
    return std::max(-tau * d, (1.0 - tau) * d);
  };
  return std::max(pinball(lo), pinball(hi));
}

double v_star_vector_2ball(std::span<const double> y_hat, double r,
                           std::span<const double> beta) {
  const double gap = r + norm2(y_hat, beta);
  return gap * gap;
}

double v_star_vector_infball(std::span<const double> y_hat, double r,
                             std::span<const double> beta) {
  double acc = 0.0;
  for (std::size_t j = 0; j < y_hat.size(); ++j) {
    const double w = y_hat[j] - beta[j];
    acc += std::max((w - r) * (w - r), (w + r) * (w + r));
  }
  return acc;
}

std::vector<double> attaining_point(const LossSpec& loss,
                                    std::span<const double> y_hat, double r,
                                    std::span<const double> beta) {
  std::vector<double> y(y_hat.begin(), y_hat.end());
  switch (loss.kind) {
    case LossSpec::Kind::SquaredScalar:
    case LossSpec::Kind::Pinball: {
      const double lo = std::max(loss.lower, y_hat[0] - r);
      const double hi = std::min(loss.upper, y_hat[0] + r);
      const double vlo = loss.value({&lo, 1}, beta);
      const double vhi = loss.value({&hi, 1}, beta);
      y[0] = vlo >= vhi ? lo : hi;  // lower endpoint on exact ties
      break;
    }
    case LossSpec::Kind::SquaredVector2: {
      const double len = norm2(y_hat, beta);
      if (len > 0.0) {
        for (std::size_t j = 0; j < y.size(); ++j) {
          y[j] = y_hat[j] + r * (y_hat[j] - beta[j]) / len;
        }
      } else {
        y[0] += r;  // any boundary point attains; first axis keeps it fixed
      }
      break;
    }
    case LossSpec::Kind::SquaredVectorInf: {
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double w = y_hat[j] - beta[j];
        const double down = (w - r) * (w - r);
        const double up = (w + r) * (w + r);
        y[j] = down >= up ? y_hat[j] - r : y_hat[j] + r;
      }
      break;
    }
  }
  return y;
}

AlphaSelection select_alpha(std::span<const double> v_values,
                            std::span<const char> inner) {
  if (v_values.empty()) {
    throw std::logic_error("alpha selection over an empty index set");
  }
  if (v_values.size() != inner.size()) {
    throw InputError("v-value and inner-flag lengths differ");
  }
  for (double v : v_values) {
    if (!std::isfinite(v)) throw NumericError("non-finite inner maximum");
  }

  AlphaSelection out;
  out.alpha.assign(v_values.size(), 0);

  double numerator = 0.0;
  std::size_t denominator = 0;
  std::vector<std::size_t> ring;
  for (std::size_t k = 0; k < v_values.size(); ++k) {
    if (inner[k]) {
      out.alpha[k] = 1;
      numerator += v_values[k];
      ++denominator;
    } else {
      ring.push_back(k);
    }
  }

  if (denominator == 0) {
    // No forced participants: the ratio is maximized by the ring maximizers
    // alone.
    double best = v_values[ring.front()];
    for (std::size_t k : ring) best = std::max(best, v_values[k]);
    for (std::size_t k : ring) {
      if (v_values[k] == best) out.alpha[k] = 1;
    }
    out.f_value = best;
    return out;
  }

  std::sort(ring.begin(), ring.end(), [&](std::size_t a, std::size_t b) {
    if (v_values[a] != v_values[b]) return v_values[a] > v_values[b];
    return a < b;
  });
  double ratio = numerator / static_cast<double>(denominator);
  for (std::size_t k : ring) {
    // Equality keeps the ratio unchanged; include it for a reproducible mask.
    if (v_values[k] < ratio) break;
    numerator += v_values[k];
    ++denominator;
    ratio = numerator / static_cast<double>(denominator);
    out.alpha[k] = 1;
  }
  out.f_value = ratio;
  return out;
}

WorstCaseEval worst_case_loss(const Dataset& data, const LocalScene& scene,
                              const GroundMetric& metric, const LossSpec& loss,
                              std::span<const double> beta) {
  check_scene(data, scene, metric, loss, beta);

  WorstCaseEval eval;
  const auto count = scene.members.size();
  eval.v_values.resize(count);
  eval.attaining_points.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto y_hat = data.response(scene.members[k]);
    eval.v_values[k] = v_star(loss, metric, y_hat, scene.budgets[k], beta);
    eval.attaining_points[k] = attaining_point(
        loss, y_hat, response_radius(metric, loss, scene.budgets[k]), beta);
  }
  auto selection = select_alpha(eval.v_values, scene.inner);
  eval.alpha = std::move(selection.alpha);
  eval.f_value = selection.f_value;
  return eval;
}

std::vector<double> subgradient(const Dataset& data, const LocalScene& scene,
                                const GroundMetric& metric,
                                const LossSpec& loss,
                                std::span<const double> beta) {
  const auto eval = worst_case_loss(data, scene, metric, loss, beta);
  std::vector<double> g(beta.size(), 0.0);
  std::size_t active = 0;
  for (std::size_t k = 0; k < scene.members.size(); ++k) {
    if (!eval.alpha[k]) continue;
    const auto gi = loss.beta_subgradient(eval.attaining_points[k], beta);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += gi[j];
    ++active;
  }
  for (double& gj : g) gj /= static_cast<double>(active);
  return g;
}

double WorstCaseDistribution::conditional_loss(
    const LossSpec& loss, std::span<const double> beta) const {
  double acc = 0.0;
  double mass = 0.0;
  for (const auto& atom : atoms) {
    if (!atom.in_neighborhood) continue;
    acc += atom.mass * loss.value(atom.y, beta);
    mass += atom.mass;
  }
  if (mass == 0.0) {
    throw std::logic_error("no worst-case mass on the neighborhood");
  }
  return acc / mass;
}

std::vector<double> WorstCaseDistribution::conditional_mean(
    std::size_t response_dim) const {
  std::vector<double> mean(response_dim, 0.0);
  double mass = 0.0;
  for (const auto& atom : atoms) {
    if (!atom.in_neighborhood) continue;
    for (std::size_t j = 0; j < response_dim; ++j) {
      mean[j] += atom.mass * atom.y[j];
    }
    mass += atom.mass;
  }
  if (mass == 0.0) {
    throw std::logic_error("no worst-case mass on the neighborhood");
  }
  for (double& mj : mean) mj /= mass;
  return mean;
}

WorstCaseDistribution worst_case_distribution(const Dataset& data,
                                              const LocalScene& scene,
                                              const GroundMetric& metric,
                                              const LossSpec& loss,
                                              std::span<const double> beta) {
  const auto eval = worst_case_loss(data, scene, metric, loss, beta);
  const double mass = 1.0 / static_cast<double>(data.size());

  WorstCaseDistribution dist;
  dist.atoms.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& atom = dist.atoms[i];
    const auto x = data.covariate(i);
    const auto y = data.response(i);
    atom.x.assign(x.begin(), x.end());
    atom.y.assign(y.begin(), y.end());
    atom.mass = mass;
    atom.source = i;
    atom.in_neighborhood = false;
  }

  for (std::size_t k = 0; k < scene.members.size(); ++k) {
    auto& atom = dist.atoms[scene.members[k]];
    const double d = scene.distances[k];
    if (eval.alpha[k]) {
      // Covariate moves to its projection onto the neighborhood boundary,
      // the response to the attaining point.
      if (d > scene.gamma) {
        for (std::size_t j = 0; j < atom.x.size(); ++j) {
          atom.x[j] =
              scene.x0[j] + (atom.x[j] - scene.x0[j]) * (scene.gamma / d);
        }
      }
      atom.y = eval.attaining_points[k];
      atom.in_neighborhood = true;
    } else if (d <= scene.gamma) {
      // Declined ring sample that started inside the neighborhood: push it
      // radially outward by exactly rho so it leaves the conditioning event.
      // Without this the conditional loss would mix in below-ratio samples
      // and fall short of the worst-case value.
      if (d > 0.0) {
        const double scale = (d + scene.rho) / d;
        for (std::size_t j = 0; j < atom.x.size(); ++j) {
          atom.x[j] = scene.x0[j] + (atom.x[j] - scene.x0[j]) * scale;
        }
      } else {
        // Sample sits on the query point; any direction of length rho works.
        const double w = metric.covariate_weights.empty()
                             ? 1.0
                             : metric.covariate_weights[0];
        atom.x[0] += scene.rho / w;
      }
    }
  }
  return dist;
}

}  // namespace drce
