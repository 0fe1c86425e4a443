#include "drce/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "drce/errors.hpp"
#include "drce/locality.hpp"

namespace drce {
namespace {

double default_signal(double x) { return std::sin(10.0 * x); }

// Harness metric: plain Euclidean covariates, absolute response distance
// scaled by theta.
GroundMetric harness_metric(double theta) {
  GroundMetric metric;
  metric.covariate_norm = CovariateNorm::Two;
  metric.response_metric = ResponseMetricKind::ScaledAbsolute;
  metric.theta = theta;
  return metric;
}

double squared_response_range(const Dataset& data) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data.response_scalar(i);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double range = hi - lo;
  return range * range;
}

double fold_error(const LossSpec& loss, double truth, double predicted) {
  if (loss.kind == LossSpec::Kind::Pinball) {
    const double d = truth - predicted;
    return std::max(-loss.tau * d, (1.0 - loss.tau) * d);
  }
  const double d = truth - predicted;
  return d * d;
}

}  // namespace

double SyntheticSpec::signal_at(double x) const {
  return signal ? signal(x) : default_signal(x);
}

void SyntheticSpec::validate() const {
  if (n_samples < 1) throw InputError("synthetic sample count must be >= 1");
  if (!(noise_variance > 0.0)) {
    throw InputError("noise variance must be positive");
  }
  const double mass = 0.6 * edge_density + 0.4 * mid_density;
  if (std::abs(mass - 1.0) > 1e-9) {
    throw InputError("plateau densities must integrate to one");
  }
}

double synthetic_inverse_cdf(double u, const SyntheticSpec& spec) {
  const double edge_mass = 0.3 * spec.edge_density;  // each outer plateau
  const double mid_mass = 0.4 * spec.mid_density;
  if (u <= edge_mass) {
    return u / spec.edge_density;
  }
  if (u <= edge_mass + mid_mass) {
    return 0.3 + (u - edge_mass) / spec.mid_density;
  }
  return 0.7 + (u - edge_mass - mid_mass) / spec.edge_density;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));

  std::vector<double> xs(spec.n_samples);
  std::vector<double> ys(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    xs[i] = synthetic_inverse_cdf(uniform(rng), spec);
    ys[i] = spec.signal_at(xs[i]) + noise(rng);
  }
  return Dataset(1, 1, std::move(xs), std::move(ys));
}

std::string method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::Drce: return "drce";
    case MethodKind::Knn: return "knn";
    case MethodKind::NadarayaWatson: return "nw";
    case MethodKind::Epanechnikov: return "ne";
    case MethodKind::RobustKnn: return "robustknn";
  }
  return "unknown";
}

MethodKind method_from_name(const std::string& name) {
  if (name == "drce") return MethodKind::Drce;
  if (name == "knn") return MethodKind::Knn;
  if (name == "nw") return MethodKind::NadarayaWatson;
  if (name == "ne") return MethodKind::Epanechnikov;
  if (name == "robustknn") return MethodKind::RobustKnn;
  throw InputError("unknown method '" + name + "'");
}

std::string EstimatorSpec::describe() const {
  std::ostringstream out;
  out << method_name(kind);
  switch (kind) {
    case MethodKind::Knn:
      out << " k=" << k;
      break;
    case MethodKind::NadarayaWatson:
    case MethodKind::Epanechnikov:
      out << " h=" << bandwidth;
      break;
    case MethodKind::RobustKnn:
      out << " k=" << k << " rho=" << rho_resp;
      break;
    case MethodKind::Drce:
      out << " rank=" << gamma_rank << " rho_factor=" << rho_factor
          << " theta=" << theta;
      break;
  }
  return out.str();
}

HyperGrid HyperGrid::defaults() {
  HyperGrid grid;
  grid.ks.resize(10);
  std::iota(grid.ks.begin(), grid.ks.end(), std::size_t{1});
  // 15 log-spaced bandwidths covering 0.005 .. 0.2.
  const double lo = std::log(0.005);
  const double hi = std::log(0.2);
  for (int i = 0; i < 15; ++i) {
    grid.bandwidths.push_back(std::exp(lo + (hi - lo) * i / 14.0));
  }
  grid.gamma_ranks = {1.0, 1.3, 1.6, 2.0, 3.0, 5.0};
  grid.rho_factors = {0.0, 0.03, 0.06, 0.13, 0.25};
  grid.thetas = {1.0};
  grid.rho_resps = {0.0, 0.03, 0.06, 0.13, 0.25};
  return grid;
}

std::vector<EstimatorSpec> HyperGrid::candidates(MethodKind kind) const {
  std::vector<EstimatorSpec> out;
  switch (kind) {
    case MethodKind::Knn: {
      if (ks.empty()) throw InputError("empty k grid");
      for (std::size_t k : ks) {
        EstimatorSpec spec;
        spec.kind = kind;
        spec.k = k;
        out.push_back(spec);
      }
      break;
    }
    case MethodKind::NadarayaWatson:
    case MethodKind::Epanechnikov: {
      if (bandwidths.empty()) throw InputError("empty bandwidth grid");
      auto sorted = bandwidths;
      // Larger bandwidth first: the smoother fit wins score ties.
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      for (double h : sorted) {
        EstimatorSpec spec;
        spec.kind = kind;
        spec.bandwidth = h;
        out.push_back(spec);
      }
      break;
    }
    case MethodKind::RobustKnn: {
      if (ks.empty() || rho_resps.empty()) {
        throw InputError("empty robust k-NN grid");
      }
      for (std::size_t k : ks) {
        for (double rho : rho_resps) {
          EstimatorSpec spec;
          spec.kind = kind;
          spec.k = k;
          spec.rho_resp = rho;
          out.push_back(spec);
        }
      }
      break;
    }
    case MethodKind::Drce: {
      if (gamma_ranks.empty() || rho_factors.empty() || thetas.empty()) {
        throw InputError("empty robust estimator grid");
      }
      for (double rank : gamma_ranks) {
        for (double factor : rho_factors) {
          for (double theta : thetas) {
            EstimatorSpec spec;
            spec.kind = kind;
            spec.gamma_rank = rank;
            spec.rho_factor = factor;
            spec.theta = theta;
            out.push_back(spec);
          }
        }
      }
      break;
    }
  }
  return out;
}

double predict_scalar(const Dataset& data, std::span<const double> x0,
                      const EstimatorSpec& spec, const LossSpec& loss,
                      const SolverConfig& solver) {
  if (data.response_dim() != 1) {
    throw InputError("scalar prediction requires response dimension 1");
  }
  switch (spec.kind) {
    case MethodKind::Knn:
      return knn_mean(data, x0, harness_metric(1.0), spec.k)[0];
    case MethodKind::NadarayaWatson:
      return kernel_regress(data, x0, harness_metric(1.0),
                            KernelKind::Gaussian, spec.bandwidth)
          .value[0];
    case MethodKind::Epanechnikov:
      return kernel_regress(data, x0, harness_metric(1.0),
                            KernelKind::Epanechnikov, spec.bandwidth)
          .value[0];
    case MethodKind::RobustKnn:
      return robust_knn(data, x0, harness_metric(1.0), loss, spec.k,
                        spec.rho_resp, solver)[0];
    case MethodKind::Drce: {
      Query query;
      query.x0.assign(x0.begin(), x0.end());
      query.gamma = GammaRule::adaptive_rank(
          std::min(spec.gamma_rank, static_cast<double>(data.size())));
      query.rho = RhoRule::proportional(spec.rho_factor);
      return estimate(data, query, harness_metric(spec.theta), loss, solver)
          .beta_star[0];
    }
  }
  throw InputError("unknown method kind");
}

CrossValidationResult loocv_select(const Dataset& data, MethodKind kind,
                                   const HyperGrid& grid, const LossSpec& loss,
                                   const SolverConfig& solver) {
  if (data.size() < 2) {
    throw InputError("leave-one-out cross validation needs N >= 2");
  }
  const auto candidates = grid.candidates(kind);
  std::vector<double> scores(candidates.size(), 0.0);

  for (std::size_t fold = 0; fold < data.size(); ++fold) {
    const Dataset training = data.without_row(fold);
    const auto x_held = data.covariate(fold);
    const double y_held = data.response_scalar(fold);
    const double penalty = squared_response_range(training);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double err = penalty;
      if (candidates[c].k <= training.size()) {
        try {
          const double pred =
              predict_scalar(training, x_held, candidates[c], loss, solver);
          err = fold_error(loss, y_held, pred);
        } catch (const InfeasibleRadiusError&) {
          // keep the range penalty: comparable, deterministic score
        }
      }
      scores[c] += err;
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (scores[c] < scores[best]) best = c;  // ties keep preference order
  }
  return {candidates[best], scores[best] / static_cast<double>(data.size())};
}

std::vector<std::vector<double>> evaluate_errors(
    const Dataset& data, const std::vector<EstimatorSpec>& specs,
    std::span<const double> x0s, const std::function<double(double)>& truth,
    const SolverConfig& solver) {
  std::vector<std::vector<double>> errors(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    errors[s].reserve(x0s.size());
    for (double x0 : x0s) {
      const double pred =
          predict_scalar(data, {&x0, 1}, specs[s], LossSpec::squared_scalar(),
                         solver);
      errors[s].push_back(std::abs(pred - truth(x0)));
    }
  }
  return errors;
}

double type_p_deviation(std::span<const double> errors, double p) {
  if (errors.empty()) throw InputError("empty error sample");
  if (!(p > 0.0)) throw InputError("deviation order p must be positive");
  double acc = 0.0;
  for (double e : errors) acc += std::pow(std::abs(e), p);
  acc /= static_cast<double>(errors.size());
  return std::sqrt(2.0 / p) * std::pow(acc, 1.0 / p);
}

std::vector<std::pair<double, double>> cdf_points(
    std::span<const double> errors) {
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(sorted.size());
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double EvalReport::mean_mae(std::size_t method_index, double x0_lo,
                            double x0_hi) const {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t q = 0; q < x0s.size(); ++q) {
    if (x0s[q] < x0_lo - 1e-12 || x0s[q] > x0_hi + 1e-12) continue;
    acc += mae[method_index][q];
    ++count;
  }
  if (count == 0) throw InputError("no query points in the requested window");
  return acc / static_cast<double>(count);
}

EvalReport make_eval_report(
    const std::vector<std::string>& methods, const std::vector<double>& x0s,
    const std::vector<std::vector<std::vector<double>>>& errors_by_method,
    double pool_lo, double pool_hi, const std::vector<double>& p_values) {
  if (methods.size() != errors_by_method.size()) {
    throw InputError("method name/error sample mismatch");
  }
  EvalReport report;
  report.methods = methods;
  report.x0s = x0s;
  report.p_values = p_values;
  report.mae.resize(methods.size());
  report.pooled_errors.resize(methods.size());
  report.type_p.resize(methods.size());

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const auto& samples = errors_by_method[mi];  // [x0][run]
    if (samples.size() != x0s.size()) {
      throw InputError("error sample count does not match query points");
    }
    report.mae[mi].resize(x0s.size());
    for (std::size_t q = 0; q < x0s.size(); ++q) {
      if (samples[q].empty()) throw InputError("empty error sample");
      report.mae[mi][q] =
          std::accumulate(samples[q].begin(), samples[q].end(), 0.0) /
          static_cast<double>(samples[q].size());
      if (x0s[q] >= pool_lo - 1e-12 && x0s[q] <= pool_hi + 1e-12) {
        report.pooled_errors[mi].insert(report.pooled_errors[mi].end(),
                                        samples[q].begin(), samples[q].end());
      }
    }
    for (double p : p_values) {
      report.type_p[mi].push_back(
          type_p_deviation(report.pooled_errors[mi], p));
    }
  }
  return report;
}

EvalReport run_experiment(const ExperimentConfig& config) {
  if (config.runs < 1) throw InputError("experiment needs at least one run");
  std::vector<double> x0s = config.x0s;
  if (x0s.empty()) {
    for (int j = 0; j <= 20; ++j) x0s.push_back(0.2 + 0.01 * j);
  }
  std::vector<std::string> names;
  names.reserve(config.methods.size());
  for (auto kind : config.methods) names.push_back(method_name(kind));

  // errors[method][x0][run]
  std::vector<std::vector<std::vector<double>>> errors(
      config.methods.size(),
      std::vector<std::vector<double>>(x0s.size(),
                                       std::vector<double>(config.runs)));

  const auto one_run = [&](std::size_t run) {
    SyntheticSpec spec = config.synthetic;
    spec.n_samples = config.n_samples;
    spec.seed = config.base_seed + run;
    const Dataset data = generate_synthetic(spec);

    std::vector<EstimatorSpec> tuned;
    tuned.reserve(config.methods.size());
    for (auto kind : config.methods) {
      tuned.push_back(loocv_select(data, kind, config.grid,
                                   LossSpec::squared_scalar(), config.solver)
                          .spec);
    }
    const auto run_errors = evaluate_errors(
        data, tuned, x0s, [&](double x) { return spec.signal_at(x); },
        config.solver);
    for (std::size_t mi = 0; mi < tuned.size(); ++mi) {
      for (std::size_t q = 0; q < x0s.size(); ++q) {
        errors[mi][q][run] = run_errors[mi][q];
      }
    }
  };

  unsigned workers = config.threads != 0 ? config.threads
                                         : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, config.runs));
  if (workers == 1) {
    for (std::size_t run = 0; run < config.runs; ++run) one_run(run);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&] {
        for (std::size_t run = next.fetch_add(1); run < config.runs;
             run = next.fetch_add(1)) {
          one_run(run);
        }
      }));
    }
    for (auto& task : tasks) task.get();
  }

  return make_eval_report(names, x0s, errors, config.pool_lo, config.pool_hi,
                          config.p_values);
}

}  // namespace drce
