#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drce/baselines.hpp"
#include "drce/dataset.hpp"
#include "drce/solvers.hpp"

namespace drce {

/// Scalar covariate drawn from a piecewise-constant density (high plateaus on
/// [0, 0.3] and [0.7, 1], low plateau in between), response = signal(x) plus
/// centered Gaussian noise.
struct SyntheticSpec {
  std::size_t n_samples = 100;
  std::uint64_t seed = 0;
  double edge_density = 100.0 / 72.0;
  double mid_density = 30.0 / 72.0;
  double noise_variance = 0.01;
  std::function<double(double)> signal;  // defaults to sin(10 x)

  double signal_at(double x) const;
  void validate() const;
};

/// Inverse CDF of the piecewise-constant covariate density.
double synthetic_inverse_cdf(double u, const SyntheticSpec& spec);

/// Deterministic per seed.
Dataset generate_synthetic(const SyntheticSpec& spec);

enum class MethodKind { Drce, Knn, NadarayaWatson, Epanechnikov, RobustKnn };

std::string method_name(MethodKind kind);
MethodKind method_from_name(const std::string& name);

/// One fully configured estimator; only the fields relevant to `kind` are
/// meaningful.
struct EstimatorSpec {
  MethodKind kind = MethodKind::Knn;
  std::size_t k = 1;          // Knn, RobustKnn
  double bandwidth = 0.1;     // NadarayaWatson, Epanechnikov
  double rho_resp = 0.0;      // RobustKnn
  double gamma_rank = 1.0;    // Drce
  double rho_factor = 0.0;    // Drce
  double theta = 1.0;         // Drce

  std::string describe() const;
};

/// Candidate lists for cross validation, defaulting to neighborhoods of the
/// hyperparameter ranges used in the synthetic benchmark.
struct HyperGrid {
  std::vector<std::size_t> ks;
  std::vector<double> bandwidths;
  std::vector<double> gamma_ranks;
  std::vector<double> rho_factors;
  std::vector<double> thetas;
  std::vector<double> rho_resps;

  static HyperGrid defaults();

  /// Candidates for one method, enumerated in tie-break preference order
  /// (smaller k first, larger bandwidth first, smaller budget first).
  std::vector<EstimatorSpec> candidates(MethodKind kind) const;
};

/// Scalar conditional estimate of the configured method at x0. The metric is
/// the plain 2-norm on covariates with an absolute response distance (scaled
/// by spec.theta for the robust estimator). Throws InfeasibleRadiusError only
/// for fixed-radius robust queries; rank-adaptive radii are always feasible.
double predict_scalar(const Dataset& data, std::span<const double> x0,
                      const EstimatorSpec& spec,
                      const LossSpec& loss = LossSpec::squared_scalar(),
                      const SolverConfig& solver = {});

struct CrossValidationResult {
  EstimatorSpec spec;
  double score = 0.0;
};

/// Leave-one-out cross validation over the method's candidate list. Each fold
/// predicts the held-out response from the remaining samples; fold errors use
/// the squared distance for mean estimation and the pinball loss for quantile
/// estimation. A fold on which the candidate is infeasible contributes a
/// penalty equal to the squared response range of that fold's training set.
/// Ties keep the earliest candidate in preference order.
CrossValidationResult loocv_select(const Dataset& data, MethodKind kind,
                                   const HyperGrid& grid,
                                   const LossSpec& loss = LossSpec::squared_scalar(),
                                   const SolverConfig& solver = {});

/// Absolute estimation errors of configured methods against a ground-truth
/// conditional mean, one row per method, one column per query point.
std::vector<std::vector<double>> evaluate_errors(
    const Dataset& data, const std::vector<EstimatorSpec>& specs,
    std::span<const double> x0s,
    const std::function<double(double)>& truth,
    const SolverConfig& solver = {});

struct EvalReport {
  std::vector<std::string> methods;
  std::vector<double> x0s;
  std::vector<std::vector<double>> mae;            // [method][x0]
  std::vector<std::vector<double>> pooled_errors;  // [method], window-pooled
  std::vector<double> p_values;
  std::vector<std::vector<double>> type_p;         // [method][p]

  double mean_mae(std::size_t method_index, double x0_lo, double x0_hi) const;
};

/// Fold per-run error samples into the report: per-x0 mean absolute errors,
/// the pooled error sample inside [pool_lo, pool_hi], and type-p deviations
/// of the pooled sample.
EvalReport make_eval_report(
    const std::vector<std::string>& methods, const std::vector<double>& x0s,
    const std::vector<std::vector<std::vector<double>>>& errors_by_method,
    double pool_lo, double pool_hi, const std::vector<double>& p_values);

/// Normalized type-p deviation sqrt(2/p) * (mean |e|^p)^(1/p).
double type_p_deviation(std::span<const double> errors, double p);

/// Empirical CDF support points (sorted error, cumulative probability).
std::vector<std::pair<double, double>> cdf_points(
    std::span<const double> errors);

struct ExperimentConfig {
  std::size_t n_samples = 100;
  std::size_t runs = 100;
  std::uint64_t base_seed = 1;
  std::vector<double> x0s;  // empty -> 0.20, 0.21, ..., 0.40
  double pool_lo = 0.28;
  double pool_hi = 0.32;
  std::vector<double> p_values = {0.5, 1.0, 2.0};
  std::vector<MethodKind> methods = {MethodKind::Drce, MethodKind::Knn,
                                     MethodKind::NadarayaWatson,
                                     MethodKind::Epanechnikov,
                                     MethodKind::RobustKnn};
  HyperGrid grid = HyperGrid::defaults();
  SyntheticSpec synthetic;
  SolverConfig solver;
  unsigned threads = 0;  // 0 -> hardware concurrency
};

/// Repeated synthetic benchmark: per run, draw a fresh training set with seed
/// base_seed + run, tune every method by leave-one-out cross validation, and
/// record absolute errors against the noiseless signal at each query point.
/// Runs are independent and executed in parallel; aggregation order is fixed,
/// so the report is deterministic for a given config.
EvalReport run_experiment(const ExperimentConfig& config);

}  // namespace drce
