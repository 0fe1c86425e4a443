#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "drce/errors.hpp"
#include "drce/experiments.hpp"

using namespace drce;

TEST_CASE("synthetic density bookkeeping") {
  SyntheticSpec spec;
  // plateau masses: 0.3 * 100/72 twice, 0.4 * 30/72 in the middle
  CHECK(0.3 * spec.edge_density + 0.4 * spec.mid_density +
            0.3 * spec.edge_density ==
        doctest::Approx(1.0));
  spec.validate();

  // u = 0.5 falls in the middle plateau
  const double x = synthetic_inverse_cdf(0.5, spec);
  CHECK(x > 0.3);
  CHECK(x < 0.7);
  CHECK(x == doctest::Approx(0.5));
  CHECK(synthetic_inverse_cdf(30.0 / 72.0, spec) == doctest::Approx(0.3));
  CHECK(synthetic_inverse_cdf(42.0 / 72.0, spec) == doctest::Approx(0.7));
  CHECK(synthetic_inverse_cdf(1.0, spec) == doctest::Approx(1.0));

  SyntheticSpec bad;
  bad.mid_density = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("synthetic generation is reproducible and well scaled") {
  SyntheticSpec spec;
  spec.n_samples = 500;
  spec.seed = 11;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  REQUIRE(a.size() == 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.covariate(i)[0] == b.covariate(i)[0]);
    CHECK(a.response_scalar(i) == b.response_scalar(i));
  }
  spec.seed = 12;
  const auto c = generate_synthetic(spec);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    any_differs = any_differs || a.covariate(i)[0] != c.covariate(i)[0];
  }
  CHECK(any_differs);

  // responses hug the noiseless signal
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.response_scalar(i) -
                                     std::sin(10.0 * a.covariate(i)[0])));
  }
  CHECK(worst < 0.8);  // 8 sigma
}

TEST_CASE("plateau frequencies converge to their masses") {
  SyntheticSpec spec;
  spec.n_samples = 100000;
  spec.seed = 5;
  const auto data = generate_synthetic(spec);
  std::size_t low = 0, mid = 0, high = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.covariate(i)[0];
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    if (x <= 0.3) {
      ++low;
    } else if (x < 0.7) {
      ++mid;
    } else {
      ++high;
    }
  }
  const auto n = static_cast<double>(data.size());
  const auto check_fraction = [&](std::size_t count, double mass) {
    const double sigma = std::sqrt(mass * (1.0 - mass) / n);
    CHECK(std::abs(count / n - mass) <= 3.0 * sigma);
  };
  check_fraction(low, 30.0 / 72.0);
  check_fraction(mid, 12.0 / 72.0);
  check_fraction(high, 30.0 / 72.0);
}

TEST_CASE("hypergrid candidate enumeration") {
  const auto grid = HyperGrid::defaults();
  CHECK(grid.candidates(MethodKind::Knn).size() == 10);
  CHECK(grid.candidates(MethodKind::NadarayaWatson).size() == 15);
  CHECK(grid.candidates(MethodKind::Drce).size() == 30);
  CHECK(grid.candidates(MethodKind::RobustKnn).size() == 50);
  // bandwidths in tie-break preference order: widest first
  const auto nw = grid.candidates(MethodKind::NadarayaWatson);
  CHECK(nw.front().bandwidth == doctest::Approx(0.2));
  CHECK(nw.back().bandwidth == doctest::Approx(0.005));
  // k grid ascends
  const auto knn = grid.candidates(MethodKind::Knn);
  CHECK(knn.front().k == 1);
  CHECK(knn.back().k == 10);
}

TEST_CASE("leave-one-out cross validation") {
  SUBCASE("single candidate comes back unchanged") {
    Dataset data(1, 1, {0.0, 1.0}, {0.5, 0.7});
    HyperGrid grid;
    grid.ks = {1};
    const auto result = loocv_select(data, MethodKind::Knn, grid);
    CHECK(result.spec.k == 1);
  }
  SUBCASE("constant responses tie and the smallest k wins") {
    Dataset data(1, 1, {0.0, 0.3, 0.6, 1.0}, {2.0, 2.0, 2.0, 2.0});
    HyperGrid grid;
    grid.ks = {1, 2, 3};
    const auto result = loocv_select(data, MethodKind::Knn, grid);
    CHECK(result.spec.k == 1);
    CHECK(result.score == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("hand-computed three-point instance") {
    Dataset data(1, 1, {0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    HyperGrid grid;
    grid.ks = {1, 2};
    const auto result = loocv_select(data, MethodKind::Knn, grid);
    // k=1 folds: predict 1 for y=0, 0 for y=1 (index tie-break), 1 for y=2
    // -> mean squared error 1.0
    // k=2 folds: predict 1.5, 1.0, 0.5 -> errors 2.25, 0, 2.25 -> mean 1.5
    CHECK(result.spec.k == 1);
    CHECK(result.score == doctest::Approx(1.0));
  }
  SUBCASE("row permutation does not change the selection") {
    SyntheticSpec spec;
    spec.n_samples = 24;
    spec.seed = 31;
    const auto data = generate_synthetic(spec);

    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(7);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> xs, ys;
    for (std::size_t i : perm) {
      xs.push_back(data.covariate(i)[0]);
      ys.push_back(data.response_scalar(i));
    }
    Dataset shuffled(1, 1, xs, ys);

    HyperGrid grid;
    grid.ks = {1, 2, 3, 4, 5};
    grid.gamma_ranks = {1.0, 2.0, 3.0};
    grid.rho_factors = {0.0, 0.1};
    grid.thetas = {1.0};
    for (auto kind : {MethodKind::Knn, MethodKind::Drce}) {
      const auto a = loocv_select(data, kind, grid);
      const auto b = loocv_select(shuffled, kind, grid);
      CHECK(a.spec.k == b.spec.k);
      CHECK(a.spec.gamma_rank == b.spec.gamma_rank);
      CHECK(a.spec.rho_factor == b.spec.rho_factor);
      CHECK(a.score == doctest::Approx(b.score).epsilon(1e-12));
    }
  }
  SUBCASE("infeasible candidates collect the range penalty") {
    Dataset data(1, 1, {0.0, 0.2, 1.0}, {1.0, 2.0, 4.0});
    HyperGrid grid;
    grid.gamma_ranks = {1.0};
    grid.rho_factors = {0.0};
    grid.thetas = {1.0};
    // rank-adaptive radii are always feasible, so scores stay finite
    const auto result = loocv_select(data, MethodKind::Drce, grid);
    CHECK(std::isfinite(result.score));
  }
}

TEST_CASE("type-p deviation") {
  const std::vector<double> unit_errors = {1.0, 1.0, 1.0};
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(type_p_deviation(unit_errors, p) ==
          doctest::Approx(std::sqrt(2.0 / p)));
  }
  const std::vector<double> errors = {0.0, 2.0};
  CHECK(type_p_deviation(errors, 2.0) == doctest::Approx(std::sqrt(2.0)));
  // p = 2 normalization equals the root mean square error
  const double rmse = std::sqrt((0.0 + 4.0) / 2.0);
  CHECK(type_p_deviation(errors, 2.0) == doctest::Approx(rmse));
  CHECK_THROWS_AS(type_p_deviation(errors, 0.0), InputError);
  CHECK_THROWS_AS(type_p_deviation(std::vector<double>{}, 1.0), InputError);
}

TEST_CASE("evaluation report") {
  // two methods, two query points, two runs each
  const std::vector<std::string> methods = {"perfect", "noisy"};
  const std::vector<double> x0s = {0.3, 0.31};
  const std::vector<std::vector<std::vector<double>>> errors = {
      {{0.0, 0.0}, {0.0, 0.0}},
      {{0.0, 2.0}, {1.0, 1.0}},
  };
  const auto report =
      make_eval_report(methods, x0s, errors, 0.28, 0.32, {2.0});
  CHECK(report.mae[0][0] == 0.0);
  CHECK(report.mae[1][0] == doctest::Approx(1.0));
  CHECK(report.mae[1][1] == doctest::Approx(1.0));
  CHECK(report.mean_mae(1, 0.28, 0.32) == doctest::Approx(1.0));
  // pooled sample over the window has all four entries
  CHECK(report.pooled_errors[1].size() == 4);
  CHECK(report.type_p[0][0] == doctest::Approx(0.0).scale(1.0));
  CHECK(report.type_p[1][0] ==
        doctest::Approx(type_p_deviation(report.pooled_errors[1], 2.0)));

  const auto cdf = cdf_points(report.pooled_errors[1]);
  REQUIRE(cdf.size() == 4);
  CHECK(cdf.front().second == doctest::Approx(0.25));
  CHECK(cdf.back().second == doctest::Approx(1.0));
  // monotone in both coordinates
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].first >= cdf[i - 1].first);
    CHECK(cdf[i].second >= cdf[i - 1].second);
  }
  // CDF at 1.0 counts the errors at most one: {0, 1, 1} of 4
  double at_one = 0.0;
  for (const auto& [e, c] : cdf) {
    if (e <= 1.0) at_one = c;
  }
  CHECK(at_one == doctest::Approx(0.75));
}

TEST_CASE("predict_scalar dispatches every method") {
  SyntheticSpec spec;
  spec.n_samples = 40;
  spec.seed = 3;
  const auto data = generate_synthetic(spec);
  const std::vector<double> x0 = {0.3};

  EstimatorSpec knn;
  knn.kind = MethodKind::Knn;
  knn.k = 3;
  EstimatorSpec nw;
  nw.kind = MethodKind::NadarayaWatson;
  nw.bandwidth = 0.05;
  EstimatorSpec ne;
  ne.kind = MethodKind::Epanechnikov;
  ne.bandwidth = 0.1;
  EstimatorSpec robust;
  robust.kind = MethodKind::RobustKnn;
  robust.k = 3;
  robust.rho_resp = 0.05;
  EstimatorSpec drce_spec;
  drce_spec.kind = MethodKind::Drce;
  drce_spec.gamma_rank = 3.0;
  drce_spec.rho_factor = 0.1;

  const double truth = std::sin(3.0);
  for (const auto& spec_m : {knn, nw, ne, robust, drce_spec}) {
    const double pred = predict_scalar(data, x0, spec_m);
    CHECK(std::isfinite(pred));
    CHECK(std::abs(pred - truth) < 0.6);
  }
}

TEST_CASE("small experiment end to end") {
  ExperimentConfig config;
  config.n_samples = 30;
  config.runs = 3;
  config.base_seed = 17;
  config.x0s = {0.29, 0.3, 0.31};
  config.pool_lo = 0.28;
  config.pool_hi = 0.32;
  config.methods = {MethodKind::Knn, MethodKind::NadarayaWatson};
  config.grid.ks = {1, 2, 3};
  config.grid.bandwidths = {0.02, 0.05, 0.1};
  config.threads = 2;

  const auto report = run_experiment(config);
  REQUIRE(report.methods.size() == 2);
  REQUIRE(report.mae.size() == 2);
  for (const auto& row : report.mae) {
    REQUIRE(row.size() == 3);
    for (double v : row) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
  CHECK(report.pooled_errors[0].size() == 9);

  // deterministic across thread counts
  ExperimentConfig serial = config;
  serial.threads = 1;
  const auto again = run_experiment(serial);
  for (std::size_t mi = 0; mi < report.mae.size(); ++mi) {
    for (std::size_t q = 0; q < report.mae[mi].size(); ++q) {
      CHECK(report.mae[mi][q] == again.mae[mi][q]);
    }
  }
}
