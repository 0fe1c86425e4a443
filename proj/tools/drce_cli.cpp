// Command-line front end: dataset synthesis, single-query estimation,
// leave-one-out hyperparameter selection, the repeated synthetic benchmark,
// and a self-check against the brute-force reference evaluators.
//
// Exit codes: 0 success, 1 input error, 2 at least one infeasible query.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drce/baselines.hpp"
#include "drce/csv.hpp"
#include "drce/errors.hpp"
#include "drce/experiments.hpp"
#include "drce/locality.hpp"
#include "drce/oracle.hpp"
#include "drce/robust_loss.hpp"
#include "drce/solvers.hpp"

namespace {

using drce::format_value;
using json = nlohmann::json;

struct CommonOptions {
  std::string data_path;
  std::size_t xdim = 1;
  std::size_t ydim = 1;
  bool header = false;
  std::vector<std::string> x0_raw;
  std::optional<double> gamma;
  std::optional<double> gamma_rank;
  std::optional<double> rho;
  std::optional<double> rho_factor;
  std::string loss = "mean";
  double tau = 0.5;
  double theta = 1.0;
  std::string method = "drce";
  std::size_t k = 3;
  double bandwidth = 0.05;
  double rho_resp = 0.0;
  double y_lower = -std::numeric_limits<double>::infinity();
  double y_upper = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  std::string out_path;
  std::string config_path;
  std::size_t n_samples = 100;
  std::size_t runs = 100;
  unsigned threads = 0;
};

// Flat key/value config file; explicit command-line flags take precedence.
void apply_config(const std::string& path, CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw drce::InputError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw drce::InputError("config parse error: " + std::string(err.what()));
  }
  if (!doc.is_object()) {
    throw drce::InputError("config must be a flat JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    auto* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw drce::InputError("config key '" + key + "' matches no option");
    }
    if (!opt->empty()) continue;  // flag given on the command line wins
    if (value.is_array()) {
      for (const auto& item : value) {
        opt->add_result(item.is_string() ? item.get<std::string>()
                                         : item.dump());
      }
    } else {
      opt->add_result(value.is_string() ? value.get<std::string>()
                                        : value.dump());
    }
    opt->run_callback();
  }
}

std::vector<double> parse_point(const std::string& raw, std::size_t dim) {
  std::vector<double> point;
  std::stringstream cells(raw);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    try {
      point.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw drce::InputError("bad query coordinate '" + cell + "'");
    }
  }
  if (point.size() != dim) {
    throw drce::InputError("query point '" + raw + "' has " +
                           std::to_string(point.size()) +
                           " coordinates, expected " + std::to_string(dim));
  }
  return point;
}

drce::LossSpec make_loss(const CommonOptions& opt) {
  if (opt.loss == "mean") {
    return drce::LossSpec::squared_scalar(opt.y_lower, opt.y_upper);
  }
  if (opt.loss == "quantile") {
    return drce::LossSpec::pinball(opt.tau, opt.y_lower, opt.y_upper);
  }
  if (opt.loss == "vecmean2") return drce::LossSpec::squared_vector_2ball();
  if (opt.loss == "vecmeaninf") return drce::LossSpec::squared_vector_infball();
  throw drce::InputError("unknown loss '" + opt.loss + "'");
}

drce::GroundMetric make_metric(const CommonOptions& opt,
                               const drce::LossSpec& loss) {
  drce::GroundMetric metric;
  metric.covariate_norm = drce::CovariateNorm::Two;
  metric.theta = opt.theta;
  switch (loss.kind) {
    case drce::LossSpec::Kind::SquaredScalar:
    case drce::LossSpec::Kind::Pinball:
      metric.response_metric = drce::ResponseMetricKind::ScaledAbsolute;
      break;
    case drce::LossSpec::Kind::SquaredVector2:
      metric.response_metric = drce::ResponseMetricKind::TwoNorm;
      break;
    case drce::LossSpec::Kind::SquaredVectorInf:
      metric.response_metric = drce::ResponseMetricKind::InfNorm;
      break;
  }
  return metric;
}

drce::Query make_query(const CommonOptions& opt, std::vector<double> x0) {
  drce::Query query;
  query.x0 = std::move(x0);
  if (opt.gamma && opt.gamma_rank) {
    throw drce::InputError("--gamma and --gamma-rank are mutually exclusive");
  }
  if (opt.gamma_rank) {
    query.gamma = drce::GammaRule::adaptive_rank(*opt.gamma_rank);
  } else {
    query.gamma = drce::GammaRule::fixed(opt.gamma.value_or(0.0));
  }
  if (opt.rho && opt.rho_factor) {
    throw drce::InputError("--rho and --rho-factor are mutually exclusive");
  }
  if (opt.rho_factor) {
    query.rho = drce::RhoRule::proportional(*opt.rho_factor);
  } else {
    query.rho = drce::RhoRule::fixed(opt.rho.value_or(0.0));
  }
  return query;
}

std::string join_values(std::span<const double> values) {
  std::string out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j > 0) out += ';';
    out += format_value(values[j]);
  }
  return out;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw drce::InputError("cannot write '" + path + "'");
  return file;
}

int cmd_estimate(const CommonOptions& opt) {
  if (opt.data_path.empty()) throw drce::InputError("--data is required");
  if (opt.x0_raw.empty()) throw drce::InputError("at least one --x0 required");
  const auto data = drce::load_csv(opt.data_path, opt.xdim, opt.ydim,
                                   opt.header);
  const auto loss = make_loss(opt);
  const auto metric = make_metric(opt, loss);

  std::ofstream file;
  auto& out = open_output(file, opt.out_path);
  out << "x0,method,beta,f,I_size,I1_size,gamma,rho,iterations,status,"
         "min_kappa\n";

  bool any_infeasible = false;
  for (const auto& raw : opt.x0_raw) {
    const auto x0 = parse_point(raw, opt.xdim);
    const std::string x0_text = join_values(x0);
    if (opt.method == "drce") {
      const auto query = make_query(opt, x0);
      try {
        const auto solution = drce::estimate(data, query, metric, loss);
        out << x0_text << ",drce," << join_values(solution.beta_star) << ','
            << format_value(solution.f_star) << ','
            << solution.scene.member_count() << ','
            << solution.scene.inner_count() << ','
            << format_value(solution.scene.gamma) << ','
            << format_value(solution.scene.rho) << ',' << solution.iterations
            << ",ok,\n";
      } catch (const drce::InfeasibleRadiusError& err) {
        any_infeasible = true;
        out << x0_text << ",drce,,,,,,,,infeasible,"
            << format_value(err.min_kappa()) << '\n';
      }
    } else {
      std::vector<double> beta;
      std::size_t size = 0;
      if (opt.method == "knn") {
        beta = drce::knn_mean(data, x0, metric, opt.k);
        size = opt.k;
      } else if (opt.method == "nw" || opt.method == "ne") {
        beta = drce::kernel_regress(data, x0, metric,
                                    opt.method == "nw"
                                        ? drce::KernelKind::Gaussian
                                        : drce::KernelKind::Epanechnikov,
                                    opt.bandwidth)
                   .value;
        size = data.size();
      } else if (opt.method == "robustknn") {
        beta = drce::robust_knn(data, x0, metric, loss, opt.k, opt.rho_resp);
        size = opt.k;
      } else {
        throw drce::InputError("unknown method '" + opt.method + "'");
      }
      out << x0_text << ',' << opt.method << ',' << join_values(beta)
          << ",," << size << ",,,,," << "ok,\n";
    }
  }
  return any_infeasible ? 2 : 0;
}

int cmd_synth(const CommonOptions& opt) {
  drce::SyntheticSpec spec;
  spec.n_samples = opt.n_samples;
  spec.seed = opt.seed;
  const auto data = drce::generate_synthetic(spec);
  if (opt.out_path.empty()) {
    drce::write_dataset_csv(data, std::cout);
  } else {
    drce::write_dataset_csv(data, opt.out_path);
  }
  return 0;
}

int cmd_cv(const CommonOptions& opt) {
  if (opt.data_path.empty()) throw drce::InputError("--data is required");
  const auto data = drce::load_csv(opt.data_path, opt.xdim, opt.ydim,
                                   opt.header);
  const auto loss = make_loss(opt);
  const auto grid = drce::HyperGrid::defaults();
  const auto kind = drce::method_from_name(opt.method);
  const auto result = drce::loocv_select(data, kind, grid, loss);

  std::cerr << "selected " << result.spec.describe()
            << " (cv score " << format_value(result.score) << ")\n";

  const bool knn_like = kind == drce::MethodKind::Knn ||
                        kind == drce::MethodKind::RobustKnn;
  const bool kernel = kind == drce::MethodKind::NadarayaWatson ||
                      kind == drce::MethodKind::Epanechnikov;
  const bool robust = kind == drce::MethodKind::Drce;

  std::ofstream file;
  auto& out = open_output(file, opt.out_path);
  out << "method,k,bandwidth,rho_resp,gamma_rank,rho_factor,theta,score\n";
  out << drce::method_name(kind) << ',';
  if (knn_like) out << result.spec.k;
  out << ',';
  if (kernel) out << format_value(result.spec.bandwidth);
  out << ',';
  if (kind == drce::MethodKind::RobustKnn) {
    out << format_value(result.spec.rho_resp);
  }
  out << ',';
  if (robust) {
    out << format_value(result.spec.gamma_rank) << ','
        << format_value(result.spec.rho_factor) << ','
        << format_value(result.spec.theta) << ',';
  } else {
    out << ",,,";
  }
  out << format_value(result.score) << '\n';
  return 0;
}

int cmd_experiment(const CommonOptions& opt) {
  drce::ExperimentConfig config;
  config.n_samples = opt.n_samples;
  config.runs = opt.runs;
  config.base_seed = opt.seed;
  config.threads = opt.threads;
  const auto report = drce::run_experiment(config);

  const std::string prefix = opt.out_path.empty() ? "experiment" : opt.out_path;
  {
    std::ofstream out(prefix + "_mae.csv");
    if (!out) throw drce::InputError("cannot write MAE table");
    out << "x0,method,mae\n";
    for (std::size_t q = 0; q < report.x0s.size(); ++q) {
      for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
        out << format_value(report.x0s[q]) << ',' << report.methods[mi] << ','
            << format_value(report.mae[mi][q]) << '\n';
      }
    }
  }
  {
    std::ofstream out(prefix + "_cdf.csv");
    if (!out) throw drce::InputError("cannot write CDF table");
    out << "method,error,cdf\n";
    for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
      for (const auto& [error, prob] :
           drce::cdf_points(report.pooled_errors[mi])) {
        out << report.methods[mi] << ',' << format_value(error) << ','
            << format_value(prob) << '\n';
      }
    }
  }
  {
    std::ofstream out(prefix + "_typep.csv");
    if (!out) throw drce::InputError("cannot write deviation table");
    out << "method,p,deviation\n";
    for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
      for (std::size_t pi = 0; pi < report.p_values.size(); ++pi) {
        out << report.methods[mi] << ','
            << format_value(report.p_values[pi]) << ','
            << format_value(report.type_p[mi][pi]) << '\n';
      }
    }
  }
  std::cerr << "wrote " << prefix << "_{mae,cdf,typep}.csv\n";
  return 0;
}

// Small randomized cross-checks of the closed forms against the brute-force
// evaluators; prints one line per property.
int cmd_check(const CommonOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool all_ok = true;
  const auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << '\n';
    all_ok = all_ok && ok;
  };

  {
    bool ok = true;
    for (int trial = 0; trial < 300 && ok; ++trial) {
      const std::size_t count = 1 + rng() % 10;
      std::vector<double> v(count);
      std::vector<char> inner(count);
      for (std::size_t i = 0; i < count; ++i) {
        v[i] = 10.0 * unit(rng);
        inner[i] = unit(rng) < 0.4 ? 1 : 0;
      }
      const auto greedy = drce::select_alpha(v, inner);
      const double brute = drce::oracle::max_ratio_enumerate(v, inner);
      ok = std::abs(greedy.f_value - brute) <= 1e-10;
    }
    report("participation mask ratio vs enumeration", ok);
  }
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const double y_hat = 4.0 * unit(rng) - 2.0;
      const double r = unit(rng);
      const double beta = 4.0 * unit(rng) - 2.0;
      const double closed =
          drce::v_star_squared_scalar(y_hat, r, -2.5, 2.5, beta);
      const auto loss = drce::LossSpec::squared_scalar(-2.5, 2.5);
      const double grid = drce::oracle::grid_max(
          [&](double y) { return loss.value({&y, 1}, {&beta, 1}); },
          std::max(-2.5, y_hat - r), std::min(2.5, y_hat + r), 4000);
      ok = std::abs(closed - grid) <= 1e-5;
    }
    report("squared-scalar inner maximum vs grid search", ok);
  }
  {
    bool ok = true;
    for (int trial = 0; trial < 40 && ok; ++trial) {
      std::vector<double> y_hat = {unit(rng), unit(rng)};
      std::vector<double> beta = {unit(rng), unit(rng)};
      const double r = 0.1 + unit(rng);
      const double closed = drce::v_star_vector_2ball(y_hat, r, beta);
      const double sampled = drce::oracle::sphere_max(
          drce::LossSpec::squared_vector_2ball(), y_hat, r, beta,
          opt.seed + trial);
      ok = std::abs(closed - sampled) <= 1e-5 * std::max(1.0, closed);
    }
    report("2-norm ball inner maximum vs boundary sampling", ok);
  }
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const double d = 2.0 * unit(rng);
      const double gamma = unit(rng);
      std::vector<double> x0 = {unit(rng), unit(rng)};
      std::vector<double> target = {x0[0] + d, x0[1]};
      drce::GroundMetric metric;
      const double closed = drce::kappa(d, gamma);
      const double sampled = drce::oracle::ball_min_distance(
          x0, gamma, target, metric, opt.seed + trial);
      ok = std::abs(closed - sampled) <= 1e-6;
    }
    report("transport slack vs numerical ball projection", ok);
  }
  {
    bool ok = true;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 25 && ok; ++trial) {
      const std::size_t n = 8;
      std::vector<double> xs(n), ys(n);
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = gauss(rng);
        ys[i] = gauss(rng);
      }
      drce::Dataset data(1, 1, xs, ys);
      drce::Query query;
      query.x0 = {0.0};
      query.gamma = drce::GammaRule::fixed(0.0);
      double rho = 0.2 + unit(rng);
      query.rho = drce::RhoRule::fixed(rho);
      while (!drce::check_feasible(data, query, drce::GroundMetric{})) {
        rho *= 2.0;
        query.rho = drce::RhoRule::fixed(rho);
      }
      drce::GroundMetric metric;
      const auto loss = drce::LossSpec::squared_scalar();
      const auto solution = drce::estimate(data, query, metric, loss);
      const auto scene = drce::build_local_scene(data, query, metric);
      const double closed =
          drce::chebyshev_closed_form(data, scene, metric, loss);
      ok = std::abs(solution.beta_star[0] - closed) <= 1e-6;
    }
    report("golden-section estimate vs interval-hull midpoint", ok);
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust local conditional estimation"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand(
      "estimate", "Estimate at query points and emit a CSV record per query"));
  subs.push_back(app.add_subcommand(
      "synth", "Generate the piecewise-density synthetic dataset"));
  subs.push_back(app.add_subcommand(
      "cv", "Select hyperparameters by leave-one-out cross validation"));
  subs.push_back(app.add_subcommand(
      "experiment", "Run the repeated synthetic benchmark"));
  subs.push_back(app.add_subcommand(
      "check", "Cross-check closed forms against brute-force evaluators"));

  for (auto* sub : subs) {
    sub->add_option("--data", opt.data_path, "Input dataset CSV");
    sub->add_option("--xdim", opt.xdim, "Covariate dimension");
    sub->add_option("--ydim", opt.ydim, "Response dimension");
    sub->add_flag("--header", opt.header, "Input CSV has a header row");
    sub->add_option("--x0", opt.x0_raw,
                    "Query point (comma-separated; repeatable)");
    sub->add_option("--gamma", opt.gamma, "Fixed neighborhood radius");
    sub->add_option("--gamma-rank", opt.gamma_rank,
                    "Rank-adaptive neighborhood radius");
    sub->add_option("--rho", opt.rho, "Fixed ambiguity radius");
    sub->add_option("--rho-factor", opt.rho_factor,
                    "Ambiguity radius as a fraction of gamma");
    sub->add_option("--loss", opt.loss,
                    "Loss: mean, quantile, vecmean2, vecmeaninf");
    sub->add_option("--tau", opt.tau, "Quantile level");
    sub->add_option("--theta", opt.theta, "Response metric scale");
    sub->add_option("--y-lower", opt.y_lower, "Response interval lower bound");
    sub->add_option("--y-upper", opt.y_upper, "Response interval upper bound");
    sub->add_option("--method", opt.method,
                    "Method: drce, knn, nw, ne, robustknn");
    sub->add_option("-k,--k", opt.k, "Neighbor count");
    sub->add_option("--bandwidth", opt.bandwidth, "Kernel bandwidth");
    sub->add_option("--rho-resp", opt.rho_resp,
                    "Response budget for robust k-NN");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--out", opt.out_path, "Output path (or prefix)");
    sub->add_option("--n-samples", opt.n_samples, "Synthetic sample count");
    sub->add_option("--runs", opt.runs, "Experiment run count");
    sub->add_option("--threads", opt.threads, "Worker threads (0 = auto)");
    sub->add_option("--config", opt.config_path,
                    "Flat JSON config; flags override config keys");
  }

  try {
    app.parse(argc, argv);
    auto* active = app.get_subcommands().front();
    if (!opt.config_path.empty()) apply_config(opt.config_path, *active);

    const std::string name = active->get_name();
    if (name == "estimate") return cmd_estimate(opt);
    if (name == "synth") return cmd_synth(opt);
    if (name == "cv") return cmd_cv(opt);
    if (name == "experiment") return cmd_experiment(opt);
    if (name == "check") return cmd_check(opt);
    return 1;
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  } catch (const drce::InputError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
