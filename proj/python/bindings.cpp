#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drce/baselines.hpp"
#include "drce/csv.hpp"
#include "drce/errors.hpp"
#include "drce/experiments.hpp"
#include "drce/locality.hpp"
#include "drce/robust_loss.hpp"
#include "drce/solvers.hpp"

namespace py = pybind11;
using namespace drce;

namespace {

GroundMetric make_metric(const std::string& covariate_norm,
                         const std::string& response_metric, double theta,
                         std::vector<double> weights) {
  GroundMetric metric;
  if (covariate_norm == "l1") {
    metric.covariate_norm = CovariateNorm::One;
  } else if (covariate_norm == "l2") {
    metric.covariate_norm = CovariateNorm::Two;
  } else if (covariate_norm == "linf") {
    metric.covariate_norm = CovariateNorm::Infinity;
  } else {
    throw InputError("covariate norm must be l1, l2, or linf");
  }
  if (response_metric == "abs") {
    metric.response_metric = ResponseMetricKind::ScaledAbsolute;
  } else if (response_metric == "l2") {
    metric.response_metric = ResponseMetricKind::TwoNorm;
  } else if (response_metric == "linf") {
    metric.response_metric = ResponseMetricKind::InfNorm;
  } else {
    throw InputError("response metric must be abs, l2, or linf");
  }
  metric.theta = theta;
  metric.covariate_weights = std::move(weights);
  return metric;
}

Query make_query(std::vector<double> x0, std::optional<double> gamma,
                 std::optional<double> gamma_rank, std::optional<double> rho,
                 std::optional<double> rho_factor) {
  Query query;
  query.x0 = std::move(x0);
  if (gamma && gamma_rank) {
    throw InputError("gamma and gamma_rank are mutually exclusive");
  }
  query.gamma = gamma_rank ? GammaRule::adaptive_rank(*gamma_rank)
                           : GammaRule::fixed(gamma.value_or(0.0));
  if (rho && rho_factor) {
    throw InputError("rho and rho_factor are mutually exclusive");
  }
  query.rho = rho_factor ? RhoRule::proportional(*rho_factor)
                         : RhoRule::fixed(rho.value_or(0.0));
  return query;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributionally robust local conditional estimation";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<InfeasibleRadiusError>(m, "InfeasibleRadiusError",
                                                PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<std::size_t, std::size_t, std::vector<double>,
                    std::vector<double>>(),
           py::arg("xdim"), py::arg("ydim"), py::arg("xs"), py::arg("ys"))
      .def_property_readonly("n", &Dataset::size)
      .def_property_readonly("xdim", &Dataset::covariate_dim)
      .def_property_readonly("ydim", &Dataset::response_dim)
      .def("covariate",
           [](const Dataset& d, std::size_t i) {
             auto row = d.covariate(i);
             return std::vector<double>(row.begin(), row.end());
           })
      .def("response", [](const Dataset& d, std::size_t i) {
        auto row = d.response(i);
        return std::vector<double>(row.begin(), row.end());
      });

  py::class_<GroundMetric>(m, "GroundMetric")
      .def(py::init(&make_metric), py::arg("covariate_norm") = "l2",
           py::arg("response_metric") = "abs", py::arg("theta") = 1.0,
           py::arg("weights") = std::vector<double>{});

  py::class_<LossSpec>(m, "LossSpec")
      .def_static("squared_scalar", &LossSpec::squared_scalar,
                  py::arg("lower") = -std::numeric_limits<double>::infinity(),
                  py::arg("upper") = std::numeric_limits<double>::infinity())
      .def_static("pinball", &LossSpec::pinball, py::arg("tau"),
                  py::arg("lower") = -std::numeric_limits<double>::infinity(),
                  py::arg("upper") = std::numeric_limits<double>::infinity())
      .def_static("squared_vector_2ball", &LossSpec::squared_vector_2ball)
      .def_static("squared_vector_infball", &LossSpec::squared_vector_infball);

  py::class_<LocalScene>(m, "LocalScene")
      .def_readonly("gamma", &LocalScene::gamma)
      .def_readonly("rho", &LocalScene::rho)
      .def_readonly("members", &LocalScene::members)
      .def_readonly("distances", &LocalScene::distances)
      .def_readonly("budgets", &LocalScene::budgets)
      .def_property_readonly("inner_members", &LocalScene::inner_indices)
      .def_property_readonly("ring_members", &LocalScene::ring_indices);

  py::class_<RobustSolution>(m, "RobustSolution")
      .def_readonly("beta", &RobustSolution::beta_star)
      .def_readonly("f", &RobustSolution::f_star)
      .def_readonly("iterations", &RobustSolution::iterations)
      .def_readonly("alpha", &RobustSolution::alpha)
      .def_readonly("scene", &RobustSolution::scene);

  py::class_<WorstCaseEval>(m, "WorstCaseEval")
      .def_readonly("f", &WorstCaseEval::f_value)
      .def_readonly("v", &WorstCaseEval::v_values)
      .def_readonly("alpha", &WorstCaseEval::alpha)
      .def_readonly("attaining_points", &WorstCaseEval::attaining_points);

  m.def("kappa", &kappa, py::arg("distance"), py::arg("gamma"));
  m.def("adaptive_gamma",
        [](std::vector<double> distances, double rank) {
          return adaptive_gamma(distances, rank);
        },
        py::arg("distances"), py::arg("rank"));
  m.def("radius_rule", &radius_rule, py::arg("n_samples"), py::arg("xdim"),
        py::arg("ydim"), py::arg("C"));

  m.def(
      "build_scene",
      [](const Dataset& data, std::vector<double> x0,
         std::optional<double> gamma, std::optional<double> gamma_rank,
         std::optional<double> rho, std::optional<double> rho_factor,
         const GroundMetric& metric) {
        return build_local_scene(
            data, make_query(std::move(x0), gamma, gamma_rank, rho, rho_factor),
            metric);
      },
      py::arg("data"), py::arg("x0"), py::arg("gamma") = std::nullopt,
      py::arg("gamma_rank") = std::nullopt, py::arg("rho") = std::nullopt,
      py::arg("rho_factor") = std::nullopt,
      py::arg("metric") = GroundMetric{});

  m.def(
      "worst_case_loss",
      [](const Dataset& data, const LocalScene& scene,
         const GroundMetric& metric, const LossSpec& loss,
         std::vector<double> beta) {
        return worst_case_loss(data, scene, metric, loss, beta);
      },
      py::arg("data"), py::arg("scene"), py::arg("metric"), py::arg("loss"),
      py::arg("beta"));

  m.def(
      "estimate",
      [](const Dataset& data, std::vector<double> x0,
         std::optional<double> gamma, std::optional<double> gamma_rank,
         std::optional<double> rho, std::optional<double> rho_factor,
         const GroundMetric& metric, const LossSpec& loss) {
        return estimate(
            data, make_query(std::move(x0), gamma, gamma_rank, rho, rho_factor),
            metric, loss);
      },
      py::arg("data"), py::arg("x0"), py::arg("gamma") = std::nullopt,
      py::arg("gamma_rank") = std::nullopt, py::arg("rho") = std::nullopt,
      py::arg("rho_factor") = std::nullopt,
      py::arg("metric") = GroundMetric{},
      py::arg("loss") = LossSpec::squared_scalar());

  m.def(
      "knn_mean",
      [](const Dataset& data, std::vector<double> x0, std::size_t k,
         const GroundMetric& metric) {
        return knn_mean(data, x0, metric, k);
      },
      py::arg("data"), py::arg("x0"), py::arg("k"),
      py::arg("metric") = GroundMetric{});

  m.def(
      "kernel_regress",
      [](const Dataset& data, std::vector<double> x0, const std::string& kernel,
         double h, const GroundMetric& metric) {
        const auto kind = kernel == "gaussian" ? KernelKind::Gaussian
                                               : KernelKind::Epanechnikov;
        if (kernel != "gaussian" && kernel != "epanechnikov") {
          throw InputError("kernel must be gaussian or epanechnikov");
        }
        auto result = kernel_regress(data, x0, metric, kind, h);
        return py::make_tuple(result.value, result.nearest_neighbor_fallback);
      },
      py::arg("data"), py::arg("x0"), py::arg("kernel"), py::arg("h"),
      py::arg("metric") = GroundMetric{});

  m.def(
      "robust_knn",
      [](const Dataset& data, std::vector<double> x0, std::size_t k,
         double rho_resp, const GroundMetric& metric, const LossSpec& loss) {
        return robust_knn(data, x0, metric, loss, k, rho_resp);
      },
      py::arg("data"), py::arg("x0"), py::arg("k"), py::arg("rho_resp"),
      py::arg("metric") = GroundMetric{},
      py::arg("loss") = LossSpec::squared_scalar());

  m.def(
      "generate_synthetic",
      [](std::size_t n, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.n_samples = n;
        spec.seed = seed;
        return generate_synthetic(spec);
      },
      py::arg("n"), py::arg("seed") = 0);

  m.def("type_p_deviation",
        [](std::vector<double> errors, double p) {
          return type_p_deviation(errors, p);
        },
        py::arg("errors"), py::arg("p"));

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("xdim"),
        py::arg("ydim"), py::arg("has_header") = false);
  m.def("write_csv",
        [](const Dataset& data, const std::string& path) {
          write_dataset_csv(data, path);
        },
        py::arg("data"), py::arg("path"));
}
