// Python bindings. Fields cross the boundary as 1-D arrays of length n_grid
// in canonical cell order; ensembles as 2-D arrays with one member per row.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "bofp/covariance.hpp"
#include "bofp/error.hpp"
#include "bofp/gls.hpp"
#include "bofp/laplacian_basis.hpp"
#include "bofp/manifest.hpp"
#include "bofp/metrics.hpp"
#include "bofp/pipeline.hpp"
#include "bofp/synthetic.hpp"
#include "bofp/trends.hpp"
#include "bofp/validation.hpp"

namespace py = pybind11;
using namespace bofp;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ProjectedProblem problem(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam) {
  ProjectedProblem p{y, x, lam};
  p.validate();
  return p;
}

ProjectedRegressionData regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& lam) {
  return ProjectedRegressionData{x, y, lam};
}

ControlEnsemble ensemble(const GridPtr& grid, const RowMatrix& members, const std::string& id) {
  ControlEnsemble e;
  e.model_id = id;
  for (Eigen::Index r = 0; r < members.rows(); ++r) e.fields.emplace_back(grid, members.row(r).transpose());
  return e;
}

PipelineOptions options_from(const py::dict& d) {
  return PipelineOptions::from_json(nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(d))
                                                              .cast<std::string>()));
}

py::dict fit_to_dict(const FitResult& r) {
  py::dict d;
  d["beta_post_mean"] = r.beta_post_mean;
  d["beta_post_sd"] = r.beta_post_sd;
  d["kappa_post"] = r.kappa_post;
  d["converged"] = r.converged;
  d["oscillation_broken"] = r.oscillation_broken;
  d["n_iterations"] = r.n_iterations;
  d["kappa_trace"] = r.kappa_trace;
  d["kappa_log_probs"] = r.kappa_posterior.log_probs;
  d["beta"] = r.samples.beta;
  d["lambdas"] = r.samples.lambdas;
  d["detection_statistic"] = detection_statistic(r);
  d["attribution_statistic"] = attribution_statistic(r);
  d["detected"] = detected(detection_statistic(r));
  d["attributed"] = attributed(r);
  return d;
}

py::dict record_to_dict(const FitRecord& r) {
  py::dict d;
  d["c"] = r.c;
  d["f"] = r.f;
  d["k"] = r.k;
  d["beta_mean"] = r.beta_mean;
  d["beta_sd"] = r.beta_sd;
  d["ci_low"] = r.ci_low;
  d["ci_high"] = r.ci_high;
  d["contains_one"] = r.contains_one;
  d["crps"] = r.crps;
  d["kappa_post"] = r.kappa_post;
  d["converged"] = r.converged;
  d["n_iterations"] = r.n_iterations;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bofp, m) {
  m.doc() = "Bayesian optimal fingerprinting with Laplacian and EOF covariance bases";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init<std::size_t, std::size_t>(), py::arg("n_lat"), py::arg("n_lon"))
      .def_property_readonly("n_lat", &Grid::n_lat)
      .def_property_readonly("n_lon", &Grid::n_lon)
      .def_property_readonly("n_grid", &Grid::n_grid)
      .def("lat_of_row", &Grid::lat_of_row)
      .def("lon_of_col", &Grid::lon_of_col)
      .def("index", &Grid::index)
      .def("__repr__", [](const Grid& g) {
        return "Grid(" + std::to_string(g.n_lat()) + ", " + std::to_string(g.n_lon()) + ")";
      });

  m.def("area_weights", [](const std::shared_ptr<Grid>& g) { return area_weights(*g); }, py::arg("grid"));

  m.def(
      "laplacian_basis",
      [](const std::shared_ptr<Grid>& g, const std::string& kernel) {
        const BasisSet b = compute_laplacian_basis(g, parse_kernel_variant(kernel));
        return py::make_tuple(b.eigenvalues, b.vectors);
      },
      py::arg("grid"), py::arg("kernel") = "half_angle",
      "Returns (eigenvalues, vectors) with one basis vector per column.");

  m.def(
      "principal_components",
      [](const std::shared_ptr<Grid>& g, const RowMatrix& members) {
        const PrincipalComponents pc = principal_components(ensemble(g, members, "control"));
        return py::make_tuple(pc.spectrum.lambdas, pc.basis.vectors);
      },
      py::arg("grid"), py::arg("members"));

  m.def(
      "empirical_variances",
      [](const std::shared_ptr<Grid>& g, const RowMatrix& members, const Eigen::MatrixXd& vectors) {
        BasisSet b;
        b.grid = g;
        b.vectors = vectors;
        return empirical_basis_variances(ensemble(g, members, "control"), b).lambdas;
      },
      py::arg("grid"), py::arg("members"), py::arg("vectors"));

  m.def("gls_beta", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam) {
    return gls_beta(regression(x, y, lam));
  }, py::arg("x_star"), py::arg("y_star"), py::arg("lambdas"));
  m.def("gls_stderr", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam) {
    return gls_stderr(regression(x, y, lam));
  }, py::arg("x_star"), py::arg("y_star"), py::arg("lambdas"));
  m.def("residual_statistic",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam, double beta) {
          return residual_statistic(regression(x, y, lam), beta);
        },
        py::arg("x_star"), py::arg("y_star"), py::arg("lambdas"), py::arg("beta"));

  m.def(
      "sample_posterior",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam_hat, Eigen::Index kappa,
         Eigen::Index M, Eigen::Index burn_in, std::uint64_t seed, double prior_logvar_sd, bool fixed_lambda) {
        RegressionModelSpec spec{problem(x, y, lam_hat), kappa, prior_logvar_sd, fixed_lambda};
        const PosteriorSamples s = sample_posterior(spec, M, burn_in, seed);
        py::dict d;
        d["beta"] = s.beta;
        d["lambdas"] = s.lambdas;
        d["acceptance_rates"] = s.acceptance_rates;
        return d;
      },
      py::arg("x_star"), py::arg("y_star"), py::arg("lambda_hat"), py::arg("kappa"), py::arg("M") = 2000,
      py::arg("burn_in") = 1000, py::arg("seed") = 0, py::arg("prior_logvar_sd") = 1.0,
      py::arg("fixed_lambda") = false);

  m.def(
      "kappa_posterior",
      [](const std::string& likelihood, double beta, const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x,
         const Eigen::VectorXd& y, const Eigen::VectorXd& lam_hat, Eigen::Index kappa_max, const std::string& dof) {
        const KappaPosterior p = kappa_posterior(parse_kappa_likelihood(likelihood), Theta{beta, lambdas},
                                                 problem(x, y, lam_hat), kappa_max, parse_chi_square_dof(dof));
        return py::make_tuple(p.log_probs, p.map());
      },
      py::arg("likelihood"), py::arg("beta"), py::arg("lambdas"), py::arg("x_star"), py::arg("y_star"),
      py::arg("lambda_hat"), py::arg("kappa_max") = 0, py::arg("dof") = "kappa_minus_one",
      "Returns (log_probs for kappa = 2.., MAP kappa).");

  m.def(
      "two_fit",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& lam_hat,
         const std::string& likelihood, Eigen::Index M, Eigen::Index burn_in, std::uint64_t seed) {
        TwoFitOptions o;
        o.likelihood = parse_kappa_likelihood(likelihood);
        o.M = M;
        o.burn_in = burn_in;
        o.seed = seed;
        return fit_to_dict(two_fit(problem(x, y, lam_hat), o));
      },
      py::arg("x_star"), py::arg("y_star"), py::arg("lambda_hat"), py::arg("likelihood") = "chi2",
      py::arg("M") = 2000, py::arg("burn_in") = 1000, py::arg("seed") = 0);

  m.def("ols_trend", [](const std::vector<double>& t, const std::vector<double>& v) { return ols_trend(t, v); },
        py::arg("times"), py::arg("values"), "Least-squares slope, per 25 years.");
  m.def(
      "trend_field",
      [](const std::shared_ptr<Grid>& g, const std::vector<double>& times, const RowMatrix& values) {
        GriddedSeries s;
        s.grid = g;
        s.times = times;
        s.values = values;
        return trend_field(s).values;
      },
      py::arg("grid"), py::arg("times"), py::arg("values"));

  m.def("quantile", [](const std::vector<double>& s, double p) { return quantile(s, p); }, py::arg("samples"),
        py::arg("p"));
  m.def("crps", [](const std::vector<double>& s, double truth) { return crps(s, truth); }, py::arg("samples"),
        py::arg("truth"));
  m.def("detection_statistic", py::overload_cast<double, double>(&detection_statistic), py::arg("beta_mean"),
        py::arg("beta_sd"));
  m.def("attribution_statistic", py::overload_cast<double, double>(&attribution_statistic), py::arg("beta_mean"),
        py::arg("beta_sd"));
  m.attr("DETECTION_THRESHOLD") = kDetectionThreshold;
  m.attr("ATTRIBUTION_THRESHOLD") = kAttributionThreshold;

  m.def(
      "enumerate_tuples",
      [](std::size_t n_controls, const std::vector<std::size_t>& sizes) {
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
        for (const FitTuple& t : enumerate_tuples(n_controls, sizes)) out.emplace_back(t.c, t.f, t.k);
        return out;
      },
      py::arg("n_controls"), py::arg("historical_sizes"));

  m.def(
      "synthetic_validation",
      [](const py::dict& synthetic, const py::dict& options, std::size_t n_lat, std::size_t n_lon, int threads) {
        const nlohmann::json js = nlohmann::json::parse(
            py::str(py::module_::import("json").attr("dumps")(synthetic)).cast<std::string>());
        SyntheticStudySpec spec = synthetic_spec_from_json(js);
        spec.n_lat = n_lat;
        spec.n_lon = n_lon;
        const PipelineOptions o = options_from(options);
        std::vector<FitRecord> records;
        {
          py::gil_scoped_release release;
          const BasisPtr lap = obtain_laplacian_basis(build_grid(n_lat, n_lon), o.kernel);
          const SyntheticStudy study = generate_synthetic_study(spec, lap, o.area_weighting);
          records = run_validation(make_study_config(study.controls, study.historicals, o, lap, threads));
        }
        py::list out;
        for (const FitRecord& r : records) out.append(record_to_dict(r));
        return out;
      },
      py::arg("synthetic") = py::dict(), py::arg("options") = py::dict(), py::arg("n_lat") = 18,
      py::arg("n_lon") = 36, py::arg("threads") = 1,
      "Leave-one-out study on a generated world; returns one dict per (c, f, k) tuple.");
}
