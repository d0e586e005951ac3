#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svb/cavi.hpp"
#include "svb/errors.hpp"
#include "svb/gof.hpp"
#include "svb/mcmc.hpp"
#include "svb/model.hpp"
#include "svb/simulate.hpp"
#include "svb/summaries.hpp"
#include "svb/survival.hpp"

namespace py = pybind11;
using namespace svb;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse variational Bayes for high-dimensional proportional "
            "hazards models";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  // ------------------------------------------------------------- survival
  py::class_<SurvivalDataset>(m, "SurvivalDataset")
      .def(py::init([](Eigen::VectorXd times, Eigen::VectorXi status,
                       Eigen::MatrixXd design,
                       std::vector<std::string> feature_names) {
             SurvivalDataset data{std::move(times), std::move(status),
                                  std::move(design), std::move(feature_names)};
             data.validate();
             return data;
           }),
           py::arg("times"), py::arg("status"), py::arg("design"),
           py::arg("feature_names") = std::vector<std::string>{})
      .def_readonly("times", &SurvivalDataset::times)
      .def_readonly("status", &SurvivalDataset::status)
      .def_readonly("design", &SurvivalDataset::design)
      .def_readonly("feature_names", &SurvivalDataset::feature_names)
      .def_property_readonly("n", &SurvivalDataset::n)
      .def_property_readonly("p", &SurvivalDataset::p)
      .def("n_events", &SurvivalDataset::n_events)
      .def("subset", &SurvivalDataset::subset, py::arg("rows"));

  m.def("read_survival_csv", &read_survival_csv, py::arg("path"));
  m.def("write_survival_csv", &write_survival_csv, py::arg("path"),
        py::arg("data"));

  m.def(
      "partial_log_likelihood",
      [](const SurvivalDataset& data, const Eigen::VectorXd& beta) {
        return partial_log_likelihood_beta(data, build_risk_index(data), beta);
      },
      py::arg("data"), py::arg("beta"),
      "Cox partial log-likelihood with Breslow tie handling");
  m.def("prognostic_index", &prognostic_index, py::arg("data"),
        py::arg("beta"));
  m.def("c_index", &c_index, py::arg("data"), py::arg("eta"),
        py::arg("tie_credit") = false,
        "Concordance estimator; None when no pair is comparable");

  // ---------------------------------------------------------------- model
  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init([](double lambda, double a0, double b0) {
             PriorConfig prior{lambda, a0, b0};
             prior.validate();
             return prior;
           }),
           py::arg("lam") = 1.0, py::arg("a0") = 1.0, py::arg("b0") = 1.0)
      .def_readwrite("lam", &PriorConfig::lambda)
      .def_readwrite("a0", &PriorConfig::a0)
      .def_readwrite("b0", &PriorConfig::b0)
      .def_property_readonly("w_bar", &PriorConfig::w_bar);

  py::class_<VariationalParams>(m, "VariationalParams")
      .def(py::init([](Eigen::VectorXd mu, Eigen::VectorXd sigma,
                       Eigen::VectorXd gamma) {
             VariationalParams params{std::move(mu), std::move(sigma),
                                      std::move(gamma)};
             params.validate();
             return params;
           }),
           py::arg("mu"), py::arg("sigma"), py::arg("gamma"))
      .def_readonly("mu", &VariationalParams::mu)
      .def_readonly("sigma", &VariationalParams::sigma)
      .def_readonly("gamma", &VariationalParams::gamma)
      .def_property_readonly("p", &VariationalParams::p);

  m.def("folded_normal_mean", &folded_normal_mean, py::arg("mu"),
        py::arg("sigma"));
  m.def("kl_q_prior", &kl_q_prior, py::arg("params"), py::arg("prior"));
  m.def(
      "sample_from_q",
      [](const VariationalParams& params, std::uint64_t seed) {
        return sample_from_q(params, seed);
      },
      py::arg("params"), py::arg("seed"));
  m.def("posterior_mean", &posterior_mean, py::arg("params"));

  // ----------------------------------------------------------------- cavi
  py::enum_<InitStrategy>(m, "InitStrategy")
      .value("lasso", InitStrategy::lasso)
      .value("ridge", InitStrategy::ridge)
      .value("zero", InitStrategy::zero)
      .value("file", InitStrategy::file);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("tol", &FitOptions::tol)
      .def_readwrite("max_iter", &FitOptions::max_iter)
      .def_readwrite("init", &FitOptions::init)
      .def_readwrite("init_mu", &FitOptions::init_mu)
      .def_readwrite("sigma_init", &FitOptions::sigma_init)
      .def_readwrite("gamma_init", &FitOptions::gamma_init)
      .def_readwrite("brent_tol", &FitOptions::brent_tol)
      .def_readwrite("brent_bracket", &FitOptions::brent_bracket)
      .def_readwrite("init_penalty_scale", &FitOptions::init_penalty_scale);

  py::class_<TraceEntry>(m, "TraceEntry")
      .def_readonly("iter", &TraceEntry::iter)
      .def_readonly("delta", &TraceEntry::delta)
      .def_readonly("elbo", &TraceEntry::elbo);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("beta_hat", &FitResult::beta_hat)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("trace", &FitResult::trace);

  m.def(
      "fit",
      [](const SurvivalDataset& data, const PriorConfig& prior,
         const FitOptions& options, const py::object& elbo_hook) {
        ElboHook hook;
        if (!elbo_hook.is_none())
          hook = [elbo_hook](const VariationalParams& params) {
            return elbo_hook(params).cast<double>();
          };
        return fit(data, prior, options, hook);
      },
      py::arg("data"), py::arg("prior") = PriorConfig{},
      py::arg("options") = FitOptions{}, py::arg("elbo_hook") = py::none(),
      "Coordinate-ascent variational fit");
  m.def("initialize", &initialize, py::arg("data"), py::arg("options"),
        py::arg("prior"));

  // ------------------------------------------------------------------ gof
  py::class_<GofReport>(m, "GofReport")
      .def_readonly("elbo", &GofReport::elbo)
      .def_readonly("ell", &GofReport::ell)
      .def_readonly("kl", &GofReport::kl)
      .def_readonly("c_index", &GofReport::c_index)
      .def_readonly("mc_samples", &GofReport::mc_samples)
      .def_readonly("mc_std_error", &GofReport::mc_std_error);

  m.def("estimate_elbo", &estimate_elbo, py::arg("data"), py::arg("params"),
        py::arg("prior"), py::arg("B") = 1000, py::arg("seed") = 0);
  m.def("expected_log_likelihood", &expected_log_likelihood,
        py::arg("test_data"), py::arg("params"), py::arg("B") = 1000,
        py::arg("seed") = 0);
  m.def("log_predictive_density", &log_predictive_density,
        py::arg("test_data"), py::arg("params"), py::arg("B") = 1000,
        py::arg("seed") = 0);

  py::class_<GridCell>(m, "GridCell")
      .def_readonly("lam", &GridCell::lambda)
      .def_readonly("a0", &GridCell::a0)
      .def_readonly("folds", &GridCell::folds)
      .def_readonly("mean_elbo", &GridCell::mean_elbo)
      .def_readonly("sd_elbo", &GridCell::sd_elbo)
      .def_readonly("mean_ell", &GridCell::mean_ell)
      .def_readonly("mean_kl", &GridCell::mean_kl)
      .def_readonly("mean_c_index", &GridCell::mean_c_index);

  py::class_<GridSearchResult>(m, "GridSearchResult")
      .def_readonly("cells", &GridSearchResult::cells)
      .def_readonly("recommended", &GridSearchResult::recommended)
      .def_readonly("folds", &GridSearchResult::folds);

  m.def("grid_search", &grid_search, py::arg("data"), py::arg("folds"),
        py::arg("lambda_grid"), py::arg("a0_grid"), py::arg("prior_template"),
        py::arg("fit_options") = FitOptions{}, py::arg("B") = 1000,
        py::arg("seed") = 0, py::arg("threads") = 0);

  // ----------------------------------------------------------------- mcmc
  py::class_<McmcConfig>(m, "McmcConfig")
      .def(py::init<>())
      .def_readwrite("n_iter", &McmcConfig::n_iter)
      .def_readwrite("burn_in", &McmcConfig::burn_in)
      .def_readwrite("sigma_k", &McmcConfig::sigma_k)
      .def_readwrite("sigma_s", &McmcConfig::sigma_s)
      .def_readwrite("seed", &McmcConfig::seed);

  py::class_<McmcSamples>(m, "McmcSamples")
      .def_readonly("beta", &McmcSamples::beta)
      .def_readonly("z", &McmcSamples::z)
      .def_readonly("w", &McmcSamples::w)
      .def_readonly("acceptance_rate", &McmcSamples::acceptance_rate);

  py::class_<McmcSummary>(m, "McmcSummary")
      .def_readonly("beta_hat", &McmcSummary::beta_hat)
      .def_readonly("inclusion", &McmcSummary::inclusion)
      .def_readonly("sets", &McmcSummary::sets);

  m.def("run_chain", &run_chain, py::arg("data"), py::arg("prior"),
        py::arg("config"),
        "Metropolis-within-Gibbs reference sampler");
  m.def("mcmc_summaries", &mcmc_summaries, py::arg("samples"),
        py::arg("level") = 0.95, py::arg("threshold") = 0.95);

  // ------------------------------------------------------------ summaries
  py::enum_<CredibleSetKind>(m, "CredibleSetKind")
      .value("interval", CredibleSetKind::interval)
      .value("zero_atom", CredibleSetKind::zero_atom)
      .value("interval_plus_zero", CredibleSetKind::interval_plus_zero);

  py::class_<CredibleSet>(m, "CredibleSet")
      .def_readonly("kind", &CredibleSet::kind)
      .def_readonly("lower", &CredibleSet::lower)
      .def_readonly("upper", &CredibleSet::upper)
      .def_readonly("level", &CredibleSet::level)
      .def("contains", &CredibleSet::contains, py::arg("x"))
      .def("size", &CredibleSet::size);

  m.def("credible_sets", &credible_sets, py::arg("params"),
        py::arg("level") = 0.95, py::arg("threshold") = 0.95);

  py::class_<BfdrSelection>(m, "BfdrSelection")
      .def_readonly("k_star", &BfdrSelection::k_star)
      .def_readonly("selected", &BfdrSelection::selected)
      .def_readonly("bfdr", &BfdrSelection::bfdr);

  m.def("bfdr_threshold", &bfdr_threshold, py::arg("gamma"), py::arg("alpha"),
        py::arg("largest") = false);

  py::class_<RiskComparison>(m, "RiskComparison")
      .def_readonly("prob", &RiskComparison::prob)
      .def_readonly("std_error", &RiskComparison::std_error);

  m.def("risk_comparison", &risk_comparison, py::arg("params"), py::arg("x_i"),
        py::arg("x_j"), py::arg("B") = 10000, py::arg("seed") = 0);

  py::class_<RiskMatrix>(m, "RiskMatrix")
      .def_readonly("prob", &RiskMatrix::prob)
      .def_readonly("high_ids", &RiskMatrix::high_ids)
      .def_readonly("low_ids", &RiskMatrix::low_ids);

  m.def("risk_matrix", &risk_matrix, py::arg("params"), py::arg("data"),
        py::arg("group_high"), py::arg("group_low"), py::arg("B") = 10000,
        py::arg("seed") = 0);
  m.def("median_risk_split", &median_risk_split, py::arg("data"),
        py::arg("beta_hat"));

  // ------------------------------------------------------------- simulate
  py::enum_<DesignKind>(m, "DesignKind")
      .value("independent", DesignKind::independent)
      .value("block", DesignKind::block)
      .value("external", DesignKind::external);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimConfig::n)
      .def_readwrite("p", &SimConfig::p)
      .def_readwrite("s", &SimConfig::s)
      .def_readwrite("censoring", &SimConfig::censoring)
      .def_readwrite("design", &SimConfig::design)
      .def_readwrite("rho", &SimConfig::rho)
      .def_readwrite("block_size", &SimConfig::block_size)
      .def_readwrite("design_file", &SimConfig::design_file)
      .def_readwrite("coef_low", &SimConfig::coef_low)
      .def_readwrite("coef_high", &SimConfig::coef_high)
      .def_readwrite("seed", &SimConfig::seed);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("beta0", &GroundTruth::beta0)
      .def_readonly("support", &GroundTruth::support);

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("data", &SimResult::data)
      .def_readonly("truth", &SimResult::truth);

  m.def("simulate", &simulate, py::arg("config"),
        "Draw coefficients, design and censored survival times");

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("l2", &MetricsReport::l2)
      .def_readonly("l1", &MetricsReport::l1)
      .def_readonly("tpr", &MetricsReport::tpr)
      .def_readonly("fdr", &MetricsReport::fdr)
      .def_readonly("auc", &MetricsReport::auc)
      .def_readonly("selected", &MetricsReport::selected)
      .def_readonly("coverage_zero", &MetricsReport::coverage_zero)
      .def_readonly("coverage_nonzero", &MetricsReport::coverage_nonzero)
      .def_readonly("size_zero", &MetricsReport::size_zero)
      .def_readonly("size_nonzero", &MetricsReport::size_nonzero);

  m.def("evaluate", &evaluate, py::arg("beta_hat"), py::arg("inclusion"),
        py::arg("sets"), py::arg("truth"));

#ifdef SVB_VERSION
  m.attr("__version__") = SVB_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
