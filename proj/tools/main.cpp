#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "svb/cavi.hpp"
#include "svb/errors.hpp"
#include "svb/gof.hpp"
#include "svb/mcmc.hpp"
#include "svb/model.hpp"
#include "svb/parallel.hpp"
#include "svb/simulate.hpp"
#include "svb/summaries.hpp"
#include "svb/survival.hpp"

namespace fs = std::filesystem;
using namespace svb;

namespace {

// exit codes: 0 success/converged, 2 usage, 3 data error,
// 4 non-convergence, 5 numeric failure
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitNumeric = 5;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "'");
}

void center_columns(SurvivalDataset& data) {
  for (Eigen::Index j = 0; j < data.p(); ++j)
    data.design.col(j).array() -= data.design.col(j).mean();
}

// drop features whose coefficient of variation falls below the median
void filter_low_cv(SurvivalDataset& data) {
  const Eigen::Index p = data.p();
  Eigen::VectorXd cv(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = data.design.col(j).mean();
    const double var =
        (data.design.col(j).array() - mean).square().sum() / (data.n() - 1);
    cv[j] = std::abs(mean) > 0 ? std::sqrt(var) / std::abs(mean)
                               : std::numeric_limits<double>::infinity();
  }
  std::vector<double> sorted(cv.data(), cv.data() + p);
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[static_cast<std::size_t>(p / 2)];
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < p; ++j)
    if (cv[j] >= median) keep.push_back(static_cast<int>(j));
  if (keep.empty()) throw DataError("coefficient-of-variation filter removed "
                                    "every feature");
  Eigen::MatrixXd filtered(data.n(), static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    filtered.col(static_cast<Eigen::Index>(k)) = data.design.col(keep[k]);
    if (!data.feature_names.empty())
      names.push_back(data.feature_names[static_cast<std::size_t>(keep[k])]);
  }
  data.design = std::move(filtered);
  data.feature_names = std::move(names);
}

struct DataFlags {
  std::string path;
  bool center = false;
  bool filter_cv = false;
};

SurvivalDataset load_data(const DataFlags& flags) {
  SurvivalDataset data = read_survival_csv(flags.path);
  if (flags.filter_cv) filter_low_cv(data);
  if (flags.center) center_columns(data);
  return data;
}

std::vector<std::string> feature_or_default(const SurvivalDataset& data) {
  if (!data.feature_names.empty()) return data.feature_names;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    names.push_back("x" + std::to_string(j + 1));
  return names;
}

std::vector<std::string> names_or_index(const std::vector<std::string>& names,
                                        Eigen::Index p) {
  if (!names.empty()) return names;
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse variational Bayes for proportional hazards models"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- simulate
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Generate survival data with sparse effects");
  SimConfig sim_config;
  std::string sim_setting = "independent";
  std::string sim_out = ".";
  sim_cmd->add_option("--n", sim_config.n, "observations")->required();
  sim_cmd->add_option("--p", sim_config.p, "covariates")->required();
  sim_cmd->add_option("--s", sim_config.s, "nonzero coefficients")->required();
  sim_cmd->add_option("--c", sim_config.censoring, "censoring proportion");
  sim_cmd->add_option("--setting", sim_setting,
                      "design: independent, block, external");
  sim_cmd->add_option("--rho", sim_config.rho, "within-block correlation");
  sim_cmd->add_option("--block-size", sim_config.block_size, "block width");
  sim_cmd->add_option("--design-file", sim_config.design_file,
                      "CSV with design rows for --setting external");
  sim_cmd->add_option("--coef-low", sim_config.coef_low, "smallest magnitude");
  sim_cmd->add_option("--coef-high", sim_config.coef_high, "largest magnitude");
  sim_cmd->add_option("--seed", sim_config.seed, "rng seed");
  sim_cmd->add_option("--out", sim_out, "output directory");

  // --------------------------------------------------------------------- fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit the variational posterior by coordinate ascent");
  DataFlags fit_data;
  PriorConfig fit_prior{1.0, 1.0, 0.0};  // b0 defaults to p
  FitOptions fit_options;
  std::string fit_init = "lasso";
  std::string fit_init_file;
  std::string fit_out = "fit.json";
  bool fit_track_elbo = false;
  int fit_elbo_samples = 1000;
  std::uint64_t fit_seed = 0;
  fit_cmd->add_option("--data", fit_data.path, "data.csv")->required();
  fit_cmd->add_option("--lambda", fit_prior.lambda, "Laplace slab rate");
  fit_cmd->add_option("--a0", fit_prior.a0, "Beta prior shape a0");
  fit_cmd->add_option("--b0", fit_prior.b0, "Beta prior shape b0 (default p)");
  fit_cmd->add_option("--tol", fit_options.tol, "total absolute change stop");
  fit_cmd->add_option("--max-iter", fit_options.max_iter, "sweep cap");
  fit_cmd->add_option("--init", fit_init, "mu start: lasso, ridge, zero, file");
  fit_cmd->add_option("--init-file", fit_init_file, "JSON with {\"mu\": [...]}");
  fit_cmd->add_option("--init-penalty-scale", fit_options.init_penalty_scale,
                      "initializer penalty as a fraction of lambda_max");
  fit_cmd->add_option("--sigma-init", fit_options.sigma_init, "sigma start");
  fit_cmd->add_option("--gamma-init", fit_options.gamma_init, "gamma start");
  fit_cmd->add_option("--brent-tol", fit_options.brent_tol, "1-D solver tol");
  fit_cmd->add_option("--brent-bracket", fit_options.brent_bracket,
                      "mu search half-width");
  fit_cmd->add_flag("--track-elbo", fit_track_elbo,
                    "estimate the ELBO after every sweep");
  fit_cmd->add_option("--elbo-samples", fit_elbo_samples,
                      "Monte Carlo draws per ELBO estimate");
  fit_cmd->add_option("--seed", fit_seed, "rng seed (ELBO tracking)");
  fit_cmd->add_flag("--center", fit_data.center, "subtract column means");
  fit_cmd->add_flag("--filter-cv", fit_data.filter_cv,
                    "drop features below median coefficient of variation");
  fit_cmd->add_option("--out", fit_out, "output path");

  // -------------------------------------------------------------------- mcmc
  auto* mcmc_cmd = app.add_subcommand(
      "mcmc", "Reference Metropolis-within-Gibbs sampler");
  DataFlags mcmc_data;
  PriorConfig mcmc_prior{1.0, 1.0, 0.0};
  McmcConfig mcmc_config;
  int mcmc_chains = 1;
  int mcmc_threads = 0;
  std::string mcmc_out = ".";
  mcmc_cmd->add_option("--data", mcmc_data.path, "data.csv")->required();
  mcmc_cmd->add_option("--lambda", mcmc_prior.lambda, "Laplace slab rate");
  mcmc_cmd->add_option("--a0", mcmc_prior.a0, "Beta prior shape a0");
  mcmc_cmd->add_option("--b0", mcmc_prior.b0, "Beta prior shape b0 (default p)");
  mcmc_cmd->add_option("--iters", mcmc_config.n_iter, "iterations");
  mcmc_cmd->add_option("--burnin", mcmc_config.burn_in, "discarded iterations");
  mcmc_cmd->add_option("--sigma-k", mcmc_config.sigma_k, "kernel scale");
  mcmc_cmd->add_option("--sigma-s", mcmc_config.sigma_s, "spike inflation");
  mcmc_cmd->add_option("--chains", mcmc_chains, "independent chains");
  mcmc_cmd->add_option("--threads", mcmc_threads, "worker bound (0 = auto)");
  mcmc_cmd->add_option("--seed", mcmc_config.seed, "rng seed");
  mcmc_cmd->add_flag("--center", mcmc_data.center, "subtract column means");
  mcmc_cmd->add_flag("--filter-cv", mcmc_data.filter_cv,
                     "drop features below median coefficient of variation");
  mcmc_cmd->add_option("--out", mcmc_out, "output directory");

  // --------------------------------------------------------------------- gof
  auto* gof_cmd = app.add_subcommand(
      "gof", "Goodness of fit: Monte Carlo ELBO, ELL, KL, c-index");
  DataFlags gof_data;
  std::string gof_fit = "fit.json";
  std::string gof_test;
  std::string gof_out = "gof.json";
  int gof_B = 1000;
  bool gof_lpds = false;
  bool gof_tie_credit = false;
  std::uint64_t gof_seed = 0;
  gof_cmd->add_option("--data", gof_data.path, "training data.csv")->required();
  gof_cmd->add_option("--fit", gof_fit, "fit.json");
  gof_cmd->add_option("--test", gof_test, "held-out data.csv");
  gof_cmd->add_option("--B", gof_B, "Monte Carlo draws");
  gof_cmd->add_flag("--lpds", gof_lpds,
                    "also report the log of the averaged likelihood");
  gof_cmd->add_flag("--tie-credit", gof_tie_credit,
                    "score c-index ties as one half");
  gof_cmd->add_option("--seed", gof_seed, "rng seed");
  gof_cmd->add_flag("--center", gof_data.center, "subtract column means");
  gof_cmd->add_flag("--filter-cv", gof_data.filter_cv,
                    "drop features below median coefficient of variation");
  gof_cmd->add_option("--out", gof_out, "output path");

  // ---------------------------------------------------------------------- cv
  auto* cv_cmd = app.add_subcommand(
      "cv", "Cross-validated grid search over lambda and a0");
  DataFlags cv_data;
  PriorConfig cv_prior{1.0, 1.0, 0.0};
  FitOptions cv_options;
  std::vector<double> cv_lambda_grid{1.0};
  std::vector<double> cv_a0_grid{1.0};
  int cv_folds = 10;
  int cv_B = 1000;
  int cv_threads = 0;
  std::uint64_t cv_seed = 0;
  std::string cv_out = ".";
  std::string cv_init = "lasso";
  cv_cmd->add_option("--data", cv_data.path, "data.csv")->required();
  cv_cmd->add_option("--folds", cv_folds, "cross-validation folds");
  cv_cmd->add_option("--lambda-grid", cv_lambda_grid, "lambda values")
      ->delimiter(',');
  cv_cmd->add_option("--a0-grid", cv_a0_grid, "a0 values")->delimiter(',');
  cv_cmd->add_option("--b0", cv_prior.b0, "Beta prior shape b0 (default p)");
  cv_cmd->add_option("--B", cv_B, "Monte Carlo draws per report");
  cv_cmd->add_option("--tol", cv_options.tol, "fit tolerance");
  cv_cmd->add_option("--max-iter", cv_options.max_iter, "fit sweep cap");
  cv_cmd->add_option("--init", cv_init, "mu start: lasso, ridge, zero");
  cv_cmd->add_option("--threads", cv_threads, "worker bound (0 = auto)");
  cv_cmd->add_option("--seed", cv_seed, "rng seed");
  cv_cmd->add_flag("--center", cv_data.center, "subtract column means");
  cv_cmd->add_flag("--filter-cv", cv_data.filter_cv,
                   "drop features below median coefficient of variation");
  cv_cmd->add_option("--out", cv_out, "output directory");

  // ------------------------------------------------------------------ select
  auto* select_cmd = app.add_subcommand(
      "select", "Feature selection controlling the Bayesian FDR");
  std::string select_fit = "fit.json";
  std::string select_out = "selection.json";
  double select_alpha = 0.1;
  bool select_largest = false;
  select_cmd->add_option("--fit", select_fit, "fit.json");
  select_cmd->add_option("--alpha", select_alpha, "BFDR level");
  select_cmd->add_flag("--largest-threshold", select_largest,
                       "use the literal argmax threshold");
  select_cmd->add_option("--out", select_out, "output path");

  // ------------------------------------------------------------ compare-risk
  auto* risk_cmd = app.add_subcommand(
      "compare-risk", "Pairwise high-vs-low risk posterior probabilities");
  DataFlags risk_data;
  std::string risk_fit = "fit.json";
  std::string risk_out = "risk_matrix.csv";
  int risk_B = 10000;
  std::uint64_t risk_seed = 0;
  risk_cmd->add_option("--data", risk_data.path, "data.csv")->required();
  risk_cmd->add_option("--fit", risk_fit, "fit.json");
  risk_cmd->add_option("--B", risk_B, "Monte Carlo draws");
  risk_cmd->add_option("--seed", risk_seed, "rng seed");
  risk_cmd->add_flag("--center", risk_data.center, "subtract column means");
  risk_cmd->add_flag("--filter-cv", risk_data.filter_cv,
                     "drop features below median coefficient of variation");
  risk_cmd->add_option("--out", risk_out, "output path");

  // ---------------------------------------------------------------- evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Score a fit against simulation ground truth");
  std::string eval_fit = "fit.json";
  std::string eval_truth = "truth.json";
  std::string eval_out = "metrics.json";
  double eval_level = 0.95;
  double eval_threshold = 0.95;
  eval_cmd->add_option("--fit", eval_fit, "fit.json");
  eval_cmd->add_option("--truth", eval_truth, "truth.json");
  eval_cmd->add_option("--level", eval_level, "credible level");
  eval_cmd->add_option("--threshold", eval_threshold,
                       "inclusion threshold for set construction");
  eval_cmd->add_option("--out", eval_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(sim_cmd)) {
      sim_config.design = design_kind_from_string(sim_setting);
      const SimResult sim = simulate(sim_config);
      ensure_dir(sim_out);
      write_survival_csv((fs::path(sim_out) / "data.csv").string(), sim.data);
      write_file((fs::path(sim_out) / "truth.json").string(),
                 truth_to_json(sim.truth));
      const double realized =
          1.0 - static_cast<double>(sim.data.n_events()) / sim_config.n;
      std::cout << "n=" << sim_config.n << " p=" << sim_config.p
                << " s=" << sim_config.s << " censored=" << realized << "\n";
      return 0;
    }

    if (app.got_subcommand(fit_cmd)) {
      SurvivalDataset data = load_data(fit_data);
      if (fit_cmd->count("--b0") == 0)
        fit_prior.b0 = static_cast<double>(data.p());
      fit_options.init = init_strategy_from_string(fit_init);
      if (fit_options.init == InitStrategy::file) {
        nlohmann::json doc = nlohmann::json::parse(read_file(fit_init_file));
        if (!doc.contains("mu") || !doc["mu"].is_array())
          throw DataError(fit_init_file + ": missing or non-array field 'mu'");
        fit_options.init_mu.resize(static_cast<Eigen::Index>(doc["mu"].size()));
        for (std::size_t j = 0; j < doc["mu"].size(); ++j)
          fit_options.init_mu[static_cast<Eigen::Index>(j)] =
              doc["mu"][j].get<double>();
      }
      ElboHook hook;
      if (fit_track_elbo) {
        const std::uint64_t elbo_seed = derive_seed(fit_seed, 0x656c626fULL);
        hook = [&, elbo_seed](const VariationalParams& params) {
          return estimate_elbo(data, params, fit_prior, fit_elbo_samples,
                               elbo_seed)
              .elbo;
        };
      }
      const FitResult result = fit(data, fit_prior, fit_options, hook);
      write_file(fit_out, fit_result_to_json(result, fit_prior,
                                             feature_or_default(data)));
      std::cout << (result.converged ? "converged" : "max-iter stop")
                << " after " << result.iterations << " sweeps\n";
      return result.converged ? 0 : kExitNoConvergence;
    }

    if (app.got_subcommand(mcmc_cmd)) {
      SurvivalDataset data = load_data(mcmc_data);
      if (mcmc_cmd->count("--b0") == 0)
        mcmc_prior.b0 = static_cast<double>(data.p());
      ensure_dir(mcmc_out);
      std::vector<McmcSamples> chains(static_cast<std::size_t>(mcmc_chains));
      parallel_for(mcmc_chains, mcmc_threads, [&](int k) {
        McmcConfig config = mcmc_config;
        config.seed = derive_seed(mcmc_config.seed, 0x636861696eULL,
                                  static_cast<std::uint64_t>(k));
        chains[static_cast<std::size_t>(k)] = run_chain(data, mcmc_prior,
                                                        config);
      });
      for (int k = 0; k < mcmc_chains; ++k) {
        const std::string name =
            mcmc_chains == 1 ? "samples.csv"
                             : "samples_chain" + std::to_string(k) + ".csv";
        write_samples_csv((fs::path(mcmc_out) / name).string(),
                          chains[static_cast<std::size_t>(k)]);
      }
      // pool chains for the summary
      McmcSamples pooled = std::move(chains[0]);
      for (int k = 1; k < mcmc_chains; ++k) {
        const auto& c = chains[static_cast<std::size_t>(k)];
        const Eigen::Index before = pooled.beta.rows();
        pooled.beta.conservativeResize(before + c.beta.rows(), Eigen::NoChange);
        pooled.z.conservativeResize(before + c.z.rows(), Eigen::NoChange);
        pooled.w.conservativeResize(before + c.w.rows(), Eigen::NoChange);
        pooled.beta.bottomRows(c.beta.rows()) = c.beta;
        pooled.z.bottomRows(c.z.rows()) = c.z;
        pooled.w.bottomRows(c.w.rows()) = c.w;
      }
      const McmcSummary summary = mcmc_summaries(pooled);
      write_file((fs::path(mcmc_out) / "mcmc.json").string(),
                 mcmc_summary_to_json(summary));
      std::cout << "stored " << pooled.n_samples() << " draws from "
                << mcmc_chains << " chain(s)\n";
      return 0;
    }

    if (app.got_subcommand(gof_cmd)) {
      SurvivalDataset data = load_data(gof_data);
      VariationalParams params;
      PriorConfig prior;
      std::vector<std::string> names;
      const FitResult loaded =
          fit_result_from_json(read_file(gof_fit), prior, &names);
      params = loaded.params;
      if (params.p() != data.p())
        throw DataError("fit has " + std::to_string(params.p()) +
                        " features but data has " + std::to_string(data.p()));
      GofReport report = estimate_elbo(data, params, prior, gof_B,
                                       derive_seed(gof_seed, 0x676f66ULL));
      nlohmann::json doc = nlohmann::json::parse(gof_report_to_json(report));
      if (gof_tie_credit) {
        const auto ci = c_index(
            data, prognostic_index(data, posterior_mean(params)), true);
        doc["c_index"] = ci ? nlohmann::json(*ci) : nlohmann::json(nullptr);
      }
      if (!gof_test.empty()) {
        DataFlags test_flags = gof_data;
        test_flags.path = gof_test;
        const SurvivalDataset test = load_data(test_flags);
        doc["test_ell"] = expected_log_likelihood(
            test, params, gof_B, derive_seed(gof_seed, 0x74657374ULL));
        if (gof_lpds)
          doc["test_lpds"] = log_predictive_density(
              test, params, gof_B, derive_seed(gof_seed, 0x74657374ULL));
      }
      if (gof_lpds)
        doc["lpds"] = log_predictive_density(
            data, params, gof_B, derive_seed(gof_seed, 0x676f66ULL));
      write_file(gof_out, doc.dump(2) + "\n");
      std::cout << "elbo=" << report.elbo << " ell=" << report.ell
                << " kl=" << report.kl << "\n";
      return 0;
    }

    if (app.got_subcommand(cv_cmd)) {
      SurvivalDataset data = load_data(cv_data);
      if (cv_cmd->count("--b0") == 0)
        cv_prior.b0 = static_cast<double>(data.p());
      cv_options.init = init_strategy_from_string(cv_init);
      const GridSearchResult result =
          grid_search(data, cv_folds, cv_lambda_grid, cv_a0_grid, cv_prior,
                      cv_options, cv_B, cv_seed, cv_threads);
      ensure_dir(cv_out);
      write_grid_csv((fs::path(cv_out) / "cv.csv").string(), result);
      write_file((fs::path(cv_out) / "cv_summary.json").string(),
                 grid_summary_to_json(result));
      const auto& best =
          result.cells[static_cast<std::size_t>(result.recommended)];
      std::cout << "recommended lambda=" << best.lambda << " a0=" << best.a0
                << " (mean validation elbo " << best.mean_elbo << ")\n";
      return 0;
    }

    if (app.got_subcommand(select_cmd)) {
      PriorConfig prior;
      std::vector<std::string> names;
      const FitResult loaded =
          fit_result_from_json(read_file(select_fit), prior, &names);
      const BfdrSelection sel =
          bfdr_threshold(loaded.params.gamma, select_alpha, select_largest);
      const auto feature_names = names_or_index(names, loaded.params.p());
      nlohmann::json doc;
      doc["k_star"] = sel.k_star;
      doc["alpha"] = select_alpha;
      doc["bfdr"] = sel.bfdr;
      nlohmann::json selected = nlohmann::json::array();
      for (int j : sel.selected)
        selected.push_back(feature_names[static_cast<std::size_t>(j)]);
      doc["selected"] = selected;
      write_file(select_out, doc.dump(2) + "\n");
      std::cout << "k*=" << sel.k_star << ", " << sel.selected.size()
                << " features selected\n";
      return 0;
    }

    if (app.got_subcommand(risk_cmd)) {
      SurvivalDataset data = load_data(risk_data);
      PriorConfig prior;
      const FitResult loaded =
          fit_result_from_json(read_file(risk_fit), prior);
      if (loaded.params.p() != data.p())
        throw DataError("fit and data feature counts disagree");
      const auto [low, high] = median_risk_split(data, loaded.beta_hat);
      if (low.empty() || high.empty())
        throw DataError("median split left one risk group empty");
      const RiskMatrix matrix =
          risk_matrix(loaded.params, data, high, low, risk_B,
                      derive_seed(risk_seed, 0x7269736bULL));
      std::ofstream out(risk_out);
      if (!out) throw DataError("cannot write '" + risk_out + "'");
      out << "high_id\\low_id";
      for (int id : matrix.low_ids) out << ',' << id;
      out << '\n';
      for (Eigen::Index a = 0; a < matrix.prob.rows(); ++a) {
        out << matrix.high_ids[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < matrix.prob.cols(); ++b)
          out << ',' << matrix.prob(a, b);
        out << '\n';
      }
      std::cout << matrix.prob.rows() << "x" << matrix.prob.cols()
                << " risk matrix written\n";
      return 0;
    }

    if (app.got_subcommand(eval_cmd)) {
      PriorConfig prior;
      const FitResult loaded =
          fit_result_from_json(read_file(eval_fit), prior);
      const GroundTruth truth = truth_from_json(read_file(eval_truth));
      if (truth.beta0.size() != loaded.params.p())
        throw DataError("truth and fit dimensions disagree");
      const auto sets = credible_sets(loaded.params, eval_level, eval_threshold);
      const MetricsReport metrics =
          evaluate(loaded.beta_hat, loaded.params.gamma, sets, truth);
      write_file(eval_out, metrics_to_json(metrics));
      std::cout << "l2=" << metrics.l2 << " tpr=" << metrics.tpr
                << " fdr=" << metrics.fdr << "\n";
      return 0;
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
