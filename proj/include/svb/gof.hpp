#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "svb/cavi.hpp"
#include "svb/model.hpp"
#include "svb/survival.hpp"

namespace svb {

struct GofReport {
  double elbo = 0.0;          // ell - kl, exactly as computed
  double ell = 0.0;           // Monte Carlo expected log partial likelihood
  double kl = 0.0;            // closed-form KL(Q || Pi)
  double c_index = 0.0;       // at the posterior mean; NaN when undefined
  int mc_samples = 0;
  double mc_std_error = 0.0;  // sample sd of the log-likelihood draws / sqrt(B)
};

/// Monte Carlo ELBO: average partial log-likelihood over B draws from Q
/// minus the closed-form KL.
GofReport estimate_elbo(const SurvivalDataset& data,
                        const VariationalParams& params,
                        const PriorConfig& prior, int B, std::uint64_t seed);

/// Monte Carlo expected log partial likelihood on held-out data; the upper
/// surrogate reported in place of the log-predictive density score.
double expected_log_likelihood(const SurvivalDataset& test_data,
                               const VariationalParams& params, int B,
                               std::uint64_t seed);

/// log of the Monte Carlo averaged likelihood (the score itself rather than
/// its expectation-of-log surrogate).
double log_predictive_density(const SurvivalDataset& test_data,
                              const VariationalParams& params, int B,
                              std::uint64_t seed);

struct GridCell {
  double lambda = 0.0;
  double a0 = 0.0;
  std::vector<GofReport> folds;   // validation reports, one per fold
  double mean_elbo = 0.0;
  double sd_elbo = 0.0;
  double mean_ell = 0.0;
  double mean_kl = 0.0;
  double mean_c_index = 0.0;
};

struct GridSearchResult {
  std::vector<GridCell> cells;    // lambda-major, ascending, deduplicated
  int recommended = 0;            // index of the ELBO-maximizing cell
  int folds = 0;
};

/// Stratified K-fold cross validation over a (lambda, a0) grid. Each cell
/// is fit on the training folds and scored on the held-out fold; the
/// recommended cell maximizes mean validation ELBO. Cells and folds run
/// concurrently on up to `threads` workers (0 = auto) with per-task seeds.
GridSearchResult grid_search(const SurvivalDataset& data, int folds,
                             std::vector<double> lambda_grid,
                             std::vector<double> a0_grid,
                             const PriorConfig& prior_template,
                             const FitOptions& fit_options, int B,
                             std::uint64_t seed, int threads = 0);

/// Status-stratified fold assignment; every fold holds at least one event.
/// Resplits once with a fresh derived seed before giving up.
std::vector<std::vector<int>> stratified_folds(const SurvivalDataset& data,
                                               int folds, std::uint64_t seed);

void write_grid_csv(const std::string& path, const GridSearchResult& result);
std::string grid_summary_to_json(const GridSearchResult& result);
std::string gof_report_to_json(const GofReport& report);

}  // namespace svb
