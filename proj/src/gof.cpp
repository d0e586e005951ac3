#include "svb/gof.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

#include "svb/errors.hpp"
#include "svb/parallel.hpp"

namespace svb {

namespace {

// mean and sample standard error of the log-likelihood draws
struct McMoments {
  double mean = 0.0;
  double std_error = 0.0;
};

McMoments loglik_draws(const SurvivalDataset& data, const RiskIndex& index,
                       const VariationalParams& params, int B, Rng& rng) {
  std::vector<double> draws(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    const Eigen::VectorXd beta = sample_from_q(params, rng);
    draws[static_cast<std::size_t>(b)] =
        partial_log_likelihood(data, index, data.design * beta);
  }
  McMoments out;
  out.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / B;
  if (B > 1) {
    double ss = 0.0;
    for (double d : draws) ss += (d - out.mean) * (d - out.mean);
    out.std_error = std::sqrt(ss / (B - 1)) / std::sqrt(static_cast<double>(B));
  }
  return out;
}

}  // namespace

GofReport estimate_elbo(const SurvivalDataset& data,
                        const VariationalParams& params,
                        const PriorConfig& prior, int B, std::uint64_t seed) {
  if (B < 1) throw DataError("estimate_elbo: B must be at least 1");
  params.validate();
  prior.validate();
  const RiskIndex index = build_risk_index(data);
  Rng rng = make_rng(seed);

  GofReport report;
  const McMoments mc = loglik_draws(data, index, params, B, rng);
  report.ell = mc.mean;
  report.mc_std_error = mc.std_error;
  report.mc_samples = B;
  report.kl = kl_q_prior(params, prior);
  report.elbo = report.ell - report.kl;
  const auto ci = c_index(data, prognostic_index(data, posterior_mean(params)));
  report.c_index = ci ? *ci : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double expected_log_likelihood(const SurvivalDataset& test_data,
                               const VariationalParams& params, int B,
                               std::uint64_t seed) {
  if (B < 1) throw DataError("expected_log_likelihood: B must be at least 1");
  params.validate();
  const RiskIndex index = build_risk_index(test_data);  // rejects event-free folds
  Rng rng = make_rng(seed);
  return loglik_draws(test_data, index, params, B, rng).mean;
}

double log_predictive_density(const SurvivalDataset& test_data,
                              const VariationalParams& params, int B,
                              std::uint64_t seed) {
  if (B < 1) throw DataError("log_predictive_density: B must be at least 1");
  params.validate();
  const RiskIndex index = build_risk_index(test_data);
  Rng rng = make_rng(seed);
  LogSumExp acc;
  for (int b = 0; b < B; ++b) {
    const Eigen::VectorXd beta = sample_from_q(params, rng);
    acc.add(partial_log_likelihood(test_data, index, test_data.design * beta));
  }
  return acc.value() - std::log(static_cast<double>(B));
}

namespace {

std::vector<std::vector<int>> deal_folds(const SurvivalDataset& data,
                                         int folds, Rng& rng) {
  std::vector<int> events, censored;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    (data.status[i] == 1 ? events : censored).push_back(static_cast<int>(i));
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  int k = 0;
  for (int i : events) out[static_cast<std::size_t>(k++ % folds)].push_back(i);
  for (int i : censored) out[static_cast<std::size_t>(k++ % folds)].push_back(i);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

bool folds_valid(const SurvivalDataset& data,
                 const std::vector<std::vector<int>>& folds) {
  for (const auto& f : folds) {
    if (f.empty()) return false;
    int events = 0;
    for (int i : f) events += data.status[i];
    if (events == 0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> stratified_folds(const SurvivalDataset& data,
                                               int folds, std::uint64_t seed) {
  if (folds < 2) throw DataError("cross validation requires at least 2 folds");
  if (folds > data.n()) throw DataError("more folds than observations");
  Rng rng = make_stream(seed, 0x666f6c64ULL);
  auto assignment = deal_folds(data, folds, rng);
  if (folds_valid(data, assignment)) return assignment;
  // one resplit with a fresh stream before giving up
  Rng retry = make_stream(seed, 0x666f6c64ULL, 1);
  assignment = deal_folds(data, folds, retry);
  if (folds_valid(data, assignment)) return assignment;
  throw DataError("could not build folds with at least one event each; too "
                  "few events for " + std::to_string(folds) + " folds");
}

GridSearchResult grid_search(const SurvivalDataset& data, int folds,
                             std::vector<double> lambda_grid,
                             std::vector<double> a0_grid,
                             const PriorConfig& prior_template,
                             const FitOptions& fit_options, int B,
                             std::uint64_t seed, int threads) {
  if (lambda_grid.empty() || a0_grid.empty())
    throw DataError("grid_search: grids must be nonempty");
  if (B < 1) throw DataError("grid_search: B must be at least 1");
  auto dedupe = [](std::vector<double>& g) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  };
  dedupe(lambda_grid);
  dedupe(a0_grid);

  const auto fold_sets = stratified_folds(data, folds, seed);
  std::vector<std::vector<int>> train_sets(fold_sets.size());
  for (std::size_t f = 0; f < fold_sets.size(); ++f) {
    for (std::size_t g = 0; g < fold_sets.size(); ++g)
      if (g != f)
        train_sets[f].insert(train_sets[f].end(), fold_sets[g].begin(),
                             fold_sets[g].end());
    std::sort(train_sets[f].begin(), train_sets[f].end());
  }

  GridSearchResult result;
  result.folds = folds;
  for (double lambda : lambda_grid) {
    for (double a0 : a0_grid) {
      GridCell cell;
      cell.lambda = lambda;
      cell.a0 = a0;
      cell.folds.resize(static_cast<std::size_t>(folds));
      result.cells.push_back(std::move(cell));
    }
  }

  const int n_tasks = static_cast<int>(result.cells.size()) * folds;
  parallel_for(n_tasks, threads, [&](int task) {
    const int cell_idx = task / folds;
    const int fold_idx = task % folds;
    GridCell& cell = result.cells[static_cast<std::size_t>(cell_idx)];

    PriorConfig prior = prior_template;
    prior.lambda = cell.lambda;
    prior.a0 = cell.a0;

    const SurvivalDataset train =
        data.subset(train_sets[static_cast<std::size_t>(fold_idx)]);
    const SurvivalDataset validation =
        data.subset(fold_sets[static_cast<std::size_t>(fold_idx)]);

    const FitResult fitted = fit(train, prior, fit_options);

    const std::uint64_t task_seed =
        derive_seed(seed, static_cast<std::uint64_t>(cell_idx) + 1,
                    static_cast<std::uint64_t>(fold_idx) + 1);
    GofReport report;
    report.mc_samples = B;
    const RiskIndex vidx = build_risk_index(validation);
    Rng rng = make_rng(task_seed);
    double sum = 0.0, sumsq = 0.0;
    for (int b = 0; b < B; ++b) {
      const Eigen::VectorXd beta = sample_from_q(fitted.params, rng);
      const double ll = partial_log_likelihood(validation, vidx,
                                               validation.design * beta);
      sum += ll;
      sumsq += ll * ll;
    }
    report.ell = sum / B;
    if (B > 1)
      report.mc_std_error = std::sqrt(
          std::max(0.0, (sumsq - sum * sum / B) / (B - 1)) / B);
    report.kl = kl_q_prior(fitted.params, prior);
    report.elbo = report.ell - report.kl;
    const auto ci = c_index(
        validation, prognostic_index(validation, posterior_mean(fitted.params)));
    report.c_index = ci ? *ci : std::numeric_limits<double>::quiet_NaN();
    cell.folds[static_cast<std::size_t>(fold_idx)] = report;
  });

  for (auto& cell : result.cells) {
    double sum = 0.0, sumsq = 0.0, ell = 0.0, kl = 0.0, ci = 0.0;
    for (const auto& r : cell.folds) {
      sum += r.elbo;
      sumsq += r.elbo * r.elbo;
      ell += r.ell;
      kl += r.kl;
      ci += r.c_index;
    }
    const double k = static_cast<double>(cell.folds.size());
    cell.mean_elbo = sum / k;
    cell.sd_elbo = k > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / k) /
                                                       (k - 1)))
                         : 0.0;
    cell.mean_ell = ell / k;
    cell.mean_kl = kl / k;
    cell.mean_c_index = ci / k;
  }
  result.recommended = 0;
  for (std::size_t c = 1; c < result.cells.size(); ++c)
    if (result.cells[c].mean_elbo >
        result.cells[static_cast<std::size_t>(result.recommended)].mean_elbo)
      result.recommended = static_cast<int>(c);
  return result;
}

void write_grid_csv(const std::string& path, const GridSearchResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "lambda,a0,fold,elbo,ell,kl,c_index\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& cell : result.cells) {
    for (std::size_t f = 0; f < cell.folds.size(); ++f) {
      const auto& r = cell.folds[f];
      put(cell.lambda); out << ',';
      put(cell.a0); out << ',' << f << ',';
      put(r.elbo); out << ',';
      put(r.ell); out << ',';
      put(r.kl); out << ',';
      put(r.c_index); out << '\n';
    }
  }
}

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string grid_summary_to_json(const GridSearchResult& result) {
  nlohmann::json doc;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    nlohmann::json c;
    c["lambda"] = cell.lambda;
    c["a0"] = cell.a0;
    c["mean_elbo"] = cell.mean_elbo;
    c["sd_elbo"] = cell.sd_elbo;
    c["mean_ell"] = cell.mean_ell;
    c["mean_kl"] = cell.mean_kl;
    c["mean_c_index"] = number_or_null(cell.mean_c_index);
    cells.push_back(c);
  }
  doc["cells"] = cells;
  doc["folds"] = result.folds;
  const auto& best = result.cells[static_cast<std::size_t>(result.recommended)];
  doc["recommended"] = {{"lambda", best.lambda},
                        {"a0", best.a0},
                        {"mean_elbo", best.mean_elbo}};
  return doc.dump(2) + "\n";
}

std::string gof_report_to_json(const GofReport& report) {
  nlohmann::json doc;
  doc["elbo"] = report.elbo;
  doc["ell"] = report.ell;
  doc["kl"] = report.kl;
  doc["c_index"] = number_or_null(report.c_index);
  doc["mc_samples"] = report.mc_samples;
  doc["mc_std_error"] = report.mc_std_error;
  return doc.dump(2) + "\n";
}

}  // namespace svb
