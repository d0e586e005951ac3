#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svb/model.hpp"
#include "svb/survival.hpp"

namespace svb {

enum class InitStrategy { lasso, ridge, zero, file };

InitStrategy init_strategy_from_string(const std::string& name);
std::string to_string(InitStrategy s);

struct FitOptions {
  double tol = 1e-3;          // total absolute parameter change threshold
  int max_iter = 1000;
  InitStrategy init = InitStrategy::lasso;
  Eigen::VectorXd init_mu;    // used by InitStrategy::file
  double sigma_init = 0.05;
  double gamma_init = 0.5;
  double brent_tol = 1e-6;
  double brent_bracket = 5.0;      // half-width of the mu search interval
  double init_penalty_scale = 0.01;  // initializer penalty = scale * lambda_max

  void validate() const;
};

struct TraceEntry {
  int iter = 0;
  double delta = 0.0;               // total absolute parameter change
  std::optional<double> elbo;
};

struct FitResult {
  VariationalParams params;
  Eigen::VectorXd beta_hat;         // posterior mean gamma_j * mu_j
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

/// Per-observation log products sum_k log(gamma_k M(x_rk) + 1 - gamma_k),
/// maintained incrementally under single-coordinate updates. Holds the
/// per-coordinate factors so dividing one out is exact; callers rebuild
/// once per sweep to bound floating-point drift.
class SlabWeightCache {
 public:
  SlabWeightCache(const Eigen::MatrixXd& design,
                  const VariationalParams& params);

  void rebuild(const Eigen::MatrixXd& design, const VariationalParams& params);

  // Full log products, natural observation order.
  const Eigen::VectorXd& totals() const { return total_; }

  // log P_j: totals with coordinate j's factor divided out.
  Eigen::VectorXd exclude(int j) const { return total_ - factors_.col(j); }

  // Re-derive coordinate j's factors after its parameters changed.
  void set_coordinate(const Eigen::MatrixXd& design, int j, double mu,
                      double sigma, double gamma);

  long updates_since_rebuild() const { return updates_; }

 private:
  Eigen::MatrixXd factors_;  // n x p, log(gamma_k M + 1 - gamma_k)
  Eigen::VectorXd total_;
  long updates_ = 0;
};

/// Shared inputs for the coordinate-wise surrogate objectives: everything
/// held fixed while coordinate j is optimized.
struct CoordinateState {
  const SurvivalDataset* data = nullptr;
  const RiskIndex* index = nullptr;
  const PriorConfig* prior = nullptr;
  const Eigen::VectorXd* excluded = nullptr;  // log P_j per observation
  int j = 0;
  double mu = 0.0;     // current mu_j (used when optimizing sigma, gamma)
  double sigma = 0.0;  // current sigma_j (used when optimizing mu, gamma)
};

/// Surrogate objective for mu_j at fixed sigma_j = state.sigma.
double objective_mu(double mu_j, const CoordinateState& state);

/// Surrogate objective for sigma_j at fixed mu_j = state.mu; includes the
/// -log(sigma_j) entropy term. Throws on sigma_j <= 0.
double objective_sigma(double sigma_j, const CoordinateState& state);

/// Log-odds of the updated inclusion probability; gamma_j = sigmoid of this.
double gamma_logit(const CoordinateState& state);

struct BrentResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Derivative-free 1-D minimization on [lo, hi] (golden section with
/// parabolic interpolation). Caps at 200 iterations; throws NumericError
/// carrying the offending abscissa if f evaluates non-finite.
BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double tol);

/// Largest l1 penalty with a nonzero solution: max_j |d/dbeta_j l_p(0)|.
double lasso_penalty_max(const SurvivalDataset& data, const RiskIndex& index);

/// l1-penalized partial-likelihood fit by proximal gradient (ISTA with
/// backtracking). Used by the lasso initializer.
Eigen::VectorXd lasso_initial_mu(const SurvivalDataset& data,
                                 const RiskIndex& index, double penalty,
                                 int max_iter = 500);

/// l2-penalized Newton fit of the partial likelihood. O(n p^2) per step.
Eigen::VectorXd ridge_initial_mu(const SurvivalDataset& data,
                                 const RiskIndex& index, double penalty,
                                 int max_iter = 50);

VariationalParams initialize(const SurvivalDataset& data,
                             const FitOptions& options,
                             const PriorConfig& prior);

/// Optional per-iteration ELBO estimator, evaluated at the current params.
using ElboHook = std::function<double(const VariationalParams&)>;

/// Coordinate-ascent fit: sweeps j = 1..p updating mu_j, sigma_j, gamma_j
/// until the total absolute change drops below options.tol or max_iter is
/// reached. Deterministic given identical data and options.
FitResult fit(const SurvivalDataset& data, const PriorConfig& prior,
              const FitOptions& options, const ElboHook& elbo_hook = {});

std::string fit_result_to_json(const FitResult& result,
                               const PriorConfig& prior,
                               const std::vector<std::string>& feature_names = {});
FitResult fit_result_from_json(const std::string& text, PriorConfig& prior,
                               std::vector<std::string>* feature_names = nullptr);

}  // namespace svb
