#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace svb {

/// Right-censored survival data: follow-up times, event indicators and an
/// n-by-p design matrix. Immutable after construction; safe to share.
struct SurvivalDataset {
  Eigen::VectorXd times;            // strictly positive
  Eigen::VectorXi status;           // 1 = event observed, 0 = right-censored
  Eigen::MatrixXd design;           // n x p covariates
  std::vector<std::string> feature_names;  // optional, size p when present

  Eigen::Index n() const { return times.size(); }
  Eigen::Index p() const { return design.cols(); }
  Eigen::Index n_events() const { return status.sum(); }

  // Throws DataError if any invariant is violated.
  void validate() const;

  // Row subset, preserving order of `rows`. Keeps feature names.
  SurvivalDataset subset(const std::vector<int>& rows) const;
};

/// Observations sorted by descending time, with tie groups. Events in the
/// g-th group have risk set equal to the order-prefix through group g, so
/// all risk-set sums reduce to prefix accumulations.
struct RiskIndex {
  std::vector<int> order;           // observation ids, descending time
  std::vector<int> group_offsets;   // tie-group starts into order, plus n
  std::vector<int> event_positions; // positions in `order` with an event
  int n_events = 0;

  int n_groups() const { return static_cast<int>(group_offsets.size()) - 1; }
};

RiskIndex build_risk_index(const SurvivalDataset& data);

/// Streaming log-sum-exp: add values one at a time, query the running
/// log of the sum of exponentials. Stable for arbitrary magnitudes.
class LogSumExp {
 public:
  void add(double v) {
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const { return max_ + std::log(sum_); }
  bool empty() const { return sum_ == 0.0; }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

/// Cox partial log-likelihood evaluated from precomputed linear predictors.
/// Ties follow the Breslow convention: every observation with t_r >= t_i is
/// in R(t_i) and tied events each contribute a full term.
double partial_log_likelihood(const SurvivalDataset& data,
                              const RiskIndex& index,
                              const Eigen::VectorXd& eta);

/// Same likelihood from coefficients; throws NumericError on non-finite beta.
double partial_log_likelihood_beta(const SurvivalDataset& data,
                                   const RiskIndex& index,
                                   const Eigen::VectorXd& beta);

/// Linear predictors eta_i = beta' x_i.
Eigen::VectorXd prognostic_index(const SurvivalDataset& data,
                                 const Eigen::VectorXd& beta);

/// Harrell-style concordance estimator over comparable pairs. Predictor ties
/// score zero unless `tie_credit` grants the conventional 1/2. Returns
/// nullopt when no pair is comparable.
std::optional<double> c_index(const SurvivalDataset& data,
                              const Eigen::VectorXd& eta,
                              bool tie_credit = false);

/// CSV ingestion: header row `time,status,<covariate names...>`, one
/// observation per line. Rejects nonpositive times and status outside {0,1},
/// reporting 1-based file line numbers.
SurvivalDataset read_survival_csv(const std::string& path);
void write_survival_csv(const std::string& path, const SurvivalDataset& data);

}  // namespace svb
