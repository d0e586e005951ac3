#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "svb/model.hpp"
#include "svb/survival.hpp"

namespace svb {

enum class CredibleSetKind { interval, zero_atom, interval_plus_zero };

/// Marginal credible set for one coefficient: an interval from the slab,
/// the zero atom from the spike, or their union.
struct CredibleSet {
  CredibleSetKind kind = CredibleSetKind::zero_atom;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;

  bool contains(double x) const {
    switch (kind) {
      case CredibleSetKind::interval: return lower <= x && x <= upper;
      case CredibleSetKind::zero_atom: return x == 0.0;
      case CredibleSetKind::interval_plus_zero:
        return x == 0.0 || (lower <= x && x <= upper);
    }
    return false;
  }

  // Lebesgue measure; the zero atom contributes nothing.
  double size() const {
    return kind == CredibleSetKind::zero_atom ? 0.0 : upper - lower;
  }
};

std::string to_string(CredibleSetKind kind);

/// Marginal credible sets from the variational posterior. Coordinate j gets
/// the central `level` interval of its slab when gamma_j > threshold, the
/// zero atom when gamma_j < 1 - threshold, and their union otherwise.
std::vector<CredibleSet> credible_sets(const VariationalParams& params,
                                       double level = 0.95,
                                       double threshold = 0.95);

/// Same three-case rule applied to MCMC draws: the interval comes from
/// central empirical quantiles of the nonzero draws.
CredibleSet credible_set_from_draws(std::vector<double> nonzero_draws,
                                    double inclusion, double level = 0.95,
                                    double threshold = 0.95);

struct BfdrSelection {
  double k_star = 0.0;
  std::vector<int> selected;                 // indices with gamma_j > k_star
  double bfdr = 0.0;                         // estimated BFDR at k_star
};

/// Inclusion-probability threshold controlling the Bayesian FDR below
/// `alpha`. Candidates are 0 and the gamma values themselves; the default
/// picks the smallest admissible threshold (most discoveries). Setting
/// `largest` instead picks the largest admissible candidate, which reads the
/// selection rule as a literal argmax and typically selects nothing.
BfdrSelection bfdr_threshold(const Eigen::VectorXd& gamma, double alpha,
                             bool largest = false);

struct RiskComparison {
  double prob = 0.0;       // posterior probability of i at greater risk than j
  double std_error = 0.0;  // binomial Monte Carlo standard error
};

/// Monte Carlo estimate of Q(beta'x_i >= beta'x_j) with B draws from Q.
RiskComparison risk_comparison(const VariationalParams& params,
                               const Eigen::VectorXd& x_i,
                               const Eigen::VectorXd& x_j, int B,
                               std::uint64_t seed);

struct RiskMatrix {
  Eigen::MatrixXd prob;        // |high| x |low|
  std::vector<int> high_ids;   // row observation ids, lowest risk first
  std::vector<int> low_ids;    // column observation ids, lowest risk first
};

/// Pairwise high-vs-low risk probabilities over one shared set of B draws
/// from Q. Rows and columns are sorted by the posterior-mean prognostic
/// index, lowest risk first.
RiskMatrix risk_matrix(const VariationalParams& params,
                       const SurvivalDataset& data,
                       std::vector<int> group_high, std::vector<int> group_low,
                       int B, std::uint64_t seed);

/// Median split on the prognostic index at the posterior mean: returns
/// (low, high) where low has eta below the median.
std::pair<std::vector<int>, std::vector<int>> median_risk_split(
    const SurvivalDataset& data, const Eigen::VectorXd& beta_hat);

}  // namespace svb
