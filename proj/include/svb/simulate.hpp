#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "svb/rng.hpp"
#include "svb/summaries.hpp"
#include "svb/survival.hpp"

namespace svb {

enum class DesignKind { independent, block, external };

DesignKind design_kind_from_string(const std::string& name);
std::string to_string(DesignKind kind);

struct SimConfig {
  int n = 100;
  int p = 10;
  int s = 1;                 // number of nonzero coefficients, s <= p
  double censoring = 0.0;    // expected censored fraction, in [0, 1)
  DesignKind design = DesignKind::independent;
  double rho = 0.6;          // within-block correlation
  int block_size = 50;       // must divide p for the block design
  std::string design_file;   // external design source
  double coef_low = 0.5;     // nonzero magnitudes drawn from [low, high]
  double coef_high = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  Eigen::VectorXd beta0;
  std::vector<int> support;  // indices of nonzero coordinates, ascending
};

/// s support indices uniform without replacement; values have uniform sign
/// and magnitude uniform on [coef_low, coef_high].
GroundTruth draw_coefficients(const SimConfig& config, Rng& rng);

/// Design rows: iid standard normal, equicorrelated consecutive blocks
/// (unit diagonal, rho off-diagonal within a block, drawn via per-block
/// Cholesky), or rows loaded from a CSV file.
Eigen::MatrixXd draw_design(const SimConfig& config, Rng& rng);

/// Survival times from a unit-baseline proportional hazards model:
/// t_i = -log(U) * exp(-beta0'x_i). Censoring flags are drawn with expected
/// frequency `censoring`; censored times are replaced by U(0, t_i) draws.
SurvivalDataset draw_survival(const SimConfig& config,
                              const GroundTruth& truth,
                              const Eigen::MatrixXd& design, Rng& rng);

struct SimResult {
  SurvivalDataset data;
  GroundTruth truth;
};

/// Full generation pipeline seeded from config.seed.
SimResult simulate(const SimConfig& config);

struct MetricsReport {
  double l2 = 0.0;                 // ||beta0 - beta_hat||_2
  double l1 = 0.0;
  double tpr = 0.0;
  double fdr = 0.0;
  double auc = 0.0;                // rank statistic of inclusion vs support
  int selected = 0;                // count with inclusion > 0.5
  double coverage_zero = 0.0;      // credible-set coverage, null coordinates
  double coverage_nonzero = 0.0;
  double size_zero = 0.0;          // mean Lebesgue set size per group
  double size_nonzero = 0.0;
};

/// Point-estimate, selection and uncertainty metrics against the truth.
/// Pass an empty `sets` vector to skip the coverage block (reported as NaN).
MetricsReport evaluate(const Eigen::VectorXd& beta_hat,
                       const Eigen::VectorXd& inclusion,
                       const std::vector<CredibleSet>& sets,
                       const GroundTruth& truth);

std::string truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const std::string& text);

std::string metrics_to_json(const MetricsReport& metrics);

}  // namespace svb
