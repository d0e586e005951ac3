#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "svb/model.hpp"
#include "svb/rng.hpp"
#include "svb/summaries.hpp"
#include "svb/survival.hpp"

namespace svb {

struct McmcConfig {
  int n_iter = 10000;
  int burn_in = 1000;
  double sigma_k = 0.2;   // random-walk kernel scale
  double sigma_s = 10.0;  // kernel inflation while the coordinate is spiked
  std::uint64_t seed = 0;

  void validate() const;
};

struct McmcSamples {
  Eigen::MatrixXd beta;             // (n_iter - burn_in) x p
  Eigen::MatrixXi z;                // same shape, entries in {0, 1}
  Eigen::MatrixXd w;                // same shape, entries in (0, 1)
  Eigen::VectorXd acceptance_rate;  // per coordinate, over all iterations

  Eigen::Index n_samples() const { return beta.rows(); }
  Eigen::Index p() const { return beta.cols(); }
};

/// One Beta(a0, b0) draw; the w_j update is conditionally independent of
/// everything else.
double sample_w(const PriorConfig& prior, Rng& rng);

/// P(z_j = 1 | rest) from the likelihood log-difference between the two
/// states and the current weight w_j.
double z_inclusion_probability(double loglik_z1, double loglik_z0, double w_j);

/// Random-walk proposal scale: sigma_k * sigma_s^(1 - z_j).
double proposal_sd(const McmcConfig& config, int z_j);

/// Metropolis-within-Gibbs sampler for the spike-and-slab proportional
/// hazards posterior with the likelihood evaluated at beta .* z. Owns its
/// state; `iterate` runs one w/z/beta sweep triple.
class McmcChain {
 public:
  McmcChain(const SurvivalDataset& data, const PriorConfig& prior,
            const McmcConfig& config);

  void iterate();

  // sweep pieces, exposed so callers can count acceptances and for tests
  void sweep_w();
  void update_z(int j);
  bool update_beta(int j);  // returns whether the proposal was accepted
  void end_sweep();

  // log acceptance ratio for moving coordinate j from `current` to
  // `proposal`; the kernel term is evaluated explicitly even though the
  // random walk is symmetric.
  double log_acceptance(int j, double current, double proposal) const;

  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXi& z() const { return z_; }
  const Eigen::VectorXd& w() const { return w_; }
  Rng& rng() { return rng_; }

 private:
  double loglik_with_beta_j(int j, double value, int z_value) const;
  std::pair<double, double> acceptance_parts(int j, double current,
                                             double proposal) const;
  void refresh_eta();

  const SurvivalDataset& data_;
  RiskIndex index_;
  PriorConfig prior_;
  McmcConfig config_;
  Eigen::VectorXd beta_;
  Eigen::VectorXi z_;
  Eigen::VectorXd w_;
  Eigen::VectorXd eta_;  // design * (beta .* z), maintained incrementally
  double loglik_ = 0.0;
  Rng rng_;
  long sweeps_ = 0;
};

/// Run the sampler, discard burn-in, return stored draws and per-coordinate
/// acceptance rates. Bit-identical under a fixed seed.
McmcSamples run_chain(const SurvivalDataset& data, const PriorConfig& prior,
                      const McmcConfig& config);

struct McmcSummary {
  Eigen::VectorXd beta_hat;   // mean of beta_j * z_j
  Eigen::VectorXd inclusion;  // mean of z_j
  std::vector<CredibleSet> sets;
};

McmcSummary mcmc_summaries(const McmcSamples& samples, double level = 0.95,
                           double threshold = 0.95);

/// Long-format dump, one `iter,j,beta,z,w` row per stored draw coordinate.
void write_samples_csv(const std::string& path, const McmcSamples& samples);

std::string mcmc_summary_to_json(const McmcSummary& summary);

}  // namespace svb
