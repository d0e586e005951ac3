#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "svb/rng.hpp"

namespace svb {

/// Dirac-spike / Laplace-slab prior: beta_j is Laplace(lambda) with
/// probability w_j and zero otherwise, w_j ~ Beta(a0, b0).
struct PriorConfig {
  double lambda = 1.0;
  double a0 = 1.0;
  double b0 = 1.0;

  double w_bar() const { return a0 / (a0 + b0); }  // prior inclusion weight
  void validate() const;
};

/// Mean-field spike-and-slab family: coordinate j is N(mu_j, sigma_j^2)
/// with probability gamma_j and a point mass at zero otherwise.
struct VariationalParams {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;   // > 0
  Eigen::VectorXd gamma;   // in [0, 1]

  Eigen::Index p() const { return mu.size(); }
  void validate() const;

  static VariationalParams constant(Eigen::Index p, double mu0, double sigma0,
                                    double gamma0);
};

// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Standard normal quantile (inverse CDF).
double normal_quantile(double prob);

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// E|X| for X ~ N(mu, sigma^2):
///   sigma*sqrt(2/pi)*exp(-mu^2/(2 sigma^2)) + mu*(1 - 2*Phi(-mu/sigma)).
double folded_normal_mean(double mu, double sigma);

/// log M(x, mu, sigma) = mu*x + sigma^2 x^2 / 2, the log moment generating
/// value of the slab at x. Callers must keep it in the log domain.
inline double log_slab_moment(double x, double mu, double sigma) {
  return mu * x + 0.5 * sigma * sigma * x * x;
}

/// log(gamma * exp(log_m) + 1 - gamma), one factor of the mixture product
/// P_j. Stable for |log_m| up to ~1e4.
double log_mixture_factor(double gamma, double log_m);

/// KL(N(mu, sigma^2) || Laplace(lambda)); the slab part of each coordinate's
/// divergence. Nonnegative.
double kl_normal_laplace(double mu, double sigma, double lambda);

/// Closed-form KL(Q || Pi) between the variational family and the prior with
/// the spike weights integrated out. 0*log(0) is taken as 0.
double kl_q_prior(const VariationalParams& params, const PriorConfig& prior);

/// One draw beta ~ Q: coordinate j is zero with probability 1 - gamma_j,
/// otherwise N(mu_j, sigma_j^2).
Eigen::VectorXd sample_from_q(const VariationalParams& params, Rng& rng);
Eigen::VectorXd sample_from_q(const VariationalParams& params,
                              std::uint64_t seed);

/// Posterior mean under Q: gamma_j * mu_j.
Eigen::VectorXd posterior_mean(const VariationalParams& params);

/// JSON document with arrays mu, sigma, gamma plus lambda, a0, b0.
std::string params_to_json(const VariationalParams& params,
                           const PriorConfig& prior);
void params_from_json(const std::string& text, VariationalParams& params,
                      PriorConfig& prior);

}  // namespace svb
