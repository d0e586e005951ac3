#include "svb/mcmc.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "svb/errors.hpp"

namespace svb {

void McmcConfig::validate() const {
  if (n_iter < 1) throw DataError("n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter)
    throw DataError("burn_in must satisfy 0 <= burn_in < n_iter");
  if (!(sigma_k > 0.0) || !(sigma_s > 0.0))
    throw DataError("sigma_k and sigma_s must be positive");
}

double sample_w(const PriorConfig& prior, Rng& rng) {
  std::gamma_distribution<double> ga(prior.a0, 1.0);
  std::gamma_distribution<double> gb(prior.b0, 1.0);
  const double x = ga(rng), y = gb(rng);
  double w = x / (x + y);
  // keep strictly inside (0, 1) so the log odds stay finite
  constexpr double eps = 1e-15;
  return std::min(1.0 - eps, std::max(eps, w));
}

double z_inclusion_probability(double loglik_z1, double loglik_z0, double w_j) {
  const double log_odds =
      (loglik_z1 - loglik_z0) + std::log(w_j) - std::log1p(-w_j);
  return sigmoid(log_odds);
}

double proposal_sd(const McmcConfig& config, int z_j) {
  return config.sigma_k * std::pow(config.sigma_s, 1 - z_j);
}

McmcChain::McmcChain(const SurvivalDataset& data, const PriorConfig& prior,
                     const McmcConfig& config)
    : data_(data),
      index_(build_risk_index(data)),
      prior_(prior),
      config_(config),
      rng_(make_stream(config.seed, 0x6d636d63ULL)) {
  prior_.validate();
  config_.validate();
  const Eigen::Index p = data.p();
  beta_ = Eigen::VectorXd::Zero(p);
  w_ = Eigen::VectorXd::Constant(p, prior_.w_bar());
  z_.resize(p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index j = 0; j < p; ++j)
    z_[j] = unif(rng_) < prior_.w_bar() ? 1 : 0;
  refresh_eta();
}

void McmcChain::refresh_eta() {
  eta_ = data_.design * beta_.cwiseProduct(z_.cast<double>());
  loglik_ = partial_log_likelihood(data_, index_, eta_);
}

double McmcChain::loglik_with_beta_j(int j, double value, int z_value) const {
  const double active_now = beta_[j] * z_[j];
  const double active_new = value * z_value;
  if (active_now == active_new) return loglik_;
  const Eigen::VectorXd eta =
      eta_ + (active_new - active_now) * data_.design.col(j);
  return partial_log_likelihood(data_, index_, eta);
}

void McmcChain::sweep_w() {
  for (Eigen::Index j = 0; j < w_.size(); ++j) w_[j] = sample_w(prior_, rng_);
}

void McmcChain::update_z(int j) {
  const double l1 = loglik_with_beta_j(j, beta_[j], 1);
  const double l0 = loglik_with_beta_j(j, beta_[j], 0);
  const double prob = z_inclusion_probability(l1, l0, w_[j]);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int z_new = unif(rng_) < prob ? 1 : 0;
  if (z_new != z_[j]) {
    eta_ += (z_new - z_[j]) * beta_[j] * data_.design.col(j);
    z_[j] = z_new;
    loglik_ = z_new == 1 ? l1 : l0;
  }
}

std::pair<double, double> McmcChain::acceptance_parts(int j, double current,
                                                      double proposal) const {
  const double sd = proposal_sd(config_, z_[j]);
  double loglik_prop = loglik_;
  double loglik_ratio = 0.0;
  if (z_[j] == 1) {
    // the likelihood sees beta only through beta .* z
    loglik_prop = loglik_with_beta_j(j, proposal, 1);
    loglik_ratio = loglik_prop - loglik_with_beta_j(j, current, 1);
  }
  const double prior_ratio =
      prior_.lambda * (std::abs(current) - std::abs(proposal));
  // symmetric random walk; the kernel ratio is spelled out anyway
  auto log_kernel = [&](double to, double from) {
    const double d = (to - from) / sd;
    return -0.5 * d * d - std::log(sd);
  };
  const double kernel_ratio =
      log_kernel(current, proposal) - log_kernel(proposal, current);
  return {loglik_ratio + prior_ratio + kernel_ratio, loglik_prop};
}

double McmcChain::log_acceptance(int j, double current, double proposal) const {
  return acceptance_parts(j, current, proposal).first;
}

bool McmcChain::update_beta(int j) {
  const double sd = proposal_sd(config_, z_[j]);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double proposal = beta_[j] + sd * stdnorm(rng_);
  const auto [log_a, loglik_prop] = acceptance_parts(j, beta_[j], proposal);
  if (std::log(unif(rng_)) < log_a) {
    if (z_[j] == 1) {
      eta_ += (proposal - beta_[j]) * data_.design.col(j);
      loglik_ = loglik_prop;
    }
    beta_[j] = proposal;
    return true;
  }
  return false;
}

void McmcChain::end_sweep() {
  ++sweeps_;
  if (sweeps_ % 100 == 0) refresh_eta();  // undo incremental drift
}

void McmcChain::iterate() {
  const Eigen::Index p = data_.p();
  sweep_w();
  for (Eigen::Index j = 0; j < p; ++j) update_z(static_cast<int>(j));
  for (Eigen::Index j = 0; j < p; ++j) update_beta(static_cast<int>(j));
  end_sweep();
}

McmcSamples run_chain(const SurvivalDataset& data, const PriorConfig& prior,
                      const McmcConfig& config) {
  McmcChain chain(data, prior, config);
  const Eigen::Index p = data.p();
  const Eigen::Index kept = config.n_iter - config.burn_in;

  McmcSamples samples;
  samples.beta.resize(kept, p);
  samples.z.resize(kept, p);
  samples.w.resize(kept, p);
  Eigen::VectorXd accepted = Eigen::VectorXd::Zero(p);

  for (int it = 0; it < config.n_iter; ++it) {
    chain.sweep_w();
    for (Eigen::Index j = 0; j < p; ++j) chain.update_z(static_cast<int>(j));
    for (Eigen::Index j = 0; j < p; ++j)
      if (chain.update_beta(static_cast<int>(j))) accepted[j] += 1.0;
    chain.end_sweep();
    if (it >= config.burn_in) {
      const Eigen::Index row = it - config.burn_in;
      samples.beta.row(row) = chain.beta();
      samples.z.row(row) = chain.z();
      samples.w.row(row) = chain.w();
    }
  }
  samples.acceptance_rate = accepted / static_cast<double>(config.n_iter);
  return samples;
}

McmcSummary mcmc_summaries(const McmcSamples& samples, double level,
                           double threshold) {
  if (samples.n_samples() < 1)
    throw DataError("mcmc_summaries: no stored samples");
  const Eigen::Index p = samples.p();
  McmcSummary out;
  out.beta_hat.resize(p);
  out.inclusion.resize(p);
  out.sets.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    double active_sum = 0.0;
    std::vector<double> nonzero;
    int included = 0;
    for (Eigen::Index i = 0; i < samples.n_samples(); ++i) {
      active_sum += samples.beta(i, j) * samples.z(i, j);
      if (samples.z(i, j) == 1) {
        ++included;
        nonzero.push_back(samples.beta(i, j));
      }
    }
    out.beta_hat[j] = active_sum / samples.n_samples();
    out.inclusion[j] = static_cast<double>(included) / samples.n_samples();
    out.sets.push_back(credible_set_from_draws(std::move(nonzero),
                                               out.inclusion[j], level,
                                               threshold));
  }
  return out;
}

void write_samples_csv(const std::string& path, const McmcSamples& samples) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "iter,j,beta,z,w\n";
  char buf[64];
  for (Eigen::Index i = 0; i < samples.n_samples(); ++i) {
    for (Eigen::Index j = 0; j < samples.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", samples.beta(i, j));
      out << i << ',' << j << ',' << buf << ',' << samples.z(i, j) << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", samples.w(i, j));
      out << buf << '\n';
    }
  }
}

std::string mcmc_summary_to_json(const McmcSummary& summary) {
  nlohmann::json doc;
  nlohmann::json beta = nlohmann::json::array();
  nlohmann::json gamma = nlohmann::json::array();
  for (Eigen::Index j = 0; j < summary.beta_hat.size(); ++j) {
    beta.push_back(summary.beta_hat[j]);
    gamma.push_back(summary.inclusion[j]);
  }
  doc["beta_hat"] = beta;
  doc["gamma"] = gamma;  // same field name as the variational fit output
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& s : summary.sets) {
    nlohmann::json e;
    e["kind"] = to_string(s.kind);
    if (s.kind != CredibleSetKind::zero_atom) {
      e["lower"] = s.lower;
      e["upper"] = s.upper;
    }
    sets.push_back(e);
  }
  doc["credible_sets"] = sets;
  return doc.dump(2) + "\n";
}

}  // namespace svb
