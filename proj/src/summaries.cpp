#include "svb/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svb/errors.hpp"

namespace svb {

std::string to_string(CredibleSetKind kind) {
  switch (kind) {
    case CredibleSetKind::interval: return "interval";
    case CredibleSetKind::zero_atom: return "zero_atom";
    case CredibleSetKind::interval_plus_zero: return "interval_plus_zero";
  }
  return "?";
}

std::vector<CredibleSet> credible_sets(const VariationalParams& params,
                                       double level, double threshold) {
  if (!(level > 0.0 && level < 1.0))
    throw DataError("credible_sets: level must lie in (0, 1)");
  params.validate();
  const double z = normal_quantile(0.5 * (1.0 + level));
  std::vector<CredibleSet> sets;
  sets.reserve(static_cast<std::size_t>(params.p()));
  for (Eigen::Index j = 0; j < params.p(); ++j) {
    CredibleSet s;
    s.level = level;
    const double g = params.gamma[j];
    if (g < 1.0 - threshold) {
      s.kind = CredibleSetKind::zero_atom;
    } else {
      s.kind = (g > threshold) ? CredibleSetKind::interval
                               : CredibleSetKind::interval_plus_zero;
      s.lower = params.mu[j] - z * params.sigma[j];
      s.upper = params.mu[j] + z * params.sigma[j];
    }
    sets.push_back(s);
  }
  return sets;
}

namespace {

// Linear-interpolation empirical quantile on sorted draws.
double empirical_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

CredibleSet credible_set_from_draws(std::vector<double> nonzero_draws,
                                    double inclusion, double level,
                                    double threshold) {
  CredibleSet s;
  s.level = level;
  if (inclusion < 1.0 - threshold || nonzero_draws.empty()) {
    s.kind = CredibleSetKind::zero_atom;
    return s;
  }
  std::sort(nonzero_draws.begin(), nonzero_draws.end());
  s.kind = (inclusion > threshold) ? CredibleSetKind::interval
                                   : CredibleSetKind::interval_plus_zero;
  s.lower = empirical_quantile(nonzero_draws, 0.5 * (1.0 - level));
  s.upper = empirical_quantile(nonzero_draws, 0.5 * (1.0 + level));
  return s;
}

BfdrSelection bfdr_threshold(const Eigen::VectorXd& gamma, double alpha,
                             bool largest) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DataError("bfdr_threshold: alpha must lie in (0, 1)");
  const Eigen::Index p = gamma.size();
  std::vector<double> candidates;
  candidates.push_back(0.0);
  for (Eigen::Index j = 0; j < p; ++j) candidates.push_back(gamma[j]);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  auto bfdr_at = [&](double k) {
    double num = 0.0;
    int count = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (gamma[j] > k) {
        num += 1.0 - gamma[j];
        ++count;
      }
    }
    return count == 0 ? 0.0 : num / count;  // empty selection has no false discoveries
  };

  BfdrSelection out;
  bool found = false;
  for (double k : candidates) {
    const double rate = bfdr_at(k);
    if (rate < alpha) {
      if (!found || largest) {
        out.k_star = k;
        out.bfdr = rate;
        found = true;
      }
      if (!largest) break;
    }
  }
  // the largest candidate always selects nothing, so a threshold exists
  for (Eigen::Index j = 0; j < p; ++j)
    if (gamma[j] > out.k_star) out.selected.push_back(static_cast<int>(j));
  return out;
}

RiskComparison risk_comparison(const VariationalParams& params,
                               const Eigen::VectorXd& x_i,
                               const Eigen::VectorXd& x_j, int B,
                               std::uint64_t seed) {
  if (B < 1) throw DataError("risk_comparison: B must be at least 1");
  if (x_i.size() != params.p() || x_j.size() != params.p())
    throw DataError("risk_comparison: covariate length mismatch");
  Rng rng = make_rng(seed);
  int hits = 0;
  for (int b = 0; b < B; ++b) {
    const Eigen::VectorXd beta = sample_from_q(params, rng);
    if (beta.dot(x_i) >= beta.dot(x_j)) ++hits;
  }
  RiskComparison out;
  out.prob = static_cast<double>(hits) / B;
  out.std_error = std::sqrt(out.prob * (1.0 - out.prob) / B);
  return out;
}

RiskMatrix risk_matrix(const VariationalParams& params,
                       const SurvivalDataset& data,
                       std::vector<int> group_high, std::vector<int> group_low,
                       int B, std::uint64_t seed) {
  if (B < 1) throw DataError("risk_matrix: B must be at least 1");
  for (int i : group_high)
    for (int j : group_low)
      if (i == j) throw DataError("risk_matrix: groups must be disjoint");

  // order both groups by the posterior-mean prognostic index, ascending
  const Eigen::VectorXd eta_hat =
      prognostic_index(data, posterior_mean(params));
  auto sort_by_eta = [&](std::vector<int>& ids) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      if (eta_hat[a] != eta_hat[b]) return eta_hat[a] < eta_hat[b];
      return a < b;
    });
  };
  sort_by_eta(group_high);
  sort_by_eta(group_low);

  // one shared set of draws keeps all pairwise comparisons coherent
  const std::size_t nh = group_high.size(), nl = group_low.size();
  Eigen::MatrixXd eta_high(B, static_cast<Eigen::Index>(nh));
  Eigen::MatrixXd eta_low(B, static_cast<Eigen::Index>(nl));
  Rng rng = make_rng(seed);
  for (int b = 0; b < B; ++b) {
    const Eigen::VectorXd beta = sample_from_q(params, rng);
    for (std::size_t a = 0; a < nh; ++a)
      eta_high(b, static_cast<Eigen::Index>(a)) =
          beta.dot(data.design.row(group_high[a]));
    for (std::size_t c = 0; c < nl; ++c)
      eta_low(b, static_cast<Eigen::Index>(c)) =
          beta.dot(data.design.row(group_low[c]));
  }

  RiskMatrix out;
  out.high_ids = std::move(group_high);
  out.low_ids = std::move(group_low);
  out.prob.resize(static_cast<Eigen::Index>(nh), static_cast<Eigen::Index>(nl));
  for (std::size_t a = 0; a < nh; ++a) {
    for (std::size_t c = 0; c < nl; ++c) {
      int hits = 0;
      for (int b = 0; b < B; ++b)
        if (eta_high(b, static_cast<Eigen::Index>(a)) >=
            eta_low(b, static_cast<Eigen::Index>(c)))
          ++hits;
      out.prob(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) =
          static_cast<double>(hits) / B;
    }
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> median_risk_split(
    const SurvivalDataset& data, const Eigen::VectorXd& beta_hat) {
  const Eigen::VectorXd eta = prognostic_index(data, beta_hat);
  std::vector<double> sorted(eta.data(), eta.data() + eta.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = (n % 2 == 1)
                            ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<int> low, high;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (eta[i] < median) low.push_back(static_cast<int>(i));
    else high.push_back(static_cast<int>(i));
  }
  return {low, high};
}

}  // namespace svb
