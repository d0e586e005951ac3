#include "svb/model.hpp"

#include <nlohmann/json.hpp>

#include "svb/errors.hpp"

namespace svb {

namespace {

constexpr double kGammaEps = 1e-12;  // clamp for gamma inside logs

double clamp_unit(double g) {
  return std::min(1.0 - kGammaEps, std::max(kGammaEps, g));
}

}  // namespace

void PriorConfig::validate() const {
  if (!(lambda > 0.0) || !(a0 > 0.0) || !(b0 > 0.0))
    throw DataError("prior parameters lambda, a0, b0 must be positive");
}

void VariationalParams::validate() const {
  const Eigen::Index n = mu.size();
  if (n < 1 || sigma.size() != n || gamma.size() != n)
    throw DataError("variational parameter vectors must share a positive length");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(sigma[j] > 0.0)) throw DataError("sigma must be strictly positive");
    if (!(gamma[j] >= 0.0 && gamma[j] <= 1.0))
      throw DataError("gamma must lie in [0, 1]");
  }
}

VariationalParams VariationalParams::constant(Eigen::Index p, double mu0,
                                              double sigma0, double gamma0) {
  VariationalParams out;
  out.mu = Eigen::VectorXd::Constant(p, mu0);
  out.sigma = Eigen::VectorXd::Constant(p, sigma0);
  out.gamma = Eigen::VectorXd::Constant(p, gamma0);
  return out;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw DataError("normal_quantile: probability must lie in (0, 1)");
  // Acklam's rational approximation, then one Halley step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (prob < plow) {
    double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= phigh) {
    double q = prob - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement
  double e = normal_cdf(x) - prob;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double folded_normal_mean(double mu, double sigma) {
  if (!(sigma > 0.0))
    throw DataError("folded_normal_mean: sigma must be positive");
  const double z = mu / sigma;
  return sigma * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * z * z) +
         mu * (1.0 - 2.0 * normal_cdf(-z));
}

double log_mixture_factor(double gamma, double log_m) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw DataError("log_mixture_factor: gamma must lie in [0, 1]");
  if (gamma <= 0.0) return 0.0;
  if (gamma >= 1.0) return log_m;
  if (std::abs(log_m) < 30.0) {
    if (log_m <= 0.0) {
      // gamma*e^m + 1 - gamma = 1 + gamma*(e^m - 1)
      return std::log1p(gamma * std::expm1(log_m));
    }
    // factor out e^m: m + log(gamma + (1-gamma) e^{-m})
    return log_m + std::log1p((1.0 - gamma) * std::expm1(-log_m));
  }
  // far tails: two-term log-sum-exp of log(gamma)+m and log(1-gamma)
  const double a = std::log(gamma) + log_m;
  const double b = std::log1p(-gamma);
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double kl_normal_laplace(double mu, double sigma, double lambda) {
  return lambda * folded_normal_mean(mu, sigma) +
         std::log(M_SQRT2 / (std::sqrt(M_PI) * sigma * lambda)) - 0.5;
}

double kl_q_prior(const VariationalParams& params, const PriorConfig& prior) {
  const double w = prior.w_bar();
  double total = 0.0;
  for (Eigen::Index j = 0; j < params.p(); ++j) {
    const double g = params.gamma[j];
    const double gc = clamp_unit(g);
    if (g > 0.0)
      total += g * (kl_normal_laplace(params.mu[j], params.sigma[j],
                                      prior.lambda) +
                    std::log(gc / w));
    if (g < 1.0) total += (1.0 - g) * std::log((1.0 - gc) / (1.0 - w));
  }
  return total;
}

Eigen::VectorXd sample_from_q(const VariationalParams& params, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(params.p());
  for (Eigen::Index j = 0; j < params.p(); ++j) {
    if (unif(rng) < params.gamma[j])
      beta[j] = params.mu[j] + params.sigma[j] * stdnorm(rng);
  }
  return beta;
}

Eigen::VectorXd sample_from_q(const VariationalParams& params,
                              std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_from_q(params, rng);
}

Eigen::VectorXd posterior_mean(const VariationalParams& params) {
  return params.gamma.cwiseProduct(params.mu);
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_array())
    throw DataError(std::string("missing or non-array field '") + field + "'");
  const auto& arr = doc[field];
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw DataError(std::string("field '") + field + "' has a non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string params_to_json(const VariationalParams& params,
                           const PriorConfig& prior) {
  nlohmann::json doc;
  doc["mu"] = vec_to_json(params.mu);
  doc["sigma"] = vec_to_json(params.sigma);
  doc["gamma"] = vec_to_json(params.gamma);
  doc["lambda"] = prior.lambda;
  doc["a0"] = prior.a0;
  doc["b0"] = prior.b0;
  return doc.dump(2) + "\n";
}

void params_from_json(const std::string& text, VariationalParams& params,
                      PriorConfig& prior) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  params.mu = vec_from_json(doc, "mu");
  params.sigma = vec_from_json(doc, "sigma");
  params.gamma = vec_from_json(doc, "gamma");
  if (params.sigma.size() != params.mu.size() ||
      params.gamma.size() != params.mu.size())
    throw DataError("fields 'mu', 'sigma', 'gamma' must have equal lengths");
  for (const char* f : {"lambda", "a0", "b0"})
    if (!doc.contains(f) || !doc[f].is_number())
      throw DataError(std::string("missing or non-numeric field '") + f + "'");
  prior.lambda = doc["lambda"].get<double>();
  prior.a0 = doc["a0"].get<double>();
  prior.b0 = doc["b0"].get<double>();
  params.validate();
  prior.validate();
}

}  // namespace svb
