#include "svb/cavi.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cfloat>
#include <cmath>
#include <nlohmann/json.hpp>

#include "svb/errors.hpp"

namespace svb {

namespace {

constexpr double kSigmaLo = 1e-4;   // sigma search bracket, log scale
constexpr double kSigmaHi = 10.0;

// sum over events i of log sum_{r in R(t_i)} exp(excluded_r [+ log M(x_rj)]),
// computed as one prefix pass over the descending-time order.
double risk_moment_sum(const SurvivalDataset& data, const RiskIndex& index,
                       const Eigen::VectorXd& excluded, int j, double mu,
                       double sigma, bool include_moment) {
  double total = 0.0;
  LogSumExp acc;
  for (int g = 0; g < index.n_groups(); ++g) {
    const int lo = index.group_offsets[static_cast<std::size_t>(g)];
    const int hi = index.group_offsets[static_cast<std::size_t>(g) + 1];
    int events_here = 0;
    for (int k = lo; k < hi; ++k) {
      const int r = index.order[static_cast<std::size_t>(k)];
      double v = excluded[r];
      if (include_moment) v += log_slab_moment(data.design(r, j), mu, sigma);
      acc.add(v);
      events_here += data.status[r];
    }
    if (events_here > 0) total += events_here * acc.value();
  }
  return total;
}

double event_covariate_sum(const SurvivalDataset& data, const RiskIndex& index,
                           int j) {
  double s = 0.0;
  for (int pos : index.event_positions)
    s += data.design(index.order[static_cast<std::size_t>(pos)], j);
  return s;
}

}  // namespace

InitStrategy init_strategy_from_string(const std::string& name) {
  if (name == "lasso") return InitStrategy::lasso;
  if (name == "ridge") return InitStrategy::ridge;
  if (name == "zero") return InitStrategy::zero;
  if (name == "file") return InitStrategy::file;
  throw DataError("unknown init strategy '" + name + "'");
}

std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::lasso: return "lasso";
    case InitStrategy::ridge: return "ridge";
    case InitStrategy::zero: return "zero";
    case InitStrategy::file: return "file";
  }
  return "?";
}

void FitOptions::validate() const {
  if (!(tol > 0.0)) throw DataError("tol must be positive");
  if (max_iter < 1) throw DataError("max_iter must be at least 1");
  if (!(sigma_init > 0.0)) throw DataError("sigma_init must be positive");
  if (!(gamma_init > 0.0 && gamma_init < 1.0))
    throw DataError("gamma_init must lie in (0, 1)");
  if (!(brent_tol > 0.0)) throw DataError("brent_tol must be positive");
  if (!(brent_bracket > 0.0)) throw DataError("brent_bracket must be positive");
  if (!(init_penalty_scale > 0.0))
    throw DataError("init_penalty_scale must be positive");
}

SlabWeightCache::SlabWeightCache(const Eigen::MatrixXd& design,
                                 const VariationalParams& params) {
  rebuild(design, params);
}

void SlabWeightCache::rebuild(const Eigen::MatrixXd& design,
                              const VariationalParams& params) {
  const Eigen::Index n = design.rows(), p = design.cols();
  factors_.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mu = params.mu[j], sigma = params.sigma[j],
                 gamma = params.gamma[j];
    for (Eigen::Index r = 0; r < n; ++r)
      factors_(r, j) =
          log_mixture_factor(gamma, log_slab_moment(design(r, j), mu, sigma));
  }
  total_ = factors_.rowwise().sum();
  updates_ = 0;
}

void SlabWeightCache::set_coordinate(const Eigen::MatrixXd& design, int j,
                                     double mu, double sigma, double gamma) {
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    const double f =
        log_mixture_factor(gamma, log_slab_moment(design(r, j), mu, sigma));
    total_[r] += f - factors_(r, j);
    factors_(r, j) = f;
  }
  ++updates_;
}

double objective_mu(double mu_j, const CoordinateState& s) {
  const double data_term = risk_moment_sum(*s.data, *s.index, *s.excluded, s.j,
                                           mu_j, s.sigma, true) -
                           mu_j * event_covariate_sum(*s.data, *s.index, s.j);
  return data_term + s.prior->lambda * folded_normal_mean(mu_j, s.sigma);
}

double objective_sigma(double sigma_j, const CoordinateState& s) {
  if (!(sigma_j > 0.0))
    throw NumericError("objective_sigma: sigma must be positive", sigma_j);
  return risk_moment_sum(*s.data, *s.index, *s.excluded, s.j, s.mu, sigma_j,
                         true) +
         s.prior->lambda * folded_normal_mean(s.mu, sigma_j) -
         std::log(sigma_j);
}

double gamma_logit(const CoordinateState& s) {
  const double with_moment = risk_moment_sum(*s.data, *s.index, *s.excluded,
                                             s.j, s.mu, s.sigma, true);
  const double without_moment = risk_moment_sum(*s.data, *s.index, *s.excluded,
                                                s.j, 0.0, 0.0, false);
  const double data_term = with_moment - without_moment -
                           s.mu * event_covariate_sum(*s.data, *s.index, s.j);
  return std::log(s.prior->a0 / s.prior->b0) -
         kl_normal_laplace(s.mu, s.sigma, s.prior->lambda) - data_term;
}

BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  if (!(lo < hi)) throw DataError("brent_minimize: need lo < hi");
  if (!(tol > 0.0)) throw DataError("brent_minimize: tol must be positive");
  auto eval = [&](double x) {
    double v = f(x);
    if (!std::isfinite(v))
      throw NumericError(
          "brent_minimize: objective not finite at x = " + std::to_string(x),
          x);
    return v;
  };

  constexpr double golden = 0.3819660112501051;
  const double eps = std::sqrt(DBL_EPSILON);
  double a = lo, b = hi;
  double x = a + golden * (b - a), w = x, v = x;
  double fx = eval(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int it = 0;
  for (; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) + tol;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // try parabolic interpolation through (x, w, v)
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double pnum = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) pnum = -pnum;
      q = std::abs(q);
      const double e_old = e;
      e = d;
      if (std::abs(pnum) < std::abs(0.5 * q * e_old) && pnum > q * (a - x) &&
          pnum < q * (b - x)) {
        d = pnum / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d
                                           : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = eval(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, it};
}

namespace {

// Gradient of the partial log-likelihood: sum over events of
// x_i - weighted risk-set mean of x, via one rescaled prefix pass.
Eigen::VectorXd pll_gradient(const SurvivalDataset& data,
                             const RiskIndex& index,
                             const Eigen::VectorXd& eta) {
  const Eigen::Index p = data.p();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  double s0 = 0.0;
  double shift = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < index.n_groups(); ++g) {
    const int lo = index.group_offsets[static_cast<std::size_t>(g)];
    const int hi = index.group_offsets[static_cast<std::size_t>(g) + 1];
    for (int k = lo; k < hi; ++k) {
      const int r = index.order[static_cast<std::size_t>(k)];
      if (eta[r] > shift) {
        const double c = (s0 > 0.0) ? std::exp(shift - eta[r]) : 0.0;
        s0 *= c;
        s1 *= c;
        shift = eta[r];
      }
      const double w = std::exp(eta[r] - shift);
      s0 += w;
      s1 += w * data.design.row(r).transpose();
    }
    for (int k = lo; k < hi; ++k) {
      const int i = index.order[static_cast<std::size_t>(k)];
      if (data.status[i] == 1)
        grad += data.design.row(i).transpose() - s1 / s0;
    }
  }
  return grad;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double x) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
  });
}

}  // namespace

double lasso_penalty_max(const SurvivalDataset& data, const RiskIndex& index) {
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(data.n());
  return pll_gradient(data, index, eta).cwiseAbs().maxCoeff();
}

Eigen::VectorXd lasso_initial_mu(const SurvivalDataset& data,
                                 const RiskIndex& index, double penalty,
                                 int max_iter) {
  const Eigen::Index p = data.p();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double step = 1.0;
  double f = -partial_log_likelihood(data, index,
                                     Eigen::VectorXd::Zero(data.n()));
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd eta = data.design * beta;
    const Eigen::VectorXd grad = -pll_gradient(data, index, eta);
    Eigen::VectorXd next;
    double f_next = 0.0;
    for (int halvings = 0;; ++halvings) {
      next = soft_threshold(beta - step * grad, step * penalty);
      const Eigen::VectorXd diff = next - beta;
      f_next = -partial_log_likelihood(data, index, data.design * next);
      const double bound =
          f + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (f_next <= bound + 1e-12 * std::abs(bound)) break;
      step *= 0.5;
      if (halvings >= 60)
        throw NumericError("lasso initializer: line search failed");
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    f = f_next;
    step *= 1.25;
    if (change < 1e-7) break;
  }
  return beta;
}

Eigen::VectorXd ridge_initial_mu(const SurvivalDataset& data,
                                 const RiskIndex& index, double penalty,
                                 int max_iter) {
  const Eigen::Index p = data.p();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  auto objective = [&](const Eigen::VectorXd& b) {
    return -partial_log_likelihood(data, index, data.design * b) +
           0.5 * penalty * b.squaredNorm();
  };
  double f = objective(beta);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd eta = data.design * beta;
    const Eigen::VectorXd grad = -pll_gradient(data, index, eta) + penalty * beta;

    // negative Hessian of l_p accumulated over risk-set prefixes
    Eigen::MatrixXd hess = penalty * Eigen::MatrixXd::Identity(p, p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    double s0 = 0.0;
    double shift = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < index.n_groups(); ++g) {
      const int lo = index.group_offsets[static_cast<std::size_t>(g)];
      const int hi = index.group_offsets[static_cast<std::size_t>(g) + 1];
      for (int k = lo; k < hi; ++k) {
        const int r = index.order[static_cast<std::size_t>(k)];
        if (eta[r] > shift) {
          const double c = (s0 > 0.0) ? std::exp(shift - eta[r]) : 0.0;
          s0 *= c;
          s1 *= c;
          s2 *= c;
          shift = eta[r];
        }
        const double w = std::exp(eta[r] - shift);
        const Eigen::VectorXd xr = data.design.row(r).transpose();
        s0 += w;
        s1 += w * xr;
        s2.selfadjointView<Eigen::Lower>().rankUpdate(xr, w);
      }
      for (int k = lo; k < hi; ++k) {
        const int i = index.order[static_cast<std::size_t>(k)];
        if (data.status[i] == 1) {
          const Eigen::VectorXd mean = s1 / s0;
          hess += Eigen::MatrixXd(s2.selfadjointView<Eigen::Lower>()) / s0 -
                  mean * mean.transpose();
        }
      }
    }

    const Eigen::VectorXd dir = -hess.ldlt().solve(grad);
    if (!dir.allFinite())
      throw NumericError("ridge initializer: Newton solve failed");
    double stepsize = 1.0;
    double f_next = 0.0;
    Eigen::VectorXd next;
    const double slope = grad.dot(dir);
    for (int halvings = 0;; ++halvings) {
      next = beta + stepsize * dir;
      f_next = objective(next);
      if (f_next <= f + 1e-4 * stepsize * slope) break;
      stepsize *= 0.5;
      if (halvings >= 40)
        throw NumericError("ridge initializer: line search failed");
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    f = f_next;
    if (change < 1e-9) break;
  }
  return beta;
}

VariationalParams initialize(const SurvivalDataset& data,
                             const FitOptions& options,
                             const PriorConfig& prior) {
  (void)prior;
  options.validate();
  const RiskIndex index = build_risk_index(data);
  const Eigen::Index p = data.p();
  VariationalParams params = VariationalParams::constant(
      p, 0.0, options.sigma_init, options.gamma_init);
  switch (options.init) {
    case InitStrategy::zero:
      break;
    case InitStrategy::file:
      if (options.init_mu.size() != p)
        throw DataError("init file vector has length " +
                        std::to_string(options.init_mu.size()) + ", expected " +
                        std::to_string(p));
      params.mu = options.init_mu;
      break;
    case InitStrategy::lasso: {
      const double lmax = lasso_penalty_max(data, index);
      params.mu = lasso_initial_mu(data, index,
                                   options.init_penalty_scale * lmax);
      break;
    }
    case InitStrategy::ridge: {
      const double lmax = lasso_penalty_max(data, index);
      params.mu = ridge_initial_mu(data, index,
                                   options.init_penalty_scale * lmax);
      break;
    }
  }
  return params;
}

FitResult fit(const SurvivalDataset& data, const PriorConfig& prior,
              const FitOptions& options, const ElboHook& elbo_hook) {
  prior.validate();
  options.validate();
  const RiskIndex index = build_risk_index(data);
  const Eigen::Index p = data.p();

  FitResult result;
  result.params = initialize(data, options, prior);
  SlabWeightCache cache(data.design, result.params);

  if (elbo_hook)
    result.trace.push_back({0, 0.0, elbo_hook(result.params)});

  const double log_sigma_lo = std::log(kSigmaLo);
  const double log_sigma_hi = std::log(kSigmaHi);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    if (cache.updates_since_rebuild() >= p)
      cache.rebuild(data.design, result.params);  // bound incremental drift
    double delta = 0.0;
    for (int j = 0; j < p; ++j) {
      const Eigen::VectorXd excluded = cache.exclude(j);
      CoordinateState state{&data, &index, &prior, &excluded, j,
                            result.params.mu[j], result.params.sigma[j]};
      double mu_new = 0.0, sigma_new = 0.0, gamma_new = 0.0;
      try {
        mu_new = brent_minimize(
                     [&](double m) { return objective_mu(m, state); },
                     state.mu - options.brent_bracket,
                     state.mu + options.brent_bracket, options.brent_tol)
                     .x;
        state.mu = mu_new;
        const double log_sigma =
            brent_minimize(
                [&](double u) { return objective_sigma(std::exp(u), state); },
                log_sigma_lo, log_sigma_hi, options.brent_tol)
                .x;
        sigma_new = std::exp(log_sigma);
        state.sigma = sigma_new;
        gamma_new = sigmoid(gamma_logit(state));
      } catch (const NumericError& e) {
        throw NumericError("iteration " + std::to_string(iter) +
                               ", coordinate " + std::to_string(j + 1) + ": " +
                               e.what(),
                           e.abscissa());
      }
      delta += std::abs(mu_new - result.params.mu[j]) +
               std::abs(sigma_new - result.params.sigma[j]) +
               std::abs(gamma_new - result.params.gamma[j]);
      result.params.mu[j] = mu_new;
      result.params.sigma[j] = sigma_new;
      result.params.gamma[j] = gamma_new;
      cache.set_coordinate(data.design, j, mu_new, sigma_new, gamma_new);
    }
    result.iterations = iter;
    result.trace.push_back(
        {iter, delta,
         elbo_hook ? std::optional<double>(elbo_hook(result.params))
                   : std::nullopt});
    if (delta < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.beta_hat = posterior_mean(result.params);
  return result;
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_array())
    throw DataError(std::string("fit result: missing or non-array field '") +
                    field + "'");
  const auto& arr = doc[field];
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw DataError(std::string("fit result: field '") + field +
                      "' has a non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string fit_result_to_json(const FitResult& result,
                               const PriorConfig& prior,
                               const std::vector<std::string>& feature_names) {
  nlohmann::json doc;
  doc["mu"] = vec_to_json(result.params.mu);
  doc["sigma"] = vec_to_json(result.params.sigma);
  doc["gamma"] = vec_to_json(result.params.gamma);
  doc["beta_hat"] = vec_to_json(result.beta_hat);
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["lambda"] = prior.lambda;
  doc["a0"] = prior.a0;
  doc["b0"] = prior.b0;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& entry : result.trace) {
    nlohmann::json e;
    e["iter"] = entry.iter;
    e["delta"] = entry.delta;
    if (entry.elbo) e["elbo"] = *entry.elbo;
    trace.push_back(e);
  }
  doc["trace"] = trace;
  if (!feature_names.empty()) doc["feature_names"] = feature_names;
  return doc.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text, PriorConfig& prior,
                               std::vector<std::string>* feature_names) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("fit result: invalid JSON: ") + e.what());
  }
  FitResult result;
  result.params.mu = vec_from_json(doc, "mu");
  result.params.sigma = vec_from_json(doc, "sigma");
  result.params.gamma = vec_from_json(doc, "gamma");
  result.beta_hat = vec_from_json(doc, "beta_hat");
  const Eigen::Index p = result.params.mu.size();
  if (result.params.sigma.size() != p || result.params.gamma.size() != p ||
      result.beta_hat.size() != p)
    throw DataError(
        "fit result: fields 'mu', 'sigma', 'gamma', 'beta_hat' must have "
        "equal lengths");
  for (const char* f : {"iterations", "converged"})
    if (!doc.contains(f))
      throw DataError(std::string("fit result: missing field '") + f + "'");
  result.iterations = doc["iterations"].get<int>();
  result.converged = doc["converged"].get<bool>();
  for (const char* f : {"lambda", "a0", "b0"})
    if (!doc.contains(f) || !doc[f].is_number())
      throw DataError(std::string("fit result: missing or non-numeric field '") +
                      f + "'");
  prior.lambda = doc["lambda"].get<double>();
  prior.a0 = doc["a0"].get<double>();
  prior.b0 = doc["b0"].get<double>();
  if (doc.contains("trace")) {
    for (const auto& e : doc["trace"]) {
      TraceEntry entry;
      entry.iter = e.at("iter").get<int>();
      entry.delta = e.at("delta").get<double>();
      if (e.contains("elbo")) entry.elbo = e["elbo"].get<double>();
      result.trace.push_back(entry);
    }
  }
  if (feature_names) {
    feature_names->clear();
    if (doc.contains("feature_names"))
      for (const auto& name : doc["feature_names"])
        feature_names->push_back(name.get<std::string>());
  }
  result.params.validate();
  prior.validate();
  return result;
}

}  // namespace svb
