#include "svb/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "svb/errors.hpp"

namespace svb {

DesignKind design_kind_from_string(const std::string& name) {
  if (name == "independent") return DesignKind::independent;
  if (name == "block") return DesignKind::block;
  if (name == "external") return DesignKind::external;
  throw DataError("unknown design setting '" + name + "'");
}

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::independent: return "independent";
    case DesignKind::block: return "block";
    case DesignKind::external: return "external";
  }
  return "?";
}

void SimConfig::validate() const {
  if (n < 1 || p < 1) throw DataError("n and p must be positive");
  if (s < 0 || s > p) throw DataError("s must satisfy 0 <= s <= p");
  if (!(censoring >= 0.0 && censoring < 1.0))
    throw DataError("censoring proportion must lie in [0, 1)");
  if (!(coef_low > 0.0) || !(coef_high >= coef_low))
    throw DataError("coefficient magnitude range must satisfy 0 < low <= high");
  if (design == DesignKind::block) {
    if (!(rho >= 0.0 && rho < 1.0))
      throw DataError("block correlation rho must lie in [0, 1)");
    if (block_size < 1 || p % block_size != 0)
      throw DataError("block_size must divide p");
  }
  if (design == DesignKind::external && design_file.empty())
    throw DataError("external design requires a design file");
}

GroundTruth draw_coefficients(const SimConfig& config, Rng& rng) {
  config.validate();
  GroundTruth truth;
  truth.beta0 = Eigen::VectorXd::Zero(config.p);

  std::vector<int> indices(static_cast<std::size_t>(config.p));
  std::iota(indices.begin(), indices.end(), 0);
  // Fisher-Yates prefix of length s
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < config.s; ++k) {
    const int remaining = config.p - k;
    const int pick =
        k + std::min(remaining - 1,
                     static_cast<int>(unif(rng) * remaining));
    std::swap(indices[static_cast<std::size_t>(k)],
              indices[static_cast<std::size_t>(pick)]);
  }
  truth.support.assign(indices.begin(), indices.begin() + config.s);
  std::sort(truth.support.begin(), truth.support.end());

  std::uniform_real_distribution<double> mag(config.coef_low, config.coef_high);
  for (int j : truth.support) {
    const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
    truth.beta0[j] = sign * mag(rng);
  }
  return truth;
}

namespace {

Eigen::MatrixXd load_external_design(const SimConfig& config) {
  std::ifstream in(config.design_file);
  if (!in) throw DataError("cannot open design file '" + config.design_file + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) numeric = false;
      } catch (...) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (line_no == 1 && rows.empty()) continue;  // header row
      throw DataError(config.design_file + ": line " + std::to_string(line_no) +
                      ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(config.design_file + ": line " + std::to_string(line_no) +
                      ": inconsistent field count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(config.design_file + ": no rows");
  if (static_cast<int>(rows.front().size()) != config.p)
    throw DataError(config.design_file + ": design has " +
                    std::to_string(rows.front().size()) + " columns, expected " +
                    std::to_string(config.p));
  if (static_cast<int>(rows.size()) < config.n)
    throw DataError(config.design_file + ": design has " +
                    std::to_string(rows.size()) + " rows, need " +
                    std::to_string(config.n));
  Eigen::MatrixXd design(config.n, config.p);
  for (int i = 0; i < config.n; ++i)
    for (int j = 0; j < config.p; ++j)
      design(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return design;
}

}  // namespace

Eigen::MatrixXd draw_design(const SimConfig& config, Rng& rng) {
  config.validate();
  if (config.design == DesignKind::external) return load_external_design(config);

  std::normal_distribution<double> stdnorm(0.0, 1.0);
  Eigen::MatrixXd design(config.n, config.p);
  for (int i = 0; i < config.n; ++i)
    for (int j = 0; j < config.p; ++j) design(i, j) = stdnorm(rng);
  if (config.design == DesignKind::independent) return design;

  // block design: unit diagonal, rho within consecutive blocks
  const int m = config.block_size;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(m, m, config.rho);
  cov.diagonal().setOnes();
  const Eigen::MatrixXd chol = cov.llt().matrixL();
  for (int b = 0; b < config.p / m; ++b)
    design.middleCols(b * m, m) = design.middleCols(b * m, m) * chol.transpose();
  return design;
}

SurvivalDataset draw_survival(const SimConfig& config, const GroundTruth& truth,
                              const Eigen::MatrixXd& design, Rng& rng) {
  config.validate();
  if (truth.beta0.size() != design.cols())
    throw DataError("truth and design dimensions disagree");
  if (design.rows() != config.n)
    throw DataError("design row count does not match config.n");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto positive_uniform = [&]() {
    double u;
    do { u = unif(rng); } while (u <= 0.0);
    return u;
  };

  SurvivalDataset data;
  data.times.resize(config.n);
  data.status.resize(config.n);
  data.design = design;
  const Eigen::VectorXd eta = design * truth.beta0;
  for (int i = 0; i < config.n; ++i) {
    double t = -std::log(positive_uniform()) * std::exp(-eta[i]);
    const bool event = unif(rng) > config.censoring;
    if (!event) t *= positive_uniform();  // replace by U(0, t)
    data.times[i] = t;
    data.status[i] = event ? 1 : 0;
  }
  data.feature_names.reserve(static_cast<std::size_t>(config.p));
  for (int j = 0; j < config.p; ++j)
    data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  Rng coef_rng = make_stream(config.seed, 1);
  Rng design_rng = make_stream(config.seed, 2);
  Rng survival_rng = make_stream(config.seed, 3);
  SimResult out;
  out.truth = draw_coefficients(config, coef_rng);
  const Eigen::MatrixXd design = draw_design(config, design_rng);
  out.data = draw_survival(config, out.truth, design, survival_rng);
  return out;
}

MetricsReport evaluate(const Eigen::VectorXd& beta_hat,
                       const Eigen::VectorXd& inclusion,
                       const std::vector<CredibleSet>& sets,
                       const GroundTruth& truth) {
  const Eigen::Index p = truth.beta0.size();
  if (beta_hat.size() != p || inclusion.size() != p)
    throw DataError("evaluate: dimension mismatch with truth");
  if (!sets.empty() && static_cast<Eigen::Index>(sets.size()) != p)
    throw DataError("evaluate: credible set count mismatch");

  MetricsReport m;
  m.l2 = (truth.beta0 - beta_hat).norm();
  m.l1 = (truth.beta0 - beta_hat).lpNorm<1>();

  std::vector<bool> in_support(static_cast<std::size_t>(p), false);
  for (int j : truth.support) in_support[static_cast<std::size_t>(j)] = true;
  const int s = static_cast<int>(truth.support.size());

  int tp = 0, fp = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (inclusion[j] > 0.5) {
      ++m.selected;
      if (in_support[static_cast<std::size_t>(j)]) ++tp; else ++fp;
    }
  }
  m.tpr = (s > 0) ? static_cast<double>(tp) / s : 1.0;
  m.fdr = static_cast<double>(fp) / std::max(1, m.selected);

  // Mann-Whitney rank statistic, ties credited 1/2
  if (s > 0 && s < p) {
    double wins = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!in_support[static_cast<std::size_t>(j)]) continue;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (in_support[static_cast<std::size_t>(k)]) continue;
        if (inclusion[j] > inclusion[k]) wins += 1.0;
        else if (inclusion[j] == inclusion[k]) wins += 0.5;
      }
    }
    m.auc = wins / (static_cast<double>(s) * static_cast<double>(p - s));
  } else {
    m.auc = std::numeric_limits<double>::quiet_NaN();
  }

  if (sets.empty()) {
    m.coverage_zero = m.coverage_nonzero = std::numeric_limits<double>::quiet_NaN();
    m.size_zero = m.size_nonzero = std::numeric_limits<double>::quiet_NaN();
  } else {
    int zero_n = 0, zero_cov = 0, nonzero_n = 0, nonzero_cov = 0;
    double zero_size = 0.0, nonzero_size = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& set = sets[static_cast<std::size_t>(j)];
      const bool covered = set.contains(truth.beta0[j]);
      if (in_support[static_cast<std::size_t>(j)]) {
        ++nonzero_n;
        nonzero_cov += covered;
        nonzero_size += set.size();
      } else {
        ++zero_n;
        zero_cov += covered;
        zero_size += set.size();
      }
    }
    m.coverage_zero = zero_n > 0 ? static_cast<double>(zero_cov) / zero_n
                                 : std::numeric_limits<double>::quiet_NaN();
    m.coverage_nonzero = nonzero_n > 0
                             ? static_cast<double>(nonzero_cov) / nonzero_n
                             : std::numeric_limits<double>::quiet_NaN();
    m.size_zero = zero_n > 0 ? zero_size / zero_n
                             : std::numeric_limits<double>::quiet_NaN();
    m.size_nonzero = nonzero_n > 0 ? nonzero_size / nonzero_n
                                   : std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

std::string truth_to_json(const GroundTruth& truth) {
  nlohmann::json doc;
  nlohmann::json beta = nlohmann::json::array();
  for (Eigen::Index j = 0; j < truth.beta0.size(); ++j)
    beta.push_back(truth.beta0[j]);
  doc["beta0"] = beta;
  doc["support"] = truth.support;
  return doc.dump(2) + "\n";
}

GroundTruth truth_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("truth: invalid JSON: ") + e.what());
  }
  if (!doc.contains("beta0") || !doc["beta0"].is_array())
    throw DataError("truth: missing or non-array field 'beta0'");
  if (!doc.contains("support") || !doc["support"].is_array())
    throw DataError("truth: missing or non-array field 'support'");
  GroundTruth truth;
  const auto& arr = doc["beta0"];
  truth.beta0.resize(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t j = 0; j < arr.size(); ++j)
    truth.beta0[static_cast<Eigen::Index>(j)] = arr[j].get<double>();
  for (const auto& idx : doc["support"])
    truth.support.push_back(idx.get<int>());
  return truth;
}

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& metrics) {
  nlohmann::json doc;
  doc["l2"] = metrics.l2;
  doc["l1"] = metrics.l1;
  doc["tpr"] = metrics.tpr;
  doc["fdr"] = metrics.fdr;
  doc["auc"] = number_or_null(metrics.auc);
  doc["selected"] = metrics.selected;
  doc["coverage_zero"] = number_or_null(metrics.coverage_zero);
  doc["coverage_nonzero"] = number_or_null(metrics.coverage_nonzero);
  doc["size_zero"] = number_or_null(metrics.size_zero);
  doc["size_nonzero"] = number_or_null(metrics.size_nonzero);
  return doc.dump(2) + "\n";
}

}  // namespace svb
