#include "svb/survival.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "svb/errors.hpp"

namespace svb {

void SurvivalDataset::validate() const {
  const Eigen::Index nn = times.size();
  if (nn < 1) throw DataError("dataset is empty");
  if (status.size() != nn)
    throw DataError("status length does not match times length");
  if (design.rows() != nn)
    throw DataError("design row count does not match times length");
  if (design.cols() < 1) throw DataError("design has no covariate columns");
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i]))
      throw DataError("times must be strictly positive and finite (observation " +
                      std::to_string(i + 1) + ")");
    if (status[i] != 0 && status[i] != 1)
      throw DataError("status must be 0 or 1 (observation " +
                      std::to_string(i + 1) + ")");
  }
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != design.cols())
    throw DataError("feature_names length does not match design columns");
  if (!design.allFinite()) throw DataError("design contains non-finite values");
}

SurvivalDataset SurvivalDataset::subset(const std::vector<int>& rows) const {
  SurvivalDataset out;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.times.resize(m);
  out.status.resize(m);
  out.design.resize(m, design.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    int r = rows[static_cast<std::size_t>(k)];
    out.times[k] = times[r];
    out.status[k] = status[r];
    out.design.row(k) = design.row(r);
  }
  out.feature_names = feature_names;
  return out;
}

RiskIndex build_risk_index(const SurvivalDataset& data) {
  data.validate();
  if (data.n_events() == 0)
    throw DataError("dataset has no observed events; nothing to fit");

  const int n = static_cast<int>(data.n());
  RiskIndex idx;
  idx.order.resize(static_cast<std::size_t>(n));
  std::iota(idx.order.begin(), idx.order.end(), 0);
  std::sort(idx.order.begin(), idx.order.end(), [&](int a, int b) {
    if (data.times[a] != data.times[b]) return data.times[a] > data.times[b];
    return a < b;  // deterministic within ties
  });

  idx.group_offsets.push_back(0);
  for (int k = 1; k < n; ++k) {
    if (data.times[idx.order[static_cast<std::size_t>(k)]] !=
        data.times[idx.order[static_cast<std::size_t>(k - 1)]])
      idx.group_offsets.push_back(k);
  }
  idx.group_offsets.push_back(n);

  for (int k = 0; k < n; ++k) {
    if (data.status[idx.order[static_cast<std::size_t>(k)]] == 1)
      idx.event_positions.push_back(k);
  }
  idx.n_events = static_cast<int>(idx.event_positions.size());
  return idx;
}

double partial_log_likelihood(const SurvivalDataset& data,
                              const RiskIndex& index,
                              const Eigen::VectorXd& eta) {
  double total = 0.0;
  LogSumExp acc;
  for (int g = 0; g < index.n_groups(); ++g) {
    const int lo = index.group_offsets[static_cast<std::size_t>(g)];
    const int hi = index.group_offsets[static_cast<std::size_t>(g) + 1];
    for (int k = lo; k < hi; ++k) acc.add(eta[index.order[static_cast<std::size_t>(k)]]);
    for (int k = lo; k < hi; ++k) {
      const int i = index.order[static_cast<std::size_t>(k)];
      if (data.status[i] == 1) total += eta[i] - acc.value();
    }
  }
  return total;
}

double partial_log_likelihood_beta(const SurvivalDataset& data,
                                   const RiskIndex& index,
                                   const Eigen::VectorXd& beta) {
  if (!beta.allFinite())
    throw NumericError("partial_log_likelihood: beta has non-finite entries");
  return partial_log_likelihood(data, index, prognostic_index(data, beta));
}

Eigen::VectorXd prognostic_index(const SurvivalDataset& data,
                                 const Eigen::VectorXd& beta) {
  if (beta.size() != data.p())
    throw DataError("beta length does not match design columns");
  if (!beta.allFinite())
    throw NumericError("prognostic_index: beta has non-finite entries");
  return data.design * beta;
}

std::optional<double> c_index(const SurvivalDataset& data,
                              const Eigen::VectorXd& eta, bool tie_credit) {
  const Eigen::Index n = data.n();
  if (eta.size() != n) throw DataError("eta length does not match dataset");
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // a pair is comparable when the earlier time is an observed event
      if (data.times[i] < data.times[j] && data.status[i] == 1) {
        den += 1.0;
        if (eta[i] > eta[j]) num += 1.0;
        else if (tie_credit && eta[i] == eta[j]) num += 0.5;
      } else if (data.times[j] < data.times[i] && data.status[j] == 1) {
        den += 1.0;
        if (eta[j] > eta[i]) num += 1.0;
        else if (tie_credit && eta[i] == eta[j]) num += 0.5;
      }
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, int line_no, const std::string& what) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  while (ptr < end && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  if (ec != std::errc{} || ptr != end)
    throw DataError("line " + std::to_string(line_no) + ": cannot parse " +
                    what + " value '" + s + "'");
  return v;
}

}  // namespace

SurvivalDataset read_survival_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "time" || header[1] != "status")
    throw DataError(path +
                    ": header must be `time,status,<covariates...>` with at "
                    "least one covariate column");
  const std::size_t p = header.size() - 2;

  std::vector<double> times;
  std::vector<int> status;
  std::vector<double> flat;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    double t = parse_double(fields[0], line_no, "time");
    if (!(t > 0.0))
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": time must be positive");
    double s = parse_double(fields[1], line_no, "status");
    if (s != 0.0 && s != 1.0)
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": status must be 0 or 1");
    times.push_back(t);
    status.push_back(static_cast<int>(s));
    for (std::size_t j = 0; j < p; ++j)
      flat.push_back(parse_double(fields[j + 2], line_no, "covariate"));
  }
  if (times.empty()) throw DataError(path + ": no data rows");

  SurvivalDataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  data.times = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  data.status = Eigen::Map<Eigen::VectorXi>(status.data(), n);
  data.design.resize(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j)
      data.design(i, j) = flat[static_cast<std::size_t>(i) * p +
                               static_cast<std::size_t>(j)];
  data.feature_names.assign(header.begin() + 2, header.end());
  data.validate();
  return data;
}

void write_survival_csv(const std::string& path, const SurvivalDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "time,status";
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (!data.feature_names.empty())
      out << ',' << data.feature_names[static_cast<std::size_t>(j)];
    else
      out << ",x" << (j + 1);
  }
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    put(data.times[i]);
    out << ',' << data.status[i];
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      out << ',';
      put(data.design(i, j));
    }
    out << '\n';
  }
}

}  // namespace svb
