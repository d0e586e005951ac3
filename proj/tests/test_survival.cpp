#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "svb/errors.hpp"
#include "svb/survival.hpp"
#include "test_util.hpp"

using namespace svb;
using test::make_dataset;

TEST_CASE("risk index orders by descending time") {
  auto data = make_dataset({3, 1, 2}, {1, 1, 1}, Eigen::MatrixXd::Zero(3, 1));
  auto idx = build_risk_index(data);
  CHECK(idx.order == std::vector<int>{0, 2, 1});
  CHECK(idx.n_events == 3);

  // risk-set size of the event in group g equals the prefix length
  std::vector<int> sizes;
  for (int g = 0; g < idx.n_groups(); ++g)
    sizes.push_back(idx.group_offsets[g + 1]);
  CHECK(sizes == std::vector<int>{1, 2, 3});
  for (Eigen::Index i = 0; i < 3; ++i) {
    auto rs = test::naive_risk_set(data, static_cast<int>(i));
    // prefix end for observation i's group
    int pos = 0;
    while (idx.order[pos] != i) ++pos;
    int g = 0;
    while (idx.group_offsets[g + 1] <= pos) ++g;
    CHECK(static_cast<int>(rs.size()) == idx.group_offsets[g + 1]);
  }
}

TEST_CASE("risk index: singleton") {
  auto data = make_dataset({5}, {1}, Eigen::MatrixXd::Zero(1, 1));
  auto idx = build_risk_index(data);
  CHECK(idx.order == std::vector<int>{0});
  CHECK(idx.n_groups() == 1);
}

TEST_CASE("risk index: tied times share one group") {
  auto data = make_dataset({2, 2, 1}, {1, 0, 1}, Eigen::MatrixXd::Zero(3, 1));
  auto idx = build_risk_index(data);
  REQUIRE(idx.n_groups() == 2);
  CHECK(idx.group_offsets == std::vector<int>{0, 2, 3});
  // R(t=2) holds both tied observations, R(t=1) all three
  CHECK(test::naive_risk_set(data, 0).size() == 2);
  CHECK(test::naive_risk_set(data, 2).size() == 3);
}

TEST_CASE("risk index rejects event-free data") {
  auto data = make_dataset({1, 2}, {0, 0}, Eigen::MatrixXd::Zero(2, 1));
  CHECK_THROWS_AS(build_risk_index(data), DataError);
}

TEST_CASE("order composed with its inverse is the identity") {
  Rng rng = make_rng(7);
  auto data = test::random_dataset(57, 2, rng);
  auto idx = build_risk_index(data);
  std::vector<int> inverse(idx.order.size());
  for (std::size_t k = 0; k < idx.order.size(); ++k)
    inverse[static_cast<std::size_t>(idx.order[k])] = static_cast<int>(k);
  for (std::size_t i = 0; i < idx.order.size(); ++i)
    CHECK(idx.order[static_cast<std::size_t>(inverse[i])] == static_cast<int>(i));
}

TEST_CASE("partial log-likelihood: single observation gives zero") {
  auto data = make_dataset({2}, {1}, Eigen::MatrixXd::Constant(1, 1, 3.0));
  auto idx = build_risk_index(data);
  for (double b : {-2.0, 0.0, 1.7}) {
    Eigen::VectorXd beta(1);
    beta << b;
    CHECK(partial_log_likelihood_beta(data, idx, beta) == doctest::Approx(0.0));
  }
}

TEST_CASE("partial log-likelihood at beta = 0 counts risk-set sizes") {
  auto data = make_dataset({1, 2, 3}, {1, 1, 1}, Eigen::MatrixXd::Zero(3, 1));
  auto idx = build_risk_index(data);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(1);
  CHECK(partial_log_likelihood_beta(data, idx, beta) ==
        doctest::Approx(-(std::log(3.0) + std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("partial log-likelihood: two-observation closed form") {
  Eigen::MatrixXd design(2, 1);
  design << 1, 0;
  auto data = make_dataset({1, 2}, {1, 1}, design);
  auto idx = build_risk_index(data);
  Eigen::VectorXd beta(1);
  beta << 1;
  CHECK(partial_log_likelihood_beta(data, idx, beta) ==
        doctest::Approx(1.0 - std::log(std::exp(1.0) + 1.0)).epsilon(1e-12));
}

TEST_CASE("partial log-likelihood rejects non-finite beta") {
  auto data = make_dataset({1, 2}, {1, 1}, Eigen::MatrixXd::Zero(2, 1));
  auto idx = build_risk_index(data);
  Eigen::VectorXd beta(1);
  beta << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(partial_log_likelihood_beta(data, idx, beta), NumericError);
}

TEST_CASE("prefix evaluation matches the n^2 reference on random data") {
  Rng rng = make_rng(1234);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    std::uniform_int_distribution<int> nn(2, 200);
    const int n = nn(rng);
    auto data = test::random_dataset(n, 3, rng);
    auto idx = build_risk_index(data);
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) eta[i] = 2.0 * stdnorm(rng);
    const double fast = partial_log_likelihood(data, idx, eta);
    const double slow = test::naive_pll(data, eta);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("likelihood is invariant to an intercept shift") {
  Rng rng = make_rng(99);
  auto data = test::random_dataset(40, 2, rng);
  auto idx = build_risk_index(data);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  Eigen::VectorXd eta(40);
  for (int i = 0; i < 40; ++i) eta[i] = stdnorm(rng);
  const double base = partial_log_likelihood(data, idx, eta);
  for (double c : {-7.0, 0.3, 55.0}) {
    const Eigen::VectorXd shifted_eta = eta.array() + c;
    const double shifted = partial_log_likelihood(data, idx, shifted_eta);
    CHECK(shifted == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("log-sum-exp accumulator is shift invariant") {
  Rng rng = make_rng(5);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  std::vector<double> values(37);
  for (auto& v : values) v = 3.0 * stdnorm(rng);
  for (double shift : {-500.0, 500.0}) {
    LogSumExp base, moved;
    for (double v : values) {
      base.add(v);
      moved.add(v + shift);
    }
    CHECK(moved.value() - shift ==
          doctest::Approx(base.value()).epsilon(1e-12));
  }
}

TEST_CASE("prognostic index") {
  Eigen::MatrixXd design(2, 2);
  design << 1, 0, 0, 1;
  auto data = make_dataset({1, 2}, {1, 1}, design);
  Eigen::VectorXd beta(2);
  beta << 1, 2;
  Eigen::VectorXd eta = prognostic_index(data, beta);
  CHECK(eta[0] == doctest::Approx(1.0));
  CHECK(eta[1] == doctest::Approx(2.0));

  CHECK(prognostic_index(data, Eigen::VectorXd::Zero(2)).isZero());

  Eigen::MatrixXd ones(1, 2);
  ones << 1, 1;
  auto one_row = make_dataset({1}, {1}, ones);
  Eigen::VectorXd anti(2);
  anti << 0.5, -0.5;
  CHECK(prognostic_index(one_row, anti)[0] == doctest::Approx(0.0));
}

TEST_CASE("c-index on hand-enumerated examples") {
  auto data = make_dataset({1, 2, 3}, {1, 1, 1}, Eigen::MatrixXd::Zero(3, 1));
  Eigen::VectorXd eta(3);

  eta << 3, 2, 1;  // perfect anti-monotone ordering
  CHECK(c_index(data, eta).value() == doctest::Approx(1.0));

  eta << 3, 1, 2;  // brute force over pairs: 2 of 3 concordant
  CHECK(c_index(data, eta).value() == doctest::Approx(2.0 / 3.0));

  eta << 1, 1, 1;  // strict inequality scores ties as zero
  CHECK(c_index(data, eta).value() == doctest::Approx(0.0));
  CHECK(c_index(data, eta, true).value() == doctest::Approx(0.5));
}

TEST_CASE("c-index is undefined without comparable pairs") {
  auto data = make_dataset({1, 2}, {0, 1}, Eigen::MatrixXd::Zero(2, 1));
  Eigen::VectorXd eta(2);
  eta << 1, 0;
  CHECK_FALSE(c_index(data, eta).has_value());
}

TEST_CASE("c-index range and sign-flip complement on tie-free data") {
  Rng rng = make_rng(31);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 30;
    SurvivalDataset data;
    data.times.resize(n);
    data.status.resize(n);
    data.design = Eigen::MatrixXd::Zero(n, 1);
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) {
      data.times[i] = std::exp(stdnorm(rng));  // continuous, tie-free
      data.status[i] = i % 3 == 0 ? 0 : 1;
      eta[i] = stdnorm(rng);
    }
    const double c = c_index(data, eta).value();
    const double flipped = c_index(data, -eta).value();
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(c + flipped == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("csv round trip preserves the dataset bit for bit") {
  Rng rng = make_rng(77);
  auto data = test::random_dataset(23, 4, rng);
  data.feature_names = {"g1", "g2", "g3", "g4"};
  const auto path =
      (std::filesystem::temp_directory_path() / "svb_test_data.csv").string();
  write_survival_csv(path, data);
  auto loaded = read_survival_csv(path);
  CHECK(loaded.times == data.times);
  CHECK(loaded.status == data.status);
  CHECK(loaded.design == data.design);
  CHECK(loaded.feature_names == data.feature_names);
  std::filesystem::remove(path);
}

TEST_CASE("csv reader reports offending line numbers") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "svb_bad.csv").string();
  {
    std::ofstream out(path);
    out << "time,status,x1\n1.0,1,0.5\n-2.0,1,0.1\n";
  }
  CHECK(test::throws_with<DataError>([&] { read_survival_csv(path); },
                                     "line 3"));
  {
    std::ofstream out(path);
    out << "time,status,x1\n1.0,2,0.5\n";
  }
  CHECK(test::throws_with<DataError>([&] { read_survival_csv(path); },
                                     "status"));
  {
    std::ofstream out(path);
    out << "t,status,x1\n1.0,1,0.5\n";
  }
  CHECK_THROWS_AS(read_survival_csv(path), DataError);
  std::filesystem::remove(path);
}
