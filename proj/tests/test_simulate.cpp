#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "svb/errors.hpp"
#include "svb/simulate.hpp"
#include "test_util.hpp"

using namespace svb;

TEST_CASE("coefficient draws: support size and magnitude window") {
  SimConfig config;
  config.p = 10;

  Rng rng = make_rng(1);
  config.s = 0;
  CHECK(draw_coefficients(config, rng).beta0.isZero());

  config.s = 10;
  auto full = draw_coefficients(config, rng);
  CHECK(full.support.size() == 10);
  for (int j = 0; j < 10; ++j) {
    CHECK(std::abs(full.beta0[j]) >= 0.5);
    CHECK(std::abs(full.beta0[j]) <= 2.0);
  }
}

TEST_CASE("coefficient draws: signs are fair and magnitudes uniform") {
  SimConfig config;
  config.p = 1;
  config.s = 1;
  Rng rng = make_rng(2);
  const int n = 100000;
  std::vector<double> magnitudes;
  int positive = 0;
  for (int rep = 0; rep < n; ++rep) {
    const auto truth = draw_coefficients(config, rng);
    const double v = truth.beta0[0];
    if (v > 0) ++positive;
    magnitudes.push_back(std::abs(v));
  }
  const double frac = static_cast<double>(positive) / n;
  CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / n));

  // Kolmogorov-Smirnov against U(0.5, 2.0) at level 0.01
  std::sort(magnitudes.begin(), magnitudes.end());
  double d = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const double cdf = (magnitudes[i] - 0.5) / 1.5;
    const double hi = static_cast<double>(i + 1) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max(d, std::max(std::abs(hi - cdf), std::abs(cdf - lo)));
  }
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("independent design columns are uncorrelated") {
  SimConfig config;
  config.n = 100000;
  config.p = 2;
  Rng rng = make_rng(3);
  const Eigen::MatrixXd x = draw_design(config, rng);
  const Eigen::VectorXd a = x.col(0).array() - x.col(0).mean();
  const Eigen::VectorXd b = x.col(1).array() - x.col(1).mean();
  const double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("block design hits the target within-block correlation") {
  SimConfig config;
  config.n = 100000;
  config.p = 4;
  config.design = DesignKind::block;
  config.block_size = 2;
  config.rho = 0.6;
  Rng rng = make_rng(4);
  const Eigen::MatrixXd x = draw_design(config, rng);
  auto corr = [&](int i, int j) {
    const Eigen::VectorXd a = x.col(i).array() - x.col(i).mean();
    const Eigen::VectorXd b = x.col(j).array() - x.col(j).mean();
    return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
  };
  CHECK(std::abs(corr(0, 1) - 0.6) < 0.01);  // within block
  CHECK(std::abs(corr(2, 3) - 0.6) < 0.01);
  CHECK(std::abs(corr(0, 2)) < 0.01);        // across blocks
  CHECK(std::abs(corr(1, 3)) < 0.01);
  // unit marginal variance
  CHECK(std::abs(x.col(0).squaredNorm() / config.n - 1.0) < 0.02);
}

TEST_CASE("block size must divide p") {
  SimConfig config;
  config.p = 7;
  config.design = DesignKind::block;
  config.block_size = 2;
  CHECK_THROWS_AS(config.validate(), DataError);
}

TEST_CASE("survival draws: unit exponential baseline and censoring rate") {
  SimConfig config;
  config.n = 100000;
  config.p = 1;
  config.s = 0;

  Rng rng = make_rng(5);
  GroundTruth truth;
  truth.beta0 = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd design = draw_design(config, rng);

  config.censoring = 0.0;
  auto data = draw_survival(config, truth, design, rng);
  CHECK((data.status.array() == 1).all());
  CHECK(std::abs(data.times.mean() - 1.0) < 0.01);

  for (double c : {0.25, 0.4}) {
    config.censoring = c;
    auto censored = draw_survival(config, truth, design, rng);
    const double frac =
        1.0 - static_cast<double>(censored.status.sum()) / config.n;
    CHECK(std::abs(frac - c) < 0.005);
  }
}

TEST_CASE("generated datasets satisfy the dataset invariants") {
  for (std::uint64_t seed : {0ULL, 9ULL, 123ULL}) {
    SimConfig config;
    config.n = 50;
    config.p = 12;
    config.s = 3;
    config.censoring = 0.3;
    config.seed = seed;
    auto sim = simulate(config);
    CHECK_NOTHROW(sim.data.validate());
    CHECK(static_cast<int>(sim.truth.support.size()) == 3);
  }
}

TEST_CASE("simulation is reproducible under a fixed seed") {
  SimConfig config;
  config.n = 30;
  config.p = 5;
  config.s = 2;
  config.censoring = 0.2;
  config.seed = 42;
  auto a = simulate(config);
  auto b = simulate(config);
  CHECK(a.data.times == b.data.times);
  CHECK(a.data.status == b.data.status);
  CHECK(a.data.design == b.data.design);
  CHECK(a.truth.beta0 == b.truth.beta0);
}

TEST_CASE("external design: loading and width validation") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "svb_design.csv").string();
  {
    std::ofstream out(path);
    out << "0.5,1.0\n-1.0,2.0\n0.0,0.25\n";
  }
  SimConfig config;
  config.n = 3;
  config.p = 2;
  config.design = DesignKind::external;
  config.design_file = path;
  Rng rng = make_rng(6);
  const Eigen::MatrixXd x = draw_design(config, rng);
  CHECK(x(1, 0) == doctest::Approx(-1.0));
  CHECK(x(2, 1) == doctest::Approx(0.25));

  config.p = 3;
  CHECK_THROWS_AS(draw_design(config, rng), DataError);
  fs::remove(path);
}

TEST_CASE("metrics: perfect inclusion ranking") {
  GroundTruth truth;
  truth.beta0 = Eigen::Vector3d(1.0, 0.0, 0.0);
  truth.support = {0};
  Eigen::VectorXd inclusion(3);
  inclusion << 1.0, 0.0, 0.0;
  auto m = evaluate(truth.beta0, inclusion, {}, truth);
  CHECK(m.tpr == doctest::Approx(1.0));
  CHECK(m.fdr == doctest::Approx(0.0));
  CHECK(m.auc == doctest::Approx(1.0));
  CHECK(m.l2 == doctest::Approx(0.0));
  CHECK(m.l1 == doctest::Approx(0.0));
}

TEST_CASE("metrics: hand-enumerated mixed selection") {
  GroundTruth truth;
  truth.beta0 = Eigen::Vector3d(1.5, 0.0, 0.0);
  truth.support = {0};
  Eigen::VectorXd beta_hat(3);
  beta_hat << 1.0, 0.2, 0.0;
  Eigen::VectorXd inclusion(3);
  inclusion << 0.9, 0.6, 0.2;
  auto m = evaluate(beta_hat, inclusion, {}, truth);
  CHECK(m.selected == 2);
  CHECK(m.tpr == doctest::Approx(1.0));
  CHECK(m.fdr == doctest::Approx(0.5));
  // positives {0.9} against negatives {0.6, 0.2}: both pairs won
  CHECK(m.auc == doctest::Approx(1.0));
  CHECK(m.l2 == doctest::Approx(std::sqrt(0.25 + 0.04)));
  CHECK(m.l1 == doctest::Approx(0.7));
}

TEST_CASE("metrics: empty selection has zero FDR") {
  GroundTruth truth;
  truth.beta0 = Eigen::Vector2d(1.0, 0.0);
  truth.support = {0};
  Eigen::VectorXd inclusion(2);
  inclusion << 0.3, 0.2;
  auto m = evaluate(Eigen::VectorXd::Zero(2), inclusion, {}, truth);
  CHECK(m.selected == 0);
  CHECK(m.fdr == doctest::Approx(0.0));
  CHECK(m.tpr == doctest::Approx(0.0));
}

TEST_CASE("AUC is invariant under monotone transforms of the scores") {
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  GroundTruth truth;
  truth.beta0 = Eigen::VectorXd::Zero(12);
  truth.support = {1, 4, 7};
  for (int j : truth.support) truth.beta0[j] = 1.0;
  Eigen::VectorXd inclusion(12);
  for (int j = 0; j < 12; ++j) inclusion[j] = unif(rng);
  auto base = evaluate(truth.beta0, inclusion, {}, truth);
  Eigen::VectorXd squashed =
      inclusion.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-3.0 * v)); });
  auto moved = evaluate(truth.beta0, squashed, {}, truth);
  CHECK(base.auc == doctest::Approx(moved.auc).epsilon(1e-12));
}

TEST_CASE("metrics: credible-set coverage bookkeeping") {
  GroundTruth truth;
  truth.beta0 = Eigen::Vector3d(1.0, 0.0, 0.0);
  truth.support = {0};
  std::vector<CredibleSet> sets(3);
  sets[0] = {CredibleSetKind::interval, 0.8, 1.2, 0.95};            // covers 1.0
  sets[1] = {CredibleSetKind::zero_atom, 0.0, 0.0, 0.95};           // covers 0
  sets[2] = {CredibleSetKind::interval_plus_zero, 0.1, 0.3, 0.95};  // covers 0
  Eigen::VectorXd inclusion(3);
  inclusion << 1.0, 0.0, 0.4;
  auto m = evaluate(truth.beta0, inclusion, sets, truth);
  CHECK(m.coverage_nonzero == doctest::Approx(1.0));
  CHECK(m.coverage_zero == doctest::Approx(1.0));
  CHECK(m.size_nonzero == doctest::Approx(0.4));
  CHECK(m.size_zero == doctest::Approx(0.1));  // atom 0, interval 0.2
}
