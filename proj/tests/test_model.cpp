#include <doctest.h>

#include <cmath>

#include "svb/errors.hpp"
#include "svb/model.hpp"
#include "test_util.hpp"

using namespace svb;

TEST_CASE("folded normal mean: closed forms") {
  CHECK(folded_normal_mean(0.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK(folded_normal_mean(3.0, 1e-8) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(folded_normal_mean(1.0, 0.0), DataError);
  CHECK_THROWS_AS(folded_normal_mean(1.0, -1.0), DataError);
}

TEST_CASE("folded normal mean agrees with Monte Carlo for N(1, 4)") {
  Rng rng = make_rng(42);
  std::normal_distribution<double> draw(1.0, 2.0);
  const int n = 10'000'000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(draw(rng));
    sum += a;
    sumsq += a * a;
  }
  const double mc_mean = sum / n;
  const double mc_se =
      std::sqrt((sumsq / n - mc_mean * mc_mean) / static_cast<double>(n));
  const double closed = folded_normal_mean(1.0, 2.0);
  CHECK(std::abs(closed - mc_mean) < 3.0 * mc_se);
  CHECK(closed == doctest::Approx(1.79119).epsilon(1e-4));
}

TEST_CASE("folded normal mean: symmetry and lower bound") {
  for (double mu : {-2.5, -0.3, 0.0, 0.7, 4.0}) {
    for (double sigma : {0.05, 0.4, 1.0, 3.0}) {
      CHECK(folded_normal_mean(mu, sigma) ==
            doctest::Approx(folded_normal_mean(-mu, sigma)).epsilon(1e-13));
      CHECK(folded_normal_mean(mu, sigma) >= std::abs(mu) - 1e-14);
    }
  }
}

TEST_CASE("folded normal mean derivative matches finite differences") {
  const double h = 1e-5;
  for (double mu : {-1.5, -0.2, 0.0, 0.4, 2.0}) {
    for (double sigma : {0.1, 0.8, 2.0}) {
      const double fd = (folded_normal_mean(mu + h, sigma) -
                         folded_normal_mean(mu - h, sigma)) /
                        (2.0 * h);
      const double analytic = 1.0 - 2.0 * normal_cdf(-mu / sigma);
      CHECK(std::abs(fd - analytic) < 1e-6);
    }
  }
}

TEST_CASE("log slab moment is the quadratic") {
  CHECK(log_slab_moment(0.0, 5.0, 2.0) == doctest::Approx(0.0));
  CHECK(log_slab_moment(2.0, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(log_slab_moment(1.0, 2.0, 0.1) == doctest::Approx(2.005));
}

TEST_CASE("log mixture factor: endpoints and hand value") {
  CHECK(log_mixture_factor(0.0, 123.0) == doctest::Approx(0.0));
  CHECK(log_mixture_factor(1.0, -3.5) == doctest::Approx(-3.5).epsilon(1e-13));
  CHECK(log_mixture_factor(1.0, 800.0) == doctest::Approx(800.0));
  CHECK(log_mixture_factor(0.5, std::log(3.0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("log mixture factor stays finite and monotone at extremes") {
  CHECK(std::isfinite(log_mixture_factor(0.3, 1e4)));
  CHECK(std::isfinite(log_mixture_factor(0.3, -1e4)));
  CHECK(log_mixture_factor(0.3, -1e4) ==
        doctest::Approx(std::log(0.7)).epsilon(1e-10));

  // nondecreasing in m; nondecreasing in gamma when m > 0
  double prev = -1e18;
  for (double m : {-20.0, -1.0, 0.0, 0.5, 3.0, 40.0}) {
    const double v = log_mixture_factor(0.4, m);
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1e18;
  for (double g : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const double v = log_mixture_factor(g, 2.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("slab KL term is nonnegative and matches Monte Carlo") {
  Rng rng = make_rng(2024);
  std::uniform_real_distribution<double> umu(-2.0, 2.0);
  std::uniform_real_distribution<double> usig(0.05, 2.0);
  std::uniform_real_distribution<double> ulam(0.2, 4.0);
  const int B = 400'000;
  for (int rep = 0; rep < 20; ++rep) {
    const double mu = umu(rng), sigma = usig(rng), lambda = ulam(rng);
    const double closed = kl_normal_laplace(mu, sigma, lambda);
    CHECK(closed >= -1e-12);

    // MC estimate of E_N[log N(b; mu, sigma) - log Laplace(b; lambda)]
    std::normal_distribution<double> draw(mu, sigma);
    double sum = 0.0, sumsq = 0.0;
    const double log_norm_const = -std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
    const double log_lap_const = std::log(lambda / 2.0);
    for (int b = 0; b < B; ++b) {
      const double x = draw(rng);
      const double z = (x - mu) / sigma;
      const double v = (log_norm_const - 0.5 * z * z) -
                       (log_lap_const - lambda * std::abs(x));
      sum += v;
      sumsq += v * v;
    }
    const double mc = sum / B;
    const double se = std::sqrt((sumsq / B - mc * mc) / B);
    CHECK(std::abs(closed - mc) < 3.0 * se + 1e-9);
  }
}

TEST_CASE("KL(Q || prior) at gamma = 0 is the closed spike value") {
  PriorConfig prior{1.0, 2.0, 3.0};
  auto params = VariationalParams::constant(4, 0.7, 0.3, 0.0);
  CHECK(kl_q_prior(params, prior) ==
        doctest::Approx(4.0 * std::log((2.0 + 3.0) / 3.0)).epsilon(1e-9));

  // prior collapses onto the spike as b0 grows; KL tends to zero
  PriorConfig diffuse{1.0, 1.0, 1e12};
  CHECK(kl_q_prior(params, diffuse) < 1e-9);
}

TEST_CASE("KL(Q || prior) matches a Monte Carlo density-ratio estimate") {
  PriorConfig prior{1.0, 1.0, 1.0};
  VariationalParams params = VariationalParams::constant(1, 0.0, 1.0, 0.5);
  const double closed = kl_q_prior(params, prior);

  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> slab(0.0, 1.0);
  const double w = prior.w_bar();
  const int B = 2'000'000;
  double sum = 0.0, sumsq = 0.0;
  for (int b = 0; b < B; ++b) {
    double v;
    if (unif(rng) < 0.5) {
      const double x = slab(rng);
      const double log_q = std::log(0.5) - 0.5 * std::log(2.0 * M_PI) -
                           0.5 * x * x;
      const double log_pi =
          std::log(w) + std::log(0.5) - std::abs(x);  // lambda = 1
      v = log_q - log_pi;
    } else {
      v = std::log((1.0 - 0.5) / (1.0 - w));
    }
    sum += v;
    sumsq += v * v;
  }
  const double mc = sum / B;
  const double se = std::sqrt((sumsq / B - mc * mc) / B);
  CHECK(std::abs(closed - mc) < 3.0 * se + 1e-9);
  CHECK(closed >= 0.0);
}

TEST_CASE("sampling from Q: degenerate cases and inclusion frequency") {
  auto zero_params = VariationalParams::constant(3, 1.0, 0.5, 0.0);
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 20; ++rep)
    CHECK(sample_from_q(zero_params, rng).isZero());

  auto tight = VariationalParams::constant(2, -1.5, 1e-12, 1.0);
  const Eigen::VectorXd draw = sample_from_q(tight, rng);
  CHECK(draw[0] == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(draw[1] == doctest::Approx(-1.5).epsilon(1e-9));

  auto half = VariationalParams::constant(1, 0.0, 1.0, 0.5);
  const int B = 1'000'000;
  int nonzero = 0;
  for (int b = 0; b < B; ++b)
    if (sample_from_q(half, rng)[0] != 0.0) ++nonzero;
  const double frac = static_cast<double>(nonzero) / B;
  CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / B));
}

TEST_CASE("posterior mean is gamma * mu") {
  VariationalParams params;
  params.mu = Eigen::Vector3d(2.0, -1.0, 0.5);
  params.sigma = Eigen::Vector3d(1.0, 1.0, 1.0);
  params.gamma = Eigen::Vector3d(1.0, 0.0, 0.5);
  const Eigen::VectorXd mean = posterior_mean(params);
  CHECK(mean[0] == doctest::Approx(2.0));
  CHECK(mean[1] == doctest::Approx(0.0));
  CHECK(mean[2] == doctest::Approx(0.25));
}

TEST_CASE("normal quantile inverts the CDF") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-9})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK_THROWS_AS(normal_quantile(0.0), DataError);
}

TEST_CASE("variational params JSON round trip and schema errors") {
  VariationalParams params;
  params.mu = Eigen::Vector2d(0.25, -1.0);
  params.sigma = Eigen::Vector2d(0.5, 2.0);
  params.gamma = Eigen::Vector2d(0.9, 0.1);
  PriorConfig prior{2.0, 1.0, 10.0};
  const std::string text = params_to_json(params, prior);

  VariationalParams loaded;
  PriorConfig loaded_prior;
  params_from_json(text, loaded, loaded_prior);
  CHECK(loaded.mu == params.mu);
  CHECK(loaded.sigma == params.sigma);
  CHECK(loaded.gamma == params.gamma);
  CHECK(loaded_prior.lambda == prior.lambda);

  CHECK(svb::test::throws_with<DataError>(
      [&] {
        VariationalParams x;
        PriorConfig pr;
        params_from_json("{\"mu\": [0], \"sigma\": [1]}", x, pr);
      },
      "gamma"));
}
