#include <doctest.h>

#include <cmath>

#include "cosub/common.hpp"
#include "cosub/distributions.hpp"
#include "test_support.hpp"

using namespace cosub;

TEST_SUITE_BEGIN("distributions");

TEST_CASE("gamma moments") {
  RngStream rng(11);
  const int N = 100000;
  SUBCASE("shape 2.5 rate 1 mean") {
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_gamma(2.5, 1.0, rng);
    const auto m = testsup::moments(draws);
    CHECK(std::fabs(m.mean - 2.5) < 4 * m.se_mean);
  }
  SUBCASE("shape 1 rate 1 is exponential") {
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_gamma(1.0, 1.0, rng);
    const auto m = testsup::moments(draws);
    CHECK(std::fabs(m.mean - 1.0) < 4 * m.se_mean);
  }
  SUBCASE("shape 3.5 rate 2 variance") {
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_gamma(3.5, 2.0, rng);
    const auto m = testsup::moments(draws);
    // SE of a variance estimate: sqrt((m4 - var^2)/N).
    double m4 = 0.0;
    for (double d : draws) m4 += std::pow(d - m.mean, 4);
    m4 /= N;
    const double se_var = std::sqrt((m4 - m.variance * m.variance) / N);
    CHECK(std::fabs(m.variance - 0.875) < 4 * se_var);
  }
  SUBCASE("small shapes stay positive") {
    for (int i = 0; i < 2000; ++i) CHECK(sample_gamma(1.0 / 15.0, 1.0, rng) >= 0.0);
  }
  SUBCASE("rejects bad parameters") {
    CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), SamplingError);
    CHECK_THROWS_AS(sample_gamma(1.0, -2.0, rng), SamplingError);
  }
}

TEST_CASE("dirichlet moments and support") {
  RngStream rng(12);
  const int N = 100000;
  SUBCASE("alpha (1,1)") {
    std::vector<double> first(N);
    for (auto& d : first) d = sample_dirichlet(std::vector<double>{1.0, 1.0}, rng)[0];
    const auto m = testsup::moments(first);
    CHECK(std::fabs(m.mean - 0.5) < 4 * m.se_mean);
  }
  SUBCASE("alpha (2,1,1)") {
    std::vector<double> a(N), b(N), c(N);
    for (int i = 0; i < N; ++i) {
      const auto draw = sample_dirichlet(std::vector<double>{2.0, 1.0, 1.0}, rng);
      a[i] = draw[0];
      b[i] = draw[1];
      c[i] = draw[2];
    }
    const auto ma = testsup::moments(a), mb = testsup::moments(b), mc = testsup::moments(c);
    CHECK(std::fabs(ma.mean - 0.5) < 4 * ma.se_mean);
    CHECK(std::fabs(mb.mean - 0.25) < 4 * mb.se_mean);
    CHECK(std::fabs(mc.mean - 0.25) < 4 * mc.se_mean);
  }
  SUBCASE("every draw lies on the simplex") {
    const std::vector<double> alpha{0.5, 1.0 / 15.0, 3.0};
    for (int i = 0; i < 2000; ++i) {
      const auto draw = sample_dirichlet(alpha, rng);
      double total = 0.0;
      for (double x : draw) {
        REQUIRE(x >= 0.0);
        total += x;
      }
      REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("rejects nonpositive alpha") {
    CHECK_THROWS_AS(sample_dirichlet(std::vector<double>{1.0, 0.0}, rng), SamplingError);
  }
}

TEST_CASE("categorical draws") {
  RngStream rng(13);
  SUBCASE("degenerate mass") {
    for (int i = 0; i < 100; ++i) {
      CHECK(sample_categorical(std::vector<double>{0.0, 1.0, 0.0}, rng) == 1);
    }
  }
  SUBCASE("uniform pair frequency") {
    const int N = 100000;
    int ones = 0;
    for (int i = 0; i < N; ++i) ones += sample_categorical(std::vector<double>{1.0, 1.0}, rng);
    const double freq = static_cast<double>(ones) / N;
    CHECK(std::fabs(freq - 0.5) < 4 * std::sqrt(0.25 / N));
  }
  SUBCASE("log weights (0, log 3)") {
    const int N = 100000;
    int ones = 0;
    const std::vector<double> logw{0.0, std::log(3.0)};
    for (int i = 0; i < N; ++i) ones += sample_categorical_log(logw, rng);
    const double freq = static_cast<double>(ones) / N;
    CHECK(std::fabs(freq - 0.75) < 4 * std::sqrt(0.75 * 0.25 / N));
  }
  SUBCASE("log weights are translation invariant even when huge") {
    const std::vector<double> logw{-1200.0, -1200.0 + std::log(3.0)};
    const int N = 100000;
    int ones = 0;
    for (int i = 0; i < N; ++i) ones += sample_categorical_log(logw, rng);
    const double freq = static_cast<double>(ones) / N;
    CHECK(std::fabs(freq - 0.75) < 4 * std::sqrt(0.75 * 0.25 / N));
  }
  SUBCASE("rejects degenerate inputs") {
    CHECK_THROWS_AS(sample_categorical(std::vector<double>{0.0, 0.0}, rng), SamplingError);
    CHECK_THROWS_AS(sample_categorical(std::vector<double>{1.0, std::nan("")}, rng),
                    SamplingError);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sample_categorical_log(std::vector<double>{neg_inf, neg_inf}, rng),
                    SamplingError);
  }
}

TEST_CASE("gaussian and precision-parameterized draws") {
  RngStream rng(14);
  const int N = 100000;
  SUBCASE("variance 10") {
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_gaussian(0.0, 10.0, rng);
    const auto m = testsup::moments(draws);
    CHECK(m.variance == doctest::Approx(10.0).epsilon(0.05));
  }
  SUBCASE("identity precision, R=3") {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
    Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(3);
    const Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd eta = Eigen::VectorXd::Zero(3);
    const int M = 20000;
    std::vector<Eigen::VectorXd> draws;
    for (int i = 0; i < M; ++i) draws.push_back(sample_gaussian_precision(prec, eta, rng));
    for (const auto& d : draws) mean_acc += d / M;
    for (const auto& d : draws) cov += (d - mean_acc) * (d - mean_acc).transpose() / (M - 1);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        CHECK(cov(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(0.05).scale(1.0));
      }
    }
  }
  SUBCASE("diagonal precision gives inverse variances") {
    Eigen::MatrixXd prec(2, 2);
    prec << 4.0, 0.0, 0.0, 1.0;
    const Eigen::VectorXd eta = Eigen::VectorXd::Zero(2);
    std::vector<double> first(N / 2), second(N / 2);
    for (int i = 0; i < N / 2; ++i) {
      const auto d = sample_gaussian_precision(prec, eta, rng);
      first[i] = d[0];
      second[i] = d[1];
    }
    CHECK(testsup::moments(first).variance == doctest::Approx(0.25).epsilon(0.05));
    CHECK(testsup::moments(second).variance == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("correlated precision recovers the solve mean") {
    Eigen::MatrixXd prec(2, 2);
    prec << 2.0, 0.8, 0.8, 1.5;
    Eigen::VectorXd eta(2);
    eta << 1.0, -0.5;
    const Eigen::VectorXd mean = prec.llt().solve(eta);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(2);
    const int M = 200000;
    for (int i = 0; i < M; ++i) acc += sample_gaussian_precision(prec, eta, rng) / M;
    CHECK(acc[0] == doctest::Approx(mean[0]).epsilon(0.02).scale(1.0));
    CHECK(acc[1] == doctest::Approx(mean[1]).epsilon(0.02).scale(1.0));
  }
  SUBCASE("non-positive-definite precision raises") {
    Eigen::MatrixXd prec(2, 2);
    prec << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(sample_gaussian_precision(prec, Eigen::VectorXd::Zero(2), rng),
                    NumericError);
  }
}

TEST_CASE("multinomial totals and moments") {
  RngStream rng(15);
  const std::vector<double> p{0.5, 0.3, 0.2};
  double first = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const auto counts = sample_multinomial(50, p, rng);
    CHECK(counts[0] + counts[1] + counts[2] == 50);
    first += static_cast<double>(counts[0]) / N;
  }
  CHECK(first == doctest::Approx(25.0).epsilon(0.01));
}

TEST_CASE("polya-gamma moments against the analytic mean") {
  const int N = 100000;
  for (int b : {1, 2, 3}) {
    for (double c : {0.0, 1.0, 2.5}) {
      RngStream rng(1000 + b * 10 + static_cast<int>(c * 2));
      std::vector<double> draws(N);
      for (auto& d : draws) d = sample_polya_gamma(b, c, rng);
      const auto m = testsup::moments(draws);
      INFO("b=", b, " c=", c);
      CHECK(std::fabs(m.mean - testsup::pg_mean(b, c)) < 4 * m.se_mean);
    }
  }
}

TEST_CASE("polya-gamma is symmetric in c") {
  RngStream rng(77);
  const int N = 50000;
  std::vector<double> pos(N), neg(N);
  for (auto& d : pos) d = sample_polya_gamma(1, 1.5, rng);
  for (auto& d : neg) d = sample_polya_gamma(1, -1.5, rng);
  CHECK(testsup::ks_two_sample(pos, neg) < testsup::ks_two_sample_critical(N, N));
}

TEST_CASE("polya-gamma rejects b = 0") {
  RngStream rng(78);
  CHECK_THROWS_AS(sample_polya_gamma(0, 1.0, rng), SamplingError);
}

TEST_CASE("polya-gamma KS test against the series density") {
  const int N = 100000;
  for (double c : {0.0, 1.0, 2.5}) {
    RngStream rng(9000 + static_cast<int>(c * 4));
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_polya_gamma(1, c, rng);
    const auto cdf = testsup::pg1_cdf(c);
    const double d_stat = testsup::ks_statistic(draws, cdf);
    INFO("c=", c, " D=", d_stat);
    CHECK(d_stat < testsup::ks_critical(N));
  }
}

TEST_CASE("log_norm_cdf against high-precision references") {
  CHECK(log_norm_cdf(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(log_norm_cdf(1.0) == doctest::Approx(-0.17275377902344989).epsilon(1e-12));
  CHECK(log_norm_cdf(-5.0) == doctest::Approx(-15.064998393988726).epsilon(1e-10));
  // Both sides of the erfc/asymptotic switchover at -20.
  CHECK(log_norm_cdf(-20.0) == doctest::Approx(-203.91715537109726).epsilon(1e-8));
  CHECK(log_norm_cdf(-20.5) == doctest::Approx(-214.06672896326380).epsilon(1e-8));
  CHECK(log_norm_cdf(-60.0) == doctest::Approx(-1805.0135606805671).epsilon(1e-8));
}

TEST_SUITE_END();
