#include <doctest.h>

#include "cosub/rng.hpp"
#include "test_support.hpp"

using namespace cosub;

TEST_SUITE_BEGIN("rng");

TEST_CASE("identical (seed, stream) reproduces the sequence bit for bit") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42, 7);
  RngStream d(42, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.uniform() == d.uniform());
    CHECK(c.gaussian() == d.gaussian());
  }
}

TEST_CASE("distinct streams and distinct seeds decorrelate") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  RngStream c(43, 0);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    equal_ab += x == b.next_u64();
    equal_ac += x == c.next_u64();
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("derived substreams are reproducible and order-free") {
  RngStream root(5);
  RngStream s1 = root.derived(3, 1, 4);
  RngStream s2 = root.derived(3, 1, 4);
  RngStream s3 = root.derived(3, 1, 5);
  CHECK(s1.next_u64() == s2.next_u64());
  CHECK(s1.next_u64() != s3.next_u64());
}

TEST_CASE("uniform moments and range") {
  RngStream rng(2024);
  std::vector<double> draws(100000);
  for (auto& d : draws) {
    d = rng.uniform();
    REQUIRE(d >= 0.0);
    REQUIRE(d < 1.0);
  }
  const auto m = testsup::moments(draws);
  CHECK(std::fabs(m.mean - 0.5) < 4 * m.se_mean);
  CHECK(m.variance == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("gaussian moments") {
  RngStream rng(2025);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = rng.gaussian();
  const auto m = testsup::moments(draws);
  CHECK(std::fabs(m.mean) < 4 * m.se_mean);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.05));
}

TEST_SUITE_END();
