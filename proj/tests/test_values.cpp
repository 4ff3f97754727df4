#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "postprice/values.hpp"

using namespace postprice;

TEST_CASE("discrete law uses the strict cdf") {
  const auto d = ValueDistribution::discrete({{1.0, 0.25}, {2.0, 0.5}, {4.0, 0.25}});
  CHECK(d.cdf_strict(1.0) == 0.0);
  CHECK(d.cdf_strict(1.5) == doctest::Approx(0.25));
  CHECK(d.cdf_strict(2.0) == doctest::Approx(0.25));
  CHECK(d.tail(2.0) == doctest::Approx(0.75));
  CHECK(d.tail(4.0) == doctest::Approx(0.25));
  CHECK(d.tail(4.0000001) == 0.0);
  // An atom sitting on the price counts as accepted.
  CHECK(d.partial_expectation(2.0) == doctest::Approx(2.0 * 0.5 + 4.0 * 0.25));
  CHECK(d.partial_expectation(0.0) == doctest::Approx(d.mean()));
  CHECK(d.mean() == doctest::Approx(2.25));
}

TEST_CASE("uniform partial expectation") {
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  for (double p : {0.0, 0.1, 0.3, 0.5, 0.9, 1.0}) CHECK(u.partial_expectation(p) == doctest::Approx((1 - p * p) / 2));
  CHECK(u.partial_expectation(0.0) == 0.5);
  CHECK(u.tail(-1.0) == 1.0);
  CHECK(u.tail(2.0) == 0.0);
  CHECK(u.tail(u.reject_all_price()) == 0.0);
}

TEST_CASE("piecewise linear law matches numerical integration") {
  // Unnormalized triangle on [1, 3] peaking at 2.
  const auto d = ValueDistribution::piecewise_linear({{1.0, 0.0}, {2.0, 4.0}, {3.0, 0.0}});
  const auto density = [](double x) { return x < 2.0 ? x - 1.0 : 3.0 - x; };
  for (double p : {1.0, 1.3, 2.0, 2.5, 2.9}) {
    const double tail = oracle::simpson(density, p, 3.0);
    const double pe = oracle::simpson([&](double x) { return x * density(x); }, p, 3.0);
    CHECK(d.tail(p) == doctest::Approx(tail).epsilon(1e-9));
    CHECK(d.partial_expectation(p) == doctest::Approx(pe).epsilon(1e-9));
  }
  CHECK(d.mean() == doctest::Approx(2.0));
}

TEST_CASE("quantile inverts the cdf") {
  const auto tri = ValueDistribution::piecewise_linear({{0.0, 1.0}, {1.0, 3.0}, {4.0, 0.0}});
  const auto uni = ValueDistribution::uniform(2.0, 5.0);
  for (double u : {0.0, 0.01, 0.2, 0.5, 0.77, 0.999}) {
    CHECK(tri.cdf_strict(tri.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    CHECK(uni.cdf_strict(uni.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  const auto d = ValueDistribution::discrete({{1.0, 0.25}, {2.0, 0.75}});
  CHECK(d.quantile(0.0) == 1.0);
  CHECK(d.quantile(0.2499) == 1.0);
  CHECK(d.quantile(0.25) == 2.0);
  CHECK(d.quantile(0.9999) == 2.0);
}

TEST_CASE("inverse cdf sampling reproduces the law") {
  const auto d = ValueDistribution::piecewise_linear({{0.0, 0.0}, {1.0, 2.0}, {2.0, 0.0}});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += d.quantile(u(rng));
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("support candidates") {
  const auto d = ValueDistribution::discrete({{0.0, 0.5}, {3.0, 0.5}});
  const auto c = support_candidates(d);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 3.0);
  CHECK(c[2] > 3.0);
  const auto g = support_candidates(ValueDistribution::uniform(1.0, 2.0), 11);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 2.0);
}

TEST_CASE("discretize keeps the mean") {
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  const auto d = discretize(u, 1000);
  CHECK(d.is_discrete());
  CHECK(d.atoms().size() == 1000);
  CHECK(d.mean() == doctest::Approx(0.5).epsilon(1e-9));
  const auto tri = ValueDistribution::piecewise_linear({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(discretize(tri, 5000).mean() == doctest::Approx(tri.mean()).epsilon(1e-4));
}

TEST_CASE("bimodal helper") {
  const auto d = make_bimodal(0.1, 0.2, 0.9);
  CHECK(d.tail(0.9) == doctest::Approx(0.1));
  CHECK(d.mean() == doctest::Approx(0.9 * 0.2 + 0.1 * 0.9));
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(ValueDistribution::discrete({}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::discrete({{1.0, 0.5}, {2.0, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::discrete({{2.0, 0.5}, {1.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::discrete({{-1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::uniform(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::piecewise_linear({{0.0, 0.0}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::piecewise_linear({{0.0, 1.0}}), std::invalid_argument);
}
