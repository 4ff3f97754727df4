#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "postprice/offline.hpp"

using namespace postprice;

TEST_CASE("expected LP examples") {
  const auto one = expected_lp(CorrelatedClassList({{1.0, 1, 5.0}}));
  CHECK(one.opt == 5.0);
  CHECK(one.x == std::vector{1.0});

  const auto intro = expected_lp(CorrelatedClassList({{0.5, 1, 1.0}, {0.5, 2, 1.0}}));
  CHECK(intro.opt == doctest::Approx(1.0));
  // Equal values: the longer class goes first.
  CHECK(intro.x[1] == doctest::Approx(0.5));
  CHECK(intro.x[0] == doctest::Approx(0.0));

  const auto loose = expected_lp(CorrelatedClassList({{0.1, 2, 3.0}, {0.2, 3, 1.0}}));
  CHECK(loose.x == std::vector{0.1, 0.2});
  CHECK(loose.opt == doctest::Approx(0.1 * 2 * 3 + 0.2 * 3 * 1));

  CHECK(expected_lp(CorrelatedClassList()).opt == 0.0);
  CHECK(half_opt_price(CorrelatedClassList()) == 0.0);
  CHECK(half_opt_price(CorrelatedClassList({{1.0, 1, 4.0}})) == 2.0);
}

TEST_CASE("greedy LP matches vertex enumeration and is feasible") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 400; ++trial) {
    const auto classes = oracle::random_classes(rng, 8, 10);
    const auto lp = expected_lp(classes);
    CHECK(lp.opt == doctest::Approx(oracle::lp_by_vertices(classes)).epsilon(1e-12));
    double used = 0.0, value = 0.0;
    for (std::size_t j = 0; j < classes.size(); ++j) {
      CHECK(lp.x[j] >= 0.0);
      CHECK(lp.x[j] <= classes[j].rate + 1e-15);
      used += lp.x[j] * classes[j].length;
      value += lp.x[j] * classes[j].length * classes[j].value;
    }
    CHECK(used <= 1.0 + 1e-12);
    CHECK(value == doctest::Approx(lp.opt));
    // No single coordinate can be nudged up profitably while staying feasible.
    for (std::size_t j = 0; j < classes.size(); ++j) {
      const double room = std::min(classes[j].rate - lp.x[j], (1.0 - used) / classes[j].length);
      CHECK(room <= 1e-6 + 1e-12);
    }
  }
}

TEST_CASE("offline DP examples") {
  CHECK(offline_dp_oracle({}, 10) == 0.0);
  const std::vector<Arrival> single{{1, 0, 2, 3.0}};
  CHECK(offline_dp_oracle(single, 2) == doctest::Approx(1.5));
  CHECK(offline_dp_oracle(single, 5) == doctest::Approx(0.6));
  // A job that cannot finish by the horizon is worth nothing.
  const std::vector<Arrival> late{{4, 0, 3, 9.0}};
  CHECK(offline_dp_oracle(late, 5) == 0.0);
  // Skipping a short job to take a valuable long one.
  const std::vector<Arrival> choice{{1, 0, 1, 1.0}, {2, 1, 3, 6.0}, {3, 0, 1, 1.0}};
  CHECK(offline_dp_oracle(choice, 4) == doctest::Approx(7.0 / 4.0));
}

TEST_CASE("offline DP matches subset search") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto classes = oracle::random_classes(rng, 4, 5);
    auto streams = seeded_streams(rng(), 1);
    const std::int64_t T = 18;
    const auto trace = sample_trace(classes, T, streams.front());
    CHECK(offline_dp_oracle(trace, T) == doctest::Approx(oracle::offline_brute_force(trace, T)).epsilon(1e-12));
  }
}

TEST_CASE("sampled traces stay under the LP") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto classes = oracle::random_classes(rng, 5, 8);
    const double opt = expected_lp(classes).opt;
    auto streams = seeded_streams(1000 + trial, 20);
    double sum = 0.0;
    for (auto& s : streams) sum += offline_dp_oracle(sample_trace(classes, 100000, s), 100000);
    CHECK(sum / 20.0 <= opt * 1.02);
  }
}

TEST_CASE("trace round trip") {
  auto streams = seeded_streams(5, 1);
  const auto classes = CorrelatedClassList({{0.3, 2, 1.0 / 3.0}, {0.4, 5, 2.5}});
  const auto trace = sample_trace(classes, 500, streams.front());
  std::stringstream buf;
  write_trace(buf, trace);
  CHECK(read_trace(buf) == trace);
  std::stringstream bad("step,class,length,value\n1,0,2\n");
  CHECK_THROWS_AS(read_trace(bad), std::runtime_error);
}

TEST_CASE("correlated closed form agrees with the Markov chain") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto classes = oracle::random_classes(rng, 6, 9);
    std::vector<double> prices;
    for (std::size_t j = 0; j < classes.size(); ++j) prices.push_back(std::uniform_real_distribution<double>(0, 8)(rng));
    const auto m = correlated_metrics(classes, prices);
    const auto o = oracle::chain_metrics(classes, prices);
    CHECK(m.welfare_per_step == doctest::Approx(o.welfare).epsilon(1e-10));
    CHECK(m.revenue_per_step == doctest::Approx(o.revenue).epsilon(1e-10));
    CHECK(m.occupancy == doctest::Approx(o.occupancy).epsilon(1e-10));
  }
}

TEST_CASE("half-opt price reaches half of the LP in closed form") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto classes = oracle::random_classes(rng, 6, 12);
    const double opt = expected_lp(classes).opt;
    CHECK(correlated_flat_metrics(classes, opt / 2).welfare_per_step >= 0.5 * opt - 1e-12);
  }
}

TEST_CASE("fleet half-opt picks the best candidate") {
  SimConfig cfg;
  cfg.horizon = 100000;
  cfg.replications = 4;
  const std::vector<CorrelatedClassList> servers{CorrelatedClassList({{0.5, 1, 1.0}}),
                                                 CorrelatedClassList({{0.2, 3, 4.0}, {0.3, 1, 0.5}})};
  const auto choice = fleet_half_opt_prices(servers, cfg);
  REQUIRE(choice.candidates.size() == 2);
  for (const auto& c : choice.candidates) CHECK(choice.candidates[choice.chosen].sim.welfare.mean >= c.sim.welfare.mean);
  CHECK(choice.total_opt == doctest::Approx(expected_lp(servers[0]).opt + expected_lp(servers[1]).opt));
  const auto solo = fleet_half_opt_prices(std::span(servers).first(1), cfg);
  CHECK(solo.price == half_opt_price(servers[0]));
}
