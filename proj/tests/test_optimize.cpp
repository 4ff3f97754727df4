#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "postprice/optimize.hpp"

using namespace postprice;

namespace {
const JobMix intro({1, 2}, {0.5, 0.5});
const auto unit = ValueDistribution::uniform(0.0, 1.0);

double price(const OptimizationResult& r, std::size_t i = 0) {
  if (const auto* f = std::get_if<FlatPrice>(&r.schedule)) return f->price;
  return std::get<PerLengthPrices>(r.schedule).prices.at(i);
}

// Brute-force optimum over candidate tuples, scored by the Markov chain.
double brute_multi(const JobMix& mix, const ValueDistribution& dist, double lambda) {
  const auto cands = support_candidates(dist);
  std::vector<std::size_t> idx(mix.size(), 0);
  double best = -1.0;
  while (true) {
    std::vector<double> p;
    for (auto k : idx) p.push_back(cands[k]);
    const auto o = oracle::chain_metrics(mix, dist, p);
    best = std::max(best, lambda * o.welfare + (1 - lambda) * o.revenue);
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == cands.size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return best;
}
}  // namespace

TEST_CASE("flat optimum on the two-length example") {
  const auto w = optimize_flat(intro, unit, Objective::welfare());
  CHECK(price(w) == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(w.objective_value == doctest::Approx(9.0 - 6.0 * std::sqrt(2.0)).epsilon(1e-12));
  const auto r = optimize_flat(intro, unit, Objective::revenue());
  CHECK(price(r) == doctest::Approx(3.0 - std::sqrt(6.0)).epsilon(1e-6));
  CHECK(r.objective_value == doctest::Approx(15.0 - 6.0 * std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("multi optimum on the two-length example") {
  const auto w = optimize_multi(intro, unit, Objective::welfare());
  CHECK(std::abs(price(w, 0)) < 1e-6);
  CHECK(price(w, 1) == doctest::Approx(3.0 - std::sqrt(7.5)).epsilon(1e-6));
  CHECK(w.objective_value == doctest::Approx(6.0 - std::sqrt(30.0)).epsilon(1e-12));
  const auto r = optimize_multi(intro, unit, Objective::revenue());
  CHECK(price(r, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(price(r, 1) == doctest::Approx(3.0 - std::sqrt(47.0 / 8.0)).epsilon(1e-6));
  CHECK(r.objective_value == doctest::Approx(10.0 - std::sqrt(94.0)).epsilon(1e-12));
}

TEST_CASE("best single price taken from the multi prices") {
  const std::vector<double> pw{0.0, 3.0 - std::sqrt(7.5)};
  const auto w = best_single_from_multi(intro, unit, pw, Objective::welfare());
  CHECK(w.index == 1);
  CHECK(w.flat_value == doctest::Approx(0.510).epsilon(1e-3));
  CHECK(w.ratio == doctest::Approx(0.977).epsilon(2e-3));
  const std::vector<double> pr{0.5, 3.0 - std::sqrt(47.0 / 8.0)};
  CHECK(best_single_from_multi(intro, unit, pr, Objective::revenue()).flat_value ==
        doctest::Approx(0.302).epsilon(1e-3));
}

TEST_CASE("exhaustive multi search matches brute force") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const auto mix = oracle::random_mix(rng, 3, 8);
    const auto dist = oracle::random_discrete(rng, 4);
    for (double lambda : {0.0, 0.5, 1.0}) {
      const auto r = optimize_multi(mix, dist, Objective(lambda));
      CHECK(r.global);
      CHECK(r.objective_value == doctest::Approx(brute_multi(mix, dist, lambda)).epsilon(1e-10));
    }
  }
}

TEST_CASE("multi never loses to flat and one length reduces to flat") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mix = oracle::random_mix(rng, 4, 10);
    const auto dist = oracle::random_discrete(rng, 5);
    const auto f = optimize_flat(mix, dist, Objective::welfare());
    const auto m = optimize_multi(mix, dist, Objective::welfare());
    CHECK(m.objective_value >= f.objective_value - 1e-12);
  }
  const JobMix one({3}, {0.4});
  const auto f = optimize_flat(one, unit, Objective(0.3));
  const auto m = optimize_multi(one, unit, Objective(0.3));
  CHECK(price(m, 0) == price(f));
  CHECK(m.objective_value == f.objective_value);
}

TEST_CASE("coordinate ascent handles continuous laws with many lengths") {
  const JobMix mix({1, 2, 5}, {0.3, 0.3, 0.2});
  const auto tri = ValueDistribution::piecewise_linear({{0.0, 1.0}, {2.0, 0.0}});
  const auto m = optimize_multi(mix, tri, Objective::welfare());
  CHECK_FALSE(m.global);
  CHECK(m.method == SearchMethod::coordinate_ascent);
  const auto f = optimize_flat(mix, tri, Objective::welfare());
  CHECK(m.objective_value >= f.objective_value - 1e-12);
  // Longer jobs should not be cheaper per step at the optimum.
  const auto& p = std::get<PerLengthPrices>(m.schedule).prices;
  CHECK(p[0] <= p[2] + 1e-9);
}

TEST_CASE("fleet schemes are ordered") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double R = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    std::vector<JobMix> mixes;
    const std::size_t servers = 2 + rng() % 3;
    for (std::size_t j = 0; j < servers; ++j) {
      const std::size_t n = 1 + rng() % 2;
      mixes.emplace_back(oracle::random_lengths(rng, n, 6), oracle::random_weights(rng, n, R));
    }
    const Fleet fleet(mixes, FleetMode::equal_r);
    const auto dist = oracle::random_discrete(rng, 4);
    const auto flat = optimize_fleet(fleet, dist, Objective::welfare(), FleetScheme::flat);
    const auto per = optimize_fleet(fleet, dist, Objective::welfare(), FleetScheme::per_server);
    const auto full = optimize_fleet(fleet, dist, Objective::welfare(), FleetScheme::per_server_per_length);
    CHECK(per.objective_value >= flat.objective_value - 1e-12);
    CHECK(full.objective_value >= per.objective_value - 1e-12);
  }
}
