// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "postprice/bounds.hpp"
#include "postprice/cli.hpp"
#include "postprice/offline.hpp"
#include "postprice/optimize.hpp"
#include "postprice/sim.hpp"
#include "postprice/steady.hpp"

using namespace postprice;
using Q = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome closed_forms() {
  const JobMix mix({1, 2}, {0.5, 0.5});
  const auto unit = ValueDistribution::uniform(0.0, 1.0);
  auto welfare = [&](std::vector<double> p) { return single_server_metrics(mix, unit, p).welfare_per_step; };
  auto revenue = [&](std::vector<double> p) { return single_server_metrics(mix, unit, p).revenue_per_step; };
  const double s2 = std::sqrt(2.0);
  const std::vector<std::pair<double, double>> pairs{
      {welfare({0.0, 3.0 - std::sqrt(7.5)}), 6.0 - std::sqrt(30.0)},
      {welfare({3.0 - 2.0 * s2, 3.0 - 2.0 * s2}), 9.0 - 6.0 * s2},
      {welfare({0.0, 0.0}), 0.5},
      {revenue({0.5, 3.0 - std::sqrt(47.0 / 8.0)}), 10.0 - std::sqrt(94.0)},
      {revenue({3.0 - std::sqrt(6.0), 3.0 - std::sqrt(6.0)}), 15.0 - 6.0 * std::sqrt(6.0)},
      {revenue({0.5, 0.5}), 0.3}};
  double worst = 0.0;
  for (const auto& [got, want] : pairs) worst = std::max(worst, std::abs(got - want));
  return {worst <= 1e-9, fmt("6 values, max error %.3g", worst)};
}

Outcome h_corners() {
  const double third = 1.0 / 3.0;
  auto exact = [](long long a3, std::vector<int> B) {
    const std::vector<Q> lengths{Q(2), Q(3), Q(a3)};
    const std::vector<Q> probs(3, Q(1) / 3);
    std::vector<Q> b(B.begin(), B.end());
    return h_value<Q>(lengths, probs, b);
  };
  bool ok = exact(6, {0, 1, 1}) == Q(44) / 49 && exact(7, {0, 0, 1}) == Q(8) / 9 && exact(7, {0, 1, 1}) == Q(8) / 9 &&
            exact(8, {0, 0, 1}) == Q(78) / 89;
  const auto m6 = h_corner_min(JobMix({2, 3, 6}, {third, third, third}));
  const auto m7 = h_corner_min(JobMix({2, 3, 7}, {third, third, third}));
  const auto m8 = h_corner_min(JobMix({2, 3, 8}, {third, third, third}));
  const JobMix j7({2, 3, 7}, {third, third, third});
  const double flat_gap = std::abs(h_eval(j7, std::vector{0.0, 0.0, 1.0}) - h_eval(j7, std::vector{0.0, 1.0, 1.0}));
  const double err = std::max({std::abs(m6.value - 44.0 / 49.0), std::abs(m7.value - 8.0 / 9.0),
                               std::abs(m8.value - 78.0 / 89.0), flat_gap});
  ok = ok && err <= 1e-12 && m6.witness == std::vector<double>{0, 1, 1} && m8.witness == std::vector<double>{0, 0, 1};
  return {ok, fmt("exact rationals match, double error %.3g, B2 indifference gap %.3g", err, flat_gap)};
}

Outcome rho_table() {
  const Q h(1, 2);
  bool ok = rho_value<Q>(Q(1), Q(2), h, h) == Q(6, 7) && rho_value<Q>(Q(1), Q(3), h, h) == Q(4, 5) &&
            rho_value<Q>(Q(2), Q(3), h, h) == Q(15, 16);
  double err = std::max({std::abs(rho(1, 2, 0.5, 0.5) - 6.0 / 7.0), std::abs(rho(1, 3, 0.5, 0.5) - 0.8),
                         std::abs(rho(2, 3, 0.5, 0.5) - 15.0 / 16.0)});
  for (long long a = 1; a <= 10; ++a) {
    ok = ok && rho_long_limit_value<Q>(Q(a), h) == Q(a + 1, a + 2);
    err = std::max(err, std::abs(rho_long_limit(static_cast<int>(a), 0.5) - (a + 1.0) / (a + 2.0)));
  }
  return {ok && err <= 1e-12, fmt("exact table and limits a=1..10 match, double error %.3g", err)};
}

Outcome half_property() {
  std::mt19937_64 rng(20240401);
  int violations = 0;
  double worst = 1.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto mix = oracle::random_mix(rng, 5, 12);
    const auto dist = oracle::random_discrete(rng, 6);
    for (double lambda : {0.0, 0.5, 1.0}) {
      const Objective objective(lambda);
      const auto multi = optimize_multi(mix, dist, objective);
      if (!multi.global) ++violations;
      const auto choice = best_single_from_multi(mix, dist, resolve_prices(multi.schedule, mix), objective);
      worst = std::min(worst, choice.ratio);
      if (choice.ratio < 0.5 - 1e-12) ++violations;
    }
  }
  return {violations == 0, fmt("30000 optimizations, worst ratio %.6f, %d violations", worst, violations)};
}

Outcome tightness() {
  const double r = 0.99;
  const int b = static_cast<int>(std::lround(1.0 / ((1 - r) * (1 - r))));
  auto realized = [](const TightInstance& inst) {
    const double multi = evaluate(inst.mix, inst.dist, inst.prices).welfare_per_step;
    return optimize_flat(inst.mix, inst.dist, Objective::welfare()).objective_value / multi;
  };
  const double target = (r - r * r + 1) / (r * r - r * r * r + 1 + r);
  const double got = realized(tight_bimodal_instance(1, b, r, 1 - r, 1e-4));
  const double got2 = realized(tight_bimodal_instance(1, 2, 0.5, 0.5, 1e-4));
  const bool ok = std::abs(got - target) <= 0.02 && std::abs(got2 - 6.0 / 7.0) <= 1e-3;
  return {ok, fmt("r=0.99: %.6f vs %.6f; (1,2,1/2,1/2): %.6f vs %.6f", got, target, got2, 6.0 / 7.0)};
}

Outcome sim_vs_formula() {
  std::mt19937_64 rng(606);
  SimConfig cfg;  // horizon 1e6, 30 replications
  int inside = 0;
  int misses[3] = {0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto mix = oracle::random_mix(rng, 4, 10);
    const auto dist = oracle::random_discrete(rng, 5);
    const auto schedule = optimize_multi(mix, dist, Objective::welfare()).schedule;
    const auto cf = evaluate(mix, dist, schedule);
    // Independent streams per instance; a shared seed would correlate the errors.
    cfg.seed = 42 + static_cast<std::uint64_t>(trial);
    const auto s = simulate(mix, dist, schedule, cfg);
    const bool w = std::abs(s.welfare.mean - cf.welfare_per_step) <= 2 * s.welfare.se;
    const bool rv = std::abs(s.revenue.mean - cf.revenue_per_step) <= 2 * s.revenue.se;
    const bool o = std::abs(s.occupancy.mean - cf.occupancy) <= 2 * s.occupancy.se;
    misses[0] += !w;
    misses[1] += !rv;
    misses[2] += !o;
    inside += w && rv && o;
  }
  return {inside >= 95, fmt("%d/100 instances inside the band (misses: welfare %d, revenue %d, occupancy %d)", inside,
                            misses[0], misses[1], misses[2])};
}

Outcome half_opt() {
  std::mt19937_64 rng(707);
  SimConfig cfg;
  int sim_fail = 0, dp_fail = 0;
  double worst_dp = 0.0, worst_z = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const auto classes = oracle::random_classes(rng, 6, 10);
    const double opt = expected_lp(classes).opt;
    const auto s = simulate(classes, FlatPrice{opt / 2}, cfg);
    if (s.welfare.mean < 0.5 * opt - 3 * s.welfare.se) ++sim_fail;
    worst_z = std::min(worst_z, (s.welfare.mean - 0.5 * opt) / std::max(s.welfare.se, 1e-300));
    auto streams = seeded_streams(cfg.seed + 1000 + trial, 20);
    for (auto& stream : streams) {
      const std::int64_t T = 100000;
      const double dp = offline_dp_oracle(sample_trace(classes, T, stream), T);
      worst_dp = std::max(worst_dp, dp / opt);
      if (dp > 1.02 * opt) ++dp_fail;
    }
  }
  return {sim_fail == 0 && dp_fail == 0,
          fmt("sim failures %d (min z vs Opt/2 %.1f); DP/Opt max %.4f over 1000 traces, %d above 1.02", sim_fail, worst_z,
              worst_dp, dp_fail)};
}

Outcome fleet_property() {
  std::mt19937_64 rng(808);
  int violations = 0;
  double slack_d = 1e300, slack_e = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const double R = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const std::size_t servers = 1 + rng() % 4;
    std::vector<JobMix> mixes;
    for (std::size_t j = 0; j < servers; ++j) {
      const std::size_t n = 1 + rng() % 3;
      mixes.emplace_back(oracle::random_lengths(rng, n, 12), oracle::random_weights(rng, n, R));
    }
    const Fleet fleet(mixes, FleetMode::equal_r);
    const auto dist = oracle::random_discrete(rng, 6);
    const double bound = fleet_bound(fleet).value;
    for (double lambda : {0.0, 0.5, 1.0}) {
      const double flat = optimize_fleet(fleet, dist, Objective(lambda), FleetScheme::flat).objective_value;
      const double per = optimize_fleet(fleet, dist, Objective(lambda), FleetScheme::per_server).objective_value;
      const double ratio = per > 0 ? flat / per : 1.0;
      slack_d = std::min(slack_d, ratio - bound);
      if (ratio < bound - 1e-12) ++violations;
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const int a = std::uniform_int_distribution<int>(1, 12)(rng);
    const std::size_t servers = 1 + rng() % 4;
    std::vector<JobMix> mixes;
    for (std::size_t j = 0; j < servers; ++j)
      mixes.emplace_back(std::vector<int>{a}, std::vector<double>{std::uniform_real_distribution<double>(0.01, 1.0)(rng)});
    const Fleet fleet(mixes, FleetMode::shared_length);
    const auto dist = oracle::random_discrete(rng, 6);
    const double bound = one_length_fleet_bound(fleet).value;
    for (double lambda : {0.0, 0.5, 1.0}) {
      const double flat = optimize_fleet(fleet, dist, Objective(lambda), FleetScheme::flat).objective_value;
      const double per = optimize_fleet(fleet, dist, Objective(lambda), FleetScheme::per_server).objective_value;
      const double ratio = per > 0 ? flat / per : 1.0;
      slack_e = std::min(slack_e, ratio - bound);
      if (ratio < bound - 1e-12) ++violations;
    }
  }
  return {violations == 0,
          fmt("6000 comparisons, min slack equal-R %.4f, shared-length %.4f, %d violations", slack_d, slack_e, violations)};
}

Outcome h0_convergence() {
  double worst = 0.0;
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto e = equal_r_h0_construction(n, 1e3);
    const auto s = shared_length_h0_construction(n, 1e3);
    worst = std::max(worst, std::abs(h0_equal_r(e.inverse_loads, e.R, e.B) - harmonic_number(n)));
    worst = std::max(worst, std::abs(h0_shared_length(s.inverse_rates, s.a, s.B) - harmonic_number(n)));
  }
  return {worst <= 1e-2, fmt("max |h0 - H_n| = %.3g over n=2..4, both constructions", worst)};
}

Outcome determinism() {
  const std::vector<std::string> args{"simulate", POSTPRICE_CONFIG_DIR "/intro.yaml", "--csv", "--seed", "42"};
  std::ostringstream a, b, err;
  const int ca = run_cli(args, a, err);
  const int cb = run_cli(args, b, err);
  const bool ok = ca == 0 && cb == 0 && !a.str().empty() && a.str() == b.str();
  return {ok, fmt("exit codes %d/%d, %zu bytes, identical: %s", ca, cb, a.str().size(), a.str() == b.str() ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"two-length closed forms", closed_forms},
      {"three-length h corner minima", h_corners},
      {"rho table and long-job limit", rho_table},
      {"best single price keeps half of multi", half_property},
      {"tight bimodal convergence", tightness},
      {"simulator matches closed form", sim_vs_formula},
      {"half-Opt flat price and offline DP", half_opt},
      {"fleet flat vs per-server bounds", fleet_property},
      {"h0 convergence to H_n", h0_convergence},
      {"simulate CSV determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
