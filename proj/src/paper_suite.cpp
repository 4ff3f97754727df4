#include "postprice/paper_suite.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "postprice/bounds.hpp"
#include "postprice/optimize.hpp"
#include "postprice/sim.hpp"
#include "postprice/steady.hpp"
#include "postprice/values.hpp"

namespace postprice {

namespace {

using Rational = boost::multiprecision::cpp_rational;

struct Entry {
  std::string name;
  std::string group;
  std::function<SuiteCheck(const SuiteOptions&)> run;
};

SuiteCheck approx(double expected, double actual, double tolerance) {
  SuiteCheck c;
  c.expected = expected;
  c.actual = actual;
  c.tolerance = tolerance;
  c.pass = std::isfinite(actual) && std::fabs(actual - expected) <= tolerance;
  return c;
}

SuiteCheck exact(const Rational& expected, const Rational& actual, double tolerance) {
  SuiteCheck c;
  c.expected = static_cast<double>(expected);
  c.actual = static_cast<double>(actual);
  c.tolerance = tolerance;
  c.pass = boost::multiprecision::abs(actual - expected) <= Rational(tolerance);
  return c;
}

Rational q(long long num, long long den = 1) { return Rational(num) / den; }

Rational h_rational(std::vector<long long> lengths, std::vector<Rational> probs, std::vector<int> B) {
  std::vector<Rational> a(lengths.begin(), lengths.end());
  std::vector<Rational> b(B.begin(), B.end());
  return h_value<Rational>(a, probs, b);
}

const JobMix& intro_mix() {
  static const JobMix mix({1, 2}, {0.5, 0.5});
  return mix;
}

const ValueDistribution& unit_uniform() {
  static const ValueDistribution dist = ValueDistribution::uniform(0.0, 1.0);
  return dist;
}

double welfare(std::vector<double> prices) {
  return single_server_metrics(intro_mix(), unit_uniform(), prices).welfare_per_step;
}

double revenue(std::vector<double> prices) {
  return single_server_metrics(intro_mix(), unit_uniform(), prices).revenue_per_step;
}

double price_at(const OptimizationResult& r, std::size_t i) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FlatPrice>) return s.price;
        else if constexpr (std::is_same_v<S, PerLengthPrices>) return s.prices.at(i);
        else return NAN;
      },
      r.schedule);
}

// Flat optimum over multi optimum for a two-length bimodal worst case.
double realized_ratio(int a, int b, double r1, double r2, double eps) {
  const auto inst = tight_bimodal_instance(a, b, r1, r2, eps);
  const auto flat = optimize_flat(inst.mix, inst.dist, Objective::welfare());
  const auto multi = optimize_multi(inst.mix, inst.dist, Objective::welfare());
  return flat.objective_value / multi.objective_value;
}

// Argmax locations are only determined to about sqrt(machine epsilon).
constexpr double kArgmaxTol = 1e-6;
// Values quoted to three digits.
constexpr double kQuotedTol = 1e-3;

std::vector<Entry> entries() {
  std::vector<Entry> e;
  const double s15 = std::sqrt(7.5);
  const double s47 = std::sqrt(47.0 / 8.0);

  e.push_back({"values.partial_expectation(0.3)", "values", [](const SuiteOptions& o) {
                 return approx((1.0 - 0.09) / 2.0, unit_uniform().partial_expectation(0.3), o.tolerance);
               }});
  e.push_back({"values.partial_expectation(0)", "values",
               [](const SuiteOptions& o) { return approx(0.5, unit_uniform().partial_expectation(0.0), o.tolerance); }});

  e.push_back({"c_w(0,3-sqrt(15/2))", "steady", [=](const SuiteOptions& o) {
                 return approx(6.0 - std::sqrt(30.0), welfare({0.0, 3.0 - s15}), o.tolerance);
               }});
  e.push_back({"c_w(3-2sqrt2)", "steady", [](const SuiteOptions& o) {
                 const double p = 3.0 - 2.0 * std::sqrt(2.0);
                 return approx(9.0 - 6.0 * std::sqrt(2.0), welfare({p, p}), o.tolerance);
               }});
  e.push_back({"c_w(0)", "steady", [](const SuiteOptions& o) { return approx(0.5, welfare({0.0, 0.0}), o.tolerance); }});
  e.push_back({"c_r(0.5,3-sqrt(47/8))", "steady", [=](const SuiteOptions& o) {
                 return approx(10.0 - std::sqrt(94.0), revenue({0.5, 3.0 - s47}), o.tolerance);
               }});
  e.push_back({"c_r(3-sqrt6)", "steady", [](const SuiteOptions& o) {
                 const double p = 3.0 - std::sqrt(6.0);
                 return approx(15.0 - 6.0 * std::sqrt(6.0), revenue({p, p}), o.tolerance);
               }});
  e.push_back({"c_r(0.5)", "steady", [](const SuiteOptions& o) { return approx(0.3, revenue({0.5, 0.5}), o.tolerance); }});

  e.push_back({"optimize.flat.welfare.price", "optimize", [](const SuiteOptions&) {
                 const auto r = optimize_flat(intro_mix(), unit_uniform(), Objective::welfare());
                 return approx(3.0 - 2.0 * std::sqrt(2.0), price_at(r, 0), kArgmaxTol);
               }});
  e.push_back({"optimize.flat.welfare.value", "optimize", [](const SuiteOptions& o) {
                 const auto r = optimize_flat(intro_mix(), unit_uniform(), Objective::welfare());
                 return approx(9.0 - 6.0 * std::sqrt(2.0), r.objective_value, o.tolerance);
               }});
  e.push_back({"optimize.flat.revenue.price", "optimize", [](const SuiteOptions&) {
                 const auto r = optimize_flat(intro_mix(), unit_uniform(), Objective::revenue());
                 return approx(3.0 - std::sqrt(6.0), price_at(r, 0), kArgmaxTol);
               }});
  e.push_back({"optimize.flat.revenue.value", "optimize", [](const SuiteOptions& o) {
                 const auto r = optimize_flat(intro_mix(), unit_uniform(), Objective::revenue());
                 return approx(15.0 - 6.0 * std::sqrt(6.0), r.objective_value, o.tolerance);
               }});
  e.push_back({"optimize.multi.welfare.p1", "optimize", [](const SuiteOptions&) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::welfare());
                 return approx(0.0, price_at(r, 0), kArgmaxTol);
               }});
  e.push_back({"optimize.multi.welfare.p2", "optimize", [=](const SuiteOptions&) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::welfare());
                 return approx(3.0 - s15, price_at(r, 1), kArgmaxTol);
               }});
  e.push_back({"optimize.multi.welfare.value", "optimize", [](const SuiteOptions& o) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::welfare());
                 return approx(6.0 - std::sqrt(30.0), r.objective_value, o.tolerance);
               }});
  e.push_back({"optimize.multi.revenue.p1", "optimize", [](const SuiteOptions&) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::revenue());
                 return approx(0.5, price_at(r, 0), kArgmaxTol);
               }});
  e.push_back({"optimize.multi.revenue.p2", "optimize", [=](const SuiteOptions&) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::revenue());
                 return approx(3.0 - s47, price_at(r, 1), kArgmaxTol);
               }});
  e.push_back({"optimize.multi.revenue.value", "optimize", [](const SuiteOptions& o) {
                 const auto r = optimize_multi(intro_mix(), unit_uniform(), Objective::revenue());
                 return approx(10.0 - std::sqrt(94.0), r.objective_value, o.tolerance);
               }});
  e.push_back({"optimize.single_from_multi.welfare.flat", "optimize", [=](const SuiteOptions&) {
                 const std::vector<double> p{0.0, 3.0 - s15};
                 return approx(0.510, best_single_from_multi(intro_mix(), unit_uniform(), p, Objective::welfare()).flat_value,
                               kQuotedTol);
               }});
  e.push_back({"optimize.single_from_multi.welfare.ratio", "optimize", [=](const SuiteOptions&) {
                 const std::vector<double> p{0.0, 3.0 - s15};
                 return approx(0.977, best_single_from_multi(intro_mix(), unit_uniform(), p, Objective::welfare()).ratio,
                               kQuotedTol);
               }});
  e.push_back({"optimize.single_from_multi.revenue.flat", "optimize", [=](const SuiteOptions&) {
                 const std::vector<double> p{0.5, 3.0 - s47};
                 return approx(0.302, best_single_from_multi(intro_mix(), unit_uniform(), p, Objective::revenue()).flat_value,
                               kQuotedTol);
               }});

  e.push_back({"rho(1,2,1/2,1/2)", "rho", [](const SuiteOptions& o) {
                 return exact(q(6, 7), rho_value<Rational>(q(1), q(2), q(1, 2), q(1, 2)), o.tolerance);
               }});
  e.push_back({"rho(1,3,1/2,1/2)", "rho", [](const SuiteOptions& o) {
                 return exact(q(4, 5), rho_value<Rational>(q(1), q(3), q(1, 2), q(1, 2)), o.tolerance);
               }});
  e.push_back({"rho(2,3,1/2,1/2)", "rho", [](const SuiteOptions& o) {
                 return exact(q(15, 16), rho_value<Rational>(q(2), q(3), q(1, 2), q(1, 2)), o.tolerance);
               }});
  for (long long a = 1; a <= 4; ++a) {
    e.push_back({"rho(" + std::to_string(a) + ",inf,1/2,1/2)", "rho", [a](const SuiteOptions& o) {
                   return exact(q(a + 1, a + 2), rho_long_limit_value<Rational>(q(a), q(1, 2)), o.tolerance);
                 }});
    e.push_back({"rho(" + std::to_string(a) + ",1e9,1/2,1/2)->limit", "rho", [a](const SuiteOptions&) {
                   return approx(rho_long_limit(static_cast<int>(a), 0.5),
                                 rho(static_cast<int>(a), 1'000'000'000, 0.5, 0.5), 1e-6);
                 }});
  }

  const std::vector<Rational> third(3, q(1, 3));
  e.push_back({"h(2,3,6)@(0,1,1)", "h",
               [=](const SuiteOptions& o) { return exact(q(44, 49), h_rational({2, 3, 6}, third, {0, 1, 1}), o.tolerance); }});
  e.push_back({"h(2,3,6).corner_min", "h", [](const SuiteOptions& o) {
                 const auto b = h_corner_min(JobMix({2, 3, 6}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
                 auto c = approx(44.0 / 49.0, b.value, std::max(o.tolerance, 1e-12));
                 c.pass = c.pass && b.witness == std::vector<double>{0.0, 1.0, 1.0};
                 c.note = "witness (0,1,1)";
                 return c;
               }});
  e.push_back({"h(2,3,7)@(0,0,1)", "h",
               [=](const SuiteOptions& o) { return exact(q(8, 9), h_rational({2, 3, 7}, third, {0, 0, 1}), o.tolerance); }});
  e.push_back({"h(2,3,7)@(0,1,1)", "h",
               [=](const SuiteOptions& o) { return exact(q(8, 9), h_rational({2, 3, 7}, third, {0, 1, 1}), o.tolerance); }});
  e.push_back({"h(2,3,8)@(0,0,1)", "h",
               [=](const SuiteOptions& o) { return exact(q(78, 89), h_rational({2, 3, 8}, third, {0, 0, 1}), o.tolerance); }});
  e.push_back({"h(2,3,8).corner_min", "h", [](const SuiteOptions& o) {
                 const auto b = h_corner_min(JobMix({2, 3, 8}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
                 auto c = approx(78.0 / 89.0, b.value, std::max(o.tolerance, 1e-12));
                 c.pass = c.pass && b.witness == std::vector<double>{0.0, 0.0, 1.0};
                 c.note = "witness (0,0,1)";
                 return c;
               }});
  e.push_back({"h(2,3,6)@constant", "h",
               [=](const SuiteOptions& o) { return exact(q(1), h_rational({2, 3, 6}, third, {1, 1, 1}), o.tolerance); }});

  e.push_back({"fleet.m_ratio.lengths<=4", "fleet", [](const SuiteOptions&) {
                 // Loads spread over [R, 4R] under a shared R.
                 const Fleet fleet({JobMix({1}, {0.5}), JobMix({4}, {0.5}), JobMix({1, 4}, {0.25, 0.25})},
                                   FleetMode::equal_r);
                 const double c = 4.0;
                 auto check = approx(0.0, 0.0, 0.0);
                 check.expected = (c - 1.0) / (c * std::log(c));
                 check.actual = fleet_bound(fleet).value;
                 check.pass = check.actual >= check.expected - 1e-15;
                 check.note = "lower bound";
                 return check;
               }});
  e.push_back({"fleet.one_length.rates>=0.2", "fleet", [](const SuiteOptions&) {
                 const Fleet fleet({JobMix({3}, {0.2}), JobMix({3}, {0.6}), JobMix({3}, {1.0})}, FleetMode::shared_length);
                 const double c = 0.2;
                 auto check = approx(0.0, 0.0, 0.0);
                 check.expected = (c - 1.0) / std::log(c);
                 check.actual = one_length_fleet_bound(fleet).value;
                 check.pass = check.actual >= check.expected - 1e-15;
                 check.note = "lower bound";
                 return check;
               }});

  e.push_back({"tight(1,1/(1-r)^2,r,1-r),r=0.99", "tight", [](const SuiteOptions&) {
                 const double r = 0.99;
                 const int b = static_cast<int>(std::lround(1.0 / ((1.0 - r) * (1.0 - r))));
                 const double target = (r - r * r + 1.0) / (r * r - r * r * r + 1.0 + r);
                 return approx(target, realized_ratio(1, b, r, 1.0 - r, 1e-4), 0.02);
               }});
  e.push_back({"tight(1,2,1/2,1/2)", "tight", [](const SuiteOptions&) {
                 return approx(6.0 / 7.0, realized_ratio(1, 2, 0.5, 0.5, 1e-4), 1e-3);
               }});
  e.push_back({"tight(1,1e6,1/2,1/2)", "tight", [](const SuiteOptions&) {
                 return approx(1.0 / 1.5, realized_ratio(1, 1'000'000, 0.5, 0.5, 1e-9), 1e-3);
               }});

  for (std::size_t n = 2; n <= 4; ++n) {
    e.push_back({"h0.equal_r(n=" + std::to_string(n) + ",c=1e3)", "h0", [n](const SuiteOptions&) {
                   const auto inst = equal_r_h0_construction(n, 1e3);
                   return approx(harmonic_number(n), h0_equal_r(inst.inverse_loads, inst.R, inst.B), 1e-2);
                 }});
    e.push_back({"h0.shared_length(n=" + std::to_string(n) + ",c=1e3)", "h0", [n](const SuiteOptions&) {
                   const auto inst = shared_length_h0_construction(n, 1e3);
                   return approx(harmonic_number(n), h0_shared_length(inst.inverse_rates, inst.a, inst.B), 1e-2);
                 }});
  }

  e.push_back({"sim.c_w(0)", "sim", [](const SuiteOptions& o) {
                 SimConfig cfg;
                 cfg.seed = o.seed;
                 const auto r = simulate(intro_mix(), unit_uniform(), FlatPrice{0.0}, cfg);
                 auto c = approx(0.5, r.welfare.mean, 3.0 * r.welfare.se);
                 c.note = "3 se";
                 return c;
               }});
  return e;
}

bool selected(const Entry& e, const std::string& filter) {
  if (filter.empty() || e.group == filter) return true;
  if (e.name.rfind(filter, 0) != 0) return false;
  return e.name.size() == filter.size() || !std::isalnum(static_cast<unsigned char>(e.name[filter.size()]));
}

}  // namespace

std::vector<SuiteCheck> run_paper_suite(const SuiteOptions& options) {
  std::vector<SuiteCheck> out;
  for (const auto& e : entries()) {
    if (!selected(e, options.filter)) continue;
    SuiteCheck c;
    try {
      c = e.run(options);
    } catch (const std::exception& ex) {
      c.pass = false;
      c.actual = NAN;
      c.note = std::string("threw: ") + ex.what();
    }
    c.name = e.name;
    c.group = e.group;
    out.push_back(std::move(c));
  }
  return out;
}

void print_suite(std::ostream& out, const std::vector<SuiteCheck>& checks, bool csv) {
  char buf[512];
  if (csv) out << "name,group,expected,actual,tolerance,pass\n";
  std::size_t passed = 0;
  for (const auto& c : checks) {
    passed += c.pass ? 1 : 0;
    if (csv) {
      std::snprintf(buf, sizeof buf, "\"%s\",%s,%.17g,%.17g,%.3g,%d\n", c.name.c_str(), c.group.c_str(), c.expected,
                    c.actual, c.tolerance, c.pass ? 1 : 0);
    } else {
      std::snprintf(buf, sizeof buf, "%-4s %-44s expected %-20.15g actual %-20.15g tol %-8.2g %s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.expected, c.actual, c.tolerance, c.note.c_str());
    }
    out << buf;
  }
  if (!csv) out << passed << "/" << checks.size() << " checks passed\n";
}

}  // namespace postprice
