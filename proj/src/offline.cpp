#include "postprice/offline.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace postprice {

LpSolution expected_lp(const CorrelatedClassList& classes) {
  const auto& cs = classes.classes();
  std::vector<std::size_t> order(cs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (cs[i].value != cs[j].value) return cs[i].value > cs[j].value;
    return cs[i].length > cs[j].length;
  });
  LpSolution out;
  out.x.assign(cs.size(), 0.0);
  double capacity = 1.0;
  for (std::size_t j : order) {
    if (capacity <= 0.0) break;
    const double a = cs[j].length;
    const double x = std::min(cs[j].rate, capacity / a);
    out.x[j] = x;
    capacity -= x * a;
    out.opt += x * cs[j].value * a;
  }
  return out;
}

double half_opt_price(const CorrelatedClassList& classes) { return expected_lp(classes).opt / 2.0; }

SteadyStateMetrics correlated_metrics(const CorrelatedClassList& classes, std::span<const double> prices) {
  if (prices.size() != classes.size()) throw std::invalid_argument("correlated_metrics: expected one price per class");
  double welfare = 0.0;
  double revenue = 0.0;
  double busy = 0.0;
  double cycle = 1.0;
  SteadyStateMetrics m;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const auto& c = classes[j];
    if (!(prices[j] >= 0.0)) throw std::invalid_argument("correlated_metrics: prices must be nonnegative");
    const bool accept = c.value >= prices[j];
    m.accept_prob.push_back(accept ? 1.0 : 0.0);
    if (!accept) continue;
    welfare += c.rate * c.length * c.value;
    revenue += c.rate * c.length * prices[j];
    busy += c.rate * c.length;
    cycle += c.rate * (c.length - 1);
  }
  m.welfare_per_step = welfare / cycle;
  m.revenue_per_step = revenue / cycle;
  m.occupancy = busy / cycle;
  return m;
}

SteadyStateMetrics correlated_flat_metrics(const CorrelatedClassList& classes, double price) {
  const std::vector<double> prices(classes.size(), price);
  return correlated_metrics(classes, prices);
}

std::vector<Arrival> sample_trace(const CorrelatedClassList& classes, std::int64_t horizon, RandomStream& rng) {
  if (horizon < 1) throw std::invalid_argument("sample_trace: horizon must be positive");
  std::vector<double> cumulative;
  double run = 0.0;
  for (const auto& c : classes.classes()) cumulative.push_back(run += c.rate);
  std::vector<Arrival> trace;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double u = rng.uniform();
    const auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                            cumulative.begin());
    if (k >= classes.size()) continue;
    const auto& c = classes[k];
    trace.push_back({t, k, c.length, c.length * c.value});
  }
  return trace;
}

double offline_dp_oracle(std::span<const Arrival> trace, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("offline_dp_oracle: horizon must be positive");
  std::vector<double> best(static_cast<std::size_t>(horizon) + 2, 0.0);
  std::vector<const Arrival*> at(static_cast<std::size_t>(horizon) + 1, nullptr);
  for (const auto& a : trace) {
    if (a.step < 1 || a.step > horizon) throw std::invalid_argument("offline_dp_oracle: arrival outside [1, T]");
    if (a.length < 1) throw std::invalid_argument("offline_dp_oracle: lengths must be positive");
    auto& slot = at[static_cast<std::size_t>(a.step)];
    if (slot) throw std::invalid_argument("offline_dp_oracle: two arrivals in one step");
    slot = &a;
  }
  for (std::int64_t t = horizon; t >= 1; --t) {
    const auto i = static_cast<std::size_t>(t);
    double v = best[i + 1];
    if (const Arrival* a = at[i]; a && t + a->length - 1 <= horizon)
      v = std::max(v, a->total_value + best[i + static_cast<std::size_t>(a->length)]);
    best[i] = v;
  }
  return best[1] / static_cast<double>(horizon);
}

void write_trace(std::ostream& out, std::span<const Arrival> trace) {
  out << "step,class,length,value\n";
  char buf[32];
  for (const auto& a : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", a.total_value);
    out << a.step << ',' << a.cls << ',' << a.length << ',' << buf << '\n';
  }
}

std::vector<Arrival> read_trace(std::istream& in) {
  std::vector<Arrival> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("step", 0) == 0) continue;
    std::istringstream row(line);
    Arrival a{};
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> a.step >> c1 >> a.cls >> c2 >> a.length >> c3 >> a.total_value) || c1 != ',' || c2 != ',' ||
        c3 != ',')
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected step,class,length,value");
    out.push_back(a);
  }
  return out;
}

FleetHalfOptChoice fleet_half_opt_prices(std::span<const CorrelatedClassList> servers, const SimConfig& config) {
  if (servers.empty()) throw std::invalid_argument("fleet_half_opt_prices: need at least one server");
  FleetHalfOptChoice out;
  for (std::size_t i = 0; i < servers.size(); ++i) {
    const double opt = expected_lp(servers[i]).opt;
    out.total_opt += opt;
    out.candidates.push_back({i, opt, opt / 2.0, simulate(servers, opt / 2.0, config)});
  }
  for (std::size_t i = 1; i < out.candidates.size(); ++i)
    if (out.candidates[i].sim.welfare.mean > out.candidates[out.chosen].sim.welfare.mean) out.chosen = i;
  out.price = out.candidates[out.chosen].price;
  return out;
}

}  // namespace postprice
