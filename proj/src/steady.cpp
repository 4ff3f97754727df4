#include "postprice/steady.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace postprice {

namespace {

constexpr double kRateTolerance = 1e-12;

void check_prices(std::span<const double> prices, std::size_t expected, const char* what) {
  if (prices.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " prices, got " + std::to_string(prices.size()));
  for (double p : prices)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument(std::string(what) + ": prices must be finite and nonnegative");
}

}  // namespace

JobMix::JobMix(std::vector<int> lengths, std::vector<double> probs)
    : lengths_(std::move(lengths)), probs_(std::move(probs)) {
  if (lengths_.empty()) throw std::invalid_argument("job mix needs at least one length");
  if (lengths_.size() != probs_.size())
    throw std::invalid_argument("job mix: lengths and probs differ in size");
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (lengths_[i] < 1) throw std::invalid_argument("job mix: lengths must be positive");
    if (i > 0 && lengths_[i] < lengths_[i - 1])
      throw std::invalid_argument("job mix: lengths must be ascending");
    if (!(probs_[i] > 0.0 && probs_[i] <= 1.0))
      throw std::invalid_argument("job mix: each probability must lie in (0,1]");
    load_ += lengths_[i] * probs_[i];
    rate_ += probs_[i];
  }
  if (rate_ > 1.0 + kRateTolerance)
    throw std::invalid_argument("job mix: probabilities sum to " + std::to_string(rate_) + " > 1");
  idle_ = std::max(0.0, 1.0 - rate_);
}

Fleet::Fleet(std::vector<JobMix> servers, FleetMode mode) : servers_(std::move(servers)), mode_(mode) {
  if (servers_.empty()) throw std::invalid_argument("fleet needs at least one server");
  const double r0 = servers_.front().arrival_rate();
  const int a0 = servers_.front().lengths().front();
  for (const auto& s : servers_) {
    if (mode_ == FleetMode::equal_r) {
      if (std::abs(s.arrival_rate() - r0) > kRateTolerance)
        throw std::invalid_argument("equal-R fleet: servers have different arrival rates");
    } else {
      if (s.size() != 1 || s.lengths().front() != a0)
        throw std::invalid_argument("shared-length fleet: every server needs the same single length");
    }
  }
}

int Fleet::max_length() const noexcept {
  int m = 1;
  for (const auto& s : servers_) m = std::max(m, s.max_length());
  return m;
}

Objective::Objective(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("objective weight must lie in [0,1]");
}

double Objective::gain(const ValueDistribution& dist, double p) const {
  return lambda_ * dist.partial_expectation(p) + (1.0 - lambda_) * p * dist.tail(p);
}

SteadyStateMetrics single_server_metrics(const JobMix& mix, const ValueDistribution& dist,
                                         std::span<const double> prices) {
  check_prices(prices, mix.size(), "single_server_metrics");
  SteadyStateMetrics m;
  m.accept_prob.resize(mix.size());
  double welfare = 0.0;
  double revenue = 0.0;
  double busy = 0.0;
  double blocked = 0.0;  // sum (a_i - 1) r_i F(p_i)
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double a = mix.lengths()[i];
    const double r = mix.probs()[i];
    const double p = prices[i];
    const double acc = dist.tail(p);
    m.accept_prob[i] = acc;
    welfare += a * r * dist.partial_expectation(p);
    revenue += a * r * acc * p;
    busy += a * r * acc;
    blocked += (a - 1.0) * r * dist.cdf_strict(p);
  }
  const double denom = mix.load() - blocked + mix.idle_prob();
  m.welfare_per_step = welfare / denom;
  m.revenue_per_step = revenue / denom;
  m.occupancy = busy / denom;
  return m;
}

SteadyStateMetrics single_server_flat_metrics(const JobMix& mix, const ValueDistribution& dist,
                                              double price) {
  if (!(price >= 0.0) || !std::isfinite(price))
    throw std::invalid_argument("single_server_flat_metrics: price must be finite and nonnegative");
  const double S = mix.load();
  const double R = mix.arrival_rate();
  const double acc = dist.tail(price);
  const double denom = S - (S - R) * dist.cdf_strict(price) + mix.idle_prob();
  SteadyStateMetrics m;
  m.accept_prob.assign(mix.size(), acc);
  m.welfare_per_step = S * dist.partial_expectation(price) / denom;
  m.revenue_per_step = S * acc * price / denom;
  m.occupancy = S * acc / denom;
  return m;
}

SteadyStateMetrics fleet_metrics(const Fleet& fleet, const ValueDistribution& dist,
                                 std::span<const double> prices) {
  check_prices(prices, fleet.size(), "fleet_metrics");
  SteadyStateMetrics m;
  m.accept_prob.resize(fleet.size());
  for (std::size_t j = 0; j < fleet.size(); ++j) {
    const JobMix& server = fleet.server(j);
    const double p = prices[j];
    const double F = dist.cdf_strict(p);
    const double acc = dist.tail(p);
    const double pe = dist.partial_expectation(p);
    double scale = 0.0;  // per-step rate = scale * (per-acceptance-step gain)
    if (fleet.mode() == FleetMode::equal_r) {
      const double S = server.load();
      const double R = server.arrival_rate();
      scale = 1.0 / (1.0 - (1.0 - R / S) * F + server.idle_prob() / S);
    } else {
      const double a = fleet.shared_length();
      const double r = server.probs().front();
      scale = a / ((a - 1.0) * acc + 1.0 / r);
    }
    m.accept_prob[j] = acc;
    m.welfare_per_step += scale * pe;
    m.revenue_per_step += scale * acc * p;
    m.occupancy += scale * acc;
  }
  m.occupancy /= static_cast<double>(fleet.size());
  return m;
}

SteadyStateMetrics fleet_metrics_per_length(const Fleet& fleet, const ValueDistribution& dist,
                                            const std::vector<std::vector<double>>& prices) {
  if (prices.size() != fleet.size())
    throw std::invalid_argument("fleet_metrics_per_length: expected one price list per server");
  SteadyStateMetrics m;
  for (std::size_t j = 0; j < fleet.size(); ++j) {
    const auto s = single_server_metrics(fleet.server(j), dist, prices[j]);
    m.welfare_per_step += s.welfare_per_step;
    m.revenue_per_step += s.revenue_per_step;
    m.occupancy += s.occupancy;
    m.accept_prob.insert(m.accept_prob.end(), s.accept_prob.begin(), s.accept_prob.end());
  }
  m.occupancy /= static_cast<double>(fleet.size());
  return m;
}

}  // namespace postprice
