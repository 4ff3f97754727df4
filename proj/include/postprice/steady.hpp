#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "postprice/values.hpp"

namespace postprice {

/// Job lengths a_1 <= ... <= a_n arriving at a single server with per-step
/// probabilities r_1..r_n (at most one arrival per step).
class JobMix {
 public:
  JobMix(std::vector<int> lengths, std::vector<double> probs);

  [[nodiscard]] std::size_t size() const noexcept { return lengths_.size(); }
  [[nodiscard]] std::span<const int> lengths() const noexcept { return lengths_; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] int max_length() const noexcept { return lengths_.back(); }

  /// S = sum a_i r_i.
  [[nodiscard]] double load() const noexcept { return load_; }
  /// R = sum r_i.
  [[nodiscard]] double arrival_rate() const noexcept { return rate_; }
  /// 1 - R, with rounding noise below zero clamped away.
  [[nodiscard]] double idle_prob() const noexcept { return idle_; }

  friend bool operator==(const JobMix&, const JobMix&) = default;

 private:
  std::vector<int> lengths_;
  std::vector<double> probs_;
  double load_ = 0.0;
  double rate_ = 0.0;
  double idle_ = 0.0;
};

enum class FleetMode {
  equal_r,        // servers share R = sum of arrival probabilities
  shared_length,  // one job length per server, identical across servers
};

class Fleet {
 public:
  Fleet(std::vector<JobMix> servers, FleetMode mode);

  [[nodiscard]] std::size_t size() const noexcept { return servers_.size(); }
  [[nodiscard]] std::span<const JobMix> servers() const noexcept { return servers_; }
  [[nodiscard]] const JobMix& server(std::size_t j) const { return servers_.at(j); }
  [[nodiscard]] FleetMode mode() const noexcept { return mode_; }
  [[nodiscard]] int max_length() const noexcept;
  /// Only meaningful in shared-length mode.
  [[nodiscard]] int shared_length() const noexcept { return servers_.front().lengths().front(); }

  friend bool operator==(const Fleet&, const Fleet&) = default;

 private:
  std::vector<JobMix> servers_;
  FleetMode mode_;
};

struct SteadyStateMetrics {
  double welfare_per_step = 0.0;
  double revenue_per_step = 0.0;
  /// Pr[accept | arrival at a free server], per class (or per server for fleets).
  std::vector<double> accept_prob;
  /// Long-run fraction of busy steps (averaged over servers for fleets).
  double occupancy = 0.0;
};

/// lambda * welfare + (1 - lambda) * revenue.
class Objective {
 public:
  explicit Objective(double lambda);
  static Objective welfare() { return Objective(1.0); }
  static Objective revenue() { return Objective(0.0); }

  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double operator()(const SteadyStateMetrics& m) const noexcept {
    return lambda_ * m.welfare_per_step + (1.0 - lambda_) * m.revenue_per_step;
  }
  /// Per-accepted-step gain at price p: lambda * E[v 1{v>=p}] + (1-lambda) * p Pr[v>=p].
  [[nodiscard]] double gain(const ValueDistribution& dist, double p) const;

  friend bool operator==(const Objective&, const Objective&) = default;

 private:
  double lambda_;
};

/// Steady-state welfare and revenue for one server with a price per length.
SteadyStateMetrics single_server_metrics(const JobMix& mix, const ValueDistribution& dist,
                                         std::span<const double> prices);

SteadyStateMetrics single_server_flat_metrics(const JobMix& mix, const ValueDistribution& dist,
                                              double price);

/// One price per server; sums the per-server long-run rates.
SteadyStateMetrics fleet_metrics(const Fleet& fleet, const ValueDistribution& dist,
                                 std::span<const double> prices);

/// A price per server per length; sums single_server_metrics over servers.
SteadyStateMetrics fleet_metrics_per_length(const Fleet& fleet, const ValueDistribution& dist,
                                            const std::vector<std::vector<double>>& prices);

}  // namespace postprice
