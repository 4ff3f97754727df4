#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "postprice/correlated.hpp"
#include "postprice/sim.hpp"
#include "postprice/steady.hpp"

namespace postprice {

struct LpSolution {
  double opt = 0.0;        // welfare per step upper bound
  std::vector<double> x;   // acceptance rate per class, in input order
};

/// Fractional knapsack over classes: value density v, weight a, cap r.
LpSolution expected_lp(const CorrelatedClassList& classes);

double half_opt_price(const CorrelatedClassList& classes);

/// Long-run metrics of one server when each class has a fixed value and its
/// own price.
SteadyStateMetrics correlated_metrics(const CorrelatedClassList& classes, std::span<const double> prices);
SteadyStateMetrics correlated_flat_metrics(const CorrelatedClassList& classes, double price);

struct Arrival {
  std::int64_t step;  // 1-based
  std::size_t cls;
  int length;
  double total_value;  // length x per-step value
  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// At most one arrival per step, drawn like the simulator draws classes.
std::vector<Arrival> sample_trace(const CorrelatedClassList& classes, std::int64_t horizon, RandomStream& rng);

/// Best total value of non-overlapping jobs that finish by `horizon`, per step.
double offline_dp_oracle(std::span<const Arrival> trace, std::int64_t horizon);

void write_trace(std::ostream& out, std::span<const Arrival> trace);
/// Throws std::runtime_error with the offending line number on bad input.
std::vector<Arrival> read_trace(std::istream& in);

struct HalfOptCandidate {
  std::size_t server;
  double opt;
  double price;
  SimResult sim;
};

struct FleetHalfOptChoice {
  double price = 0.0;
  std::size_t chosen = 0;
  double total_opt = 0.0;
  std::vector<HalfOptCandidate> candidates;
};

/// Tries Opt_i / 2 of every server as the fleet-wide price and keeps the one
/// with the highest simulated welfare (first on ties).
FleetHalfOptChoice fleet_half_opt_prices(std::span<const CorrelatedClassList> servers, const SimConfig& config);

}  // namespace postprice
