#pragma once

#include <string>
#include <variant>
#include <vector>

#include "postprice/steady.hpp"

namespace postprice {

struct FlatPrice {
  double price = 0.0;
  friend bool operator==(const FlatPrice&, const FlatPrice&) = default;
};

struct PerLengthPrices {
  std::vector<double> prices;
  friend bool operator==(const PerLengthPrices&, const PerLengthPrices&) = default;
};

struct PerServerPrices {
  std::vector<double> prices;
  friend bool operator==(const PerServerPrices&, const PerServerPrices&) = default;
};

struct PerServerPerLengthPrices {
  std::vector<std::vector<double>> prices;
  friend bool operator==(const PerServerPerLengthPrices&, const PerServerPerLengthPrices&) = default;
};

using PriceSchedule = std::variant<FlatPrice, PerLengthPrices, PerServerPrices, PerServerPerLengthPrices>;

std::string shape_name(const PriceSchedule& schedule);

/// Price for each length of a single-server mix. Throws on shape or
/// dimension mismatch.
std::vector<double> resolve_prices(const PriceSchedule& schedule, const JobMix& mix);

/// Price for each length of each server.
std::vector<std::vector<double>> resolve_prices(const PriceSchedule& schedule, const Fleet& fleet);

/// Steady-state metrics of any schedule shape that fits the model.
SteadyStateMetrics evaluate(const JobMix& mix, const ValueDistribution& dist, const PriceSchedule& schedule);
SteadyStateMetrics evaluate(const Fleet& fleet, const ValueDistribution& dist, const PriceSchedule& schedule);

}  // namespace postprice
