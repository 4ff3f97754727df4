#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "postprice/schedule.hpp"
#include "postprice/steady.hpp"
#include "postprice/values.hpp"

namespace postprice {

enum class SearchMethod { exhaustive, coordinate_ascent, grid_refine };

std::string method_name(SearchMethod method);

struct SearchOptions {
  /// Grid resolution for continuous value laws.
  std::size_t grid_points = 1024;
  /// Golden-section stopping width, relative.
  double refine_tolerance = 1e-12;
  /// How many grid local maxima get a golden-section refinement.
  std::size_t refine_brackets = 8;
  /// Largest candidate-tuple count searched exhaustively.
  std::size_t exhaustive_budget = 1'000'000;
  std::size_t restarts = 8;
  std::size_t max_sweeps = 200;
  double sweep_tolerance = 1e-10;
  std::uint64_t seed = 0x5eedULL;
};

struct OptimizationResult {
  PriceSchedule schedule;
  double objective_value = 0.0;
  Objective objective = Objective::welfare();
  SearchMethod method = SearchMethod::exhaustive;
  /// False when coordinate ascent was used: a local optimum only.
  bool global = true;
};

/// Best single price per time step for a single server.
OptimizationResult optimize_flat(const JobMix& mix, const ValueDistribution& dist, Objective objective,
                                 const SearchOptions& options = {});

/// Best price per length for a single server.
OptimizationResult optimize_multi(const JobMix& mix, const ValueDistribution& dist, Objective objective,
                                  const SearchOptions& options = {});

struct SinglePriceChoice {
  std::size_t index = 0;  // which of the multi prices was chosen
  double price = 0.0;
  double flat_value = 0.0;
  double multi_value = 0.0;
  /// flat_value / multi_value, or 1 when multi_value is 0.
  double ratio = 1.0;
};

/// Reuse one of the per-length prices as the flat price, picking the best.
SinglePriceChoice best_single_from_multi(const JobMix& mix, const ValueDistribution& dist,
                                         std::span<const double> prices, Objective objective);

enum class FleetScheme { flat, per_server, per_server_per_length };

OptimizationResult optimize_fleet(const Fleet& fleet, const ValueDistribution& dist, Objective objective,
                                  FleetScheme scheme, const SearchOptions& options = {});

}  // namespace postprice
