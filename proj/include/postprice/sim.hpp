#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "postprice/correlated.hpp"
#include "postprice/schedule.hpp"
#include "postprice/steady.hpp"
#include "postprice/values.hpp"

namespace postprice {

struct SimConfig {
  std::int64_t horizon = 1'000'000;
  int replications = 30;
  std::uint64_t seed = 42;
  /// Steps dropped from the front of each replication; 1% of the horizon by default.
  std::optional<std::int64_t> warmup;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  [[nodiscard]] std::int64_t warmup_steps() const noexcept;
  /// Throws std::invalid_argument when the horizon is shorter than ten of
  /// the longest jobs, warmup >= horizon, or replications < 1.
  void validate(int max_length) const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Mean with its standard error and the normal 95% interval.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ReplicationStats {
  double welfare = 0.0;
  double revenue = 0.0;
  double occupancy = 0.0;
};

struct SimResult {
  Estimate welfare;
  Estimate revenue;
  Estimate occupancy;
  /// Arrivals that found their server free, and how many were accepted,
  /// per class (classes of all servers concatenated for fleets).
  std::vector<std::int64_t> free_arrivals;
  std::vector<std::int64_t> accepted;
  std::vector<ReplicationStats> replications;
  /// True when the single-replication batch-means error was used.
  bool batch_means = false;
};

class RandomStream {
 public:
  explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// k generators derived from one seed; stream i is seeded from (seed, i).
std::vector<RandomStream> seeded_streams(std::uint64_t seed, std::size_t k);

SimResult simulate(const JobMix& mix, const ValueDistribution& dist, const PriceSchedule& schedule,
                   const SimConfig& config);

SimResult simulate(const Fleet& fleet, const ValueDistribution& dist, const PriceSchedule& schedule,
                   const SimConfig& config);

/// Flat price, or a per-length schedule read as one price per class.
SimResult simulate(const CorrelatedClassList& classes, const PriceSchedule& schedule, const SimConfig& config);

/// Independent servers with correlated classes under one shared price.
SimResult simulate(std::span<const CorrelatedClassList> servers, double price, const SimConfig& config);

/// One row per replication then an aggregate row.
void write_csv(std::ostream& out, const SimResult& result);

}  // namespace postprice
