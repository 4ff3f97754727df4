#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "postprice/correlated.hpp"
#include "postprice/schedule.hpp"
#include "postprice/sim.hpp"
#include "postprice/steady.hpp"
#include "postprice/values.hpp"

namespace postprice {

/// A config problem tied to a key path such as `model.job_mix.probs`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  /// 1-based; 0 when unknown.
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// The distribution as written, before normalization.
struct DistributionSpec {
  ValueDistribution::Kind kind = ValueDistribution::Kind::discrete;
  std::vector<Atom> atoms;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<Breakpoint> breakpoints;

  [[nodiscard]] ValueDistribution build() const;
  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);
};

using ModelConfig = std::variant<JobMix, Fleet, CorrelatedClassList, std::vector<CorrelatedClassList>>;

struct InstanceConfig {
  ModelConfig model;
  std::optional<DistributionSpec> distribution;
  std::optional<PriceSchedule> schedule;
  double lambda = 1.0;
  SimConfig sim;

  [[nodiscard]] ValueDistribution value_law() const;  // throws ConfigError when absent
  [[nodiscard]] int max_length() const;

  friend bool operator==(const InstanceConfig&, const InstanceConfig&) = default;
};

InstanceConfig parse_config(const std::string& text);
InstanceConfig load_config(const std::string& path);
/// YAML that parse_config reads back to an equal InstanceConfig.
std::string dump_config(const InstanceConfig& config);

}  // namespace postprice
