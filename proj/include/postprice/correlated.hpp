#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "postprice/values.hpp"

namespace postprice {

/// A job class whose length and per-step value are fixed: arrives with
/// probability `rate` per step.
struct JobClass {
  double rate;
  int length;
  double value;
  friend bool operator==(const JobClass&, const JobClass&) = default;
};

/// Classes arriving at one server. Lengths and values may repeat across
/// classes; rates sum to at most 1.
class CorrelatedClassList {
 public:
  CorrelatedClassList() = default;
  explicit CorrelatedClassList(std::vector<JobClass> classes);

  [[nodiscard]] std::size_t size() const noexcept { return classes_.size(); }
  [[nodiscard]] bool empty() const noexcept { return classes_.empty(); }
  [[nodiscard]] std::span<const JobClass> classes() const noexcept { return classes_; }
  [[nodiscard]] const JobClass& operator[](std::size_t j) const { return classes_.at(j); }
  [[nodiscard]] int max_length() const noexcept;
  [[nodiscard]] double arrival_rate() const noexcept;

  friend bool operator==(const CorrelatedClassList&, const CorrelatedClassList&) = default;

 private:
  std::vector<JobClass> classes_;
};

/// Splits a class whose per-step value follows `dist` into `points`
/// equal-rate classes at the quantile midpoints of `dist`.
std::vector<JobClass> discretize_class(double rate, int length, const ValueDistribution& dist,
                                       std::size_t points = 10'000);

}  // namespace postprice
