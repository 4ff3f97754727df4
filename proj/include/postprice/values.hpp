#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace postprice {

/// One point mass of a discrete value law.
struct Atom {
  double value;
  double weight;
};

/// Knot of a piecewise-linear density. Densities need not integrate to one;
/// the distribution normalizes them.
struct Breakpoint {
  double x;
  double density;
};

/// Law of a job's value per time step.
///
/// The CDF convention is strict: cdf_strict(x) = Pr[value < x], so an atom
/// sitting exactly at a price counts as accepted. Every acceptance decision in
/// the library goes through tail(p) = Pr[value >= p].
class ValueDistribution {
 public:
  enum class Kind { discrete, uniform, piecewise_linear };

  /// Values must be strictly ascending and nonnegative; weights sum to 1
  /// within 1e-12.
  static ValueDistribution discrete(std::vector<Atom> atoms);
  static ValueDistribution uniform(double lo, double hi);
  static ValueDistribution piecewise_linear(std::vector<Breakpoint> points);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_discrete() const noexcept { return kind_ == Kind::discrete; }

  /// Atoms of a discrete law (empty otherwise).
  [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
  /// Knots of a piecewise-linear law, normalized (empty otherwise).
  [[nodiscard]] std::span<const Breakpoint> breakpoints() const noexcept { return knots_; }

  [[nodiscard]] double cdf_strict(double x) const;
  [[nodiscard]] double tail(double x) const;
  /// E[value * 1{value >= p}].
  [[nodiscard]] double partial_expectation(double p) const;
  [[nodiscard]] double mean() const { return partial_expectation(min_support()); }
  /// Inverse CDF for u in [0, 1).
  [[nodiscard]] double quantile(double u) const;

  [[nodiscard]] double min_support() const noexcept { return lo_; }
  [[nodiscard]] double max_support() const noexcept { return hi_; }
  /// A price strictly above the support: max(1, max_support) * 1e-6 past it.
  [[nodiscard]] double reject_all_price() const noexcept;

  friend bool operator==(const ValueDistribution&, const ValueDistribution&) = default;

 private:
  ValueDistribution() = default;

  Kind kind_ = Kind::discrete;
  double lo_ = 0.0;
  double hi_ = 0.0;

  std::vector<Atom> atoms_;
  std::vector<double> below_;      // below_[k] = sum of weights of atoms before k
  std::vector<double> at_least_;   // at_least_[k] = sum of weights from k on
  std::vector<double> moment_;     // moment_[k] = sum of v*w from k on

  std::vector<Breakpoint> knots_;
  std::vector<double> seg_mass_below_;    // CDF at each knot
  std::vector<double> seg_moment_above_;  // first moment above each knot
};

/// Prices worth evaluating when searching for an optimum.
///
/// Discrete laws: {0} and every support value, plus reject_all_price().
/// Continuous laws: grid_points evenly spaced prices over the support hull.
std::vector<double> support_candidates(const ValueDistribution& dist,
                                       std::size_t grid_points = 1024);

/// {(v1, 1 - q2), (v2, q2)}.
ValueDistribution make_bimodal(double q2, double v1, double v2);

/// Equal-weight quantile-midpoint discretization with `points` atoms.
/// Coincident quantiles are merged.
ValueDistribution discretize(const ValueDistribution& dist, std::size_t points);

}  // namespace postprice
