#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "postprice/schedule.hpp"
#include "postprice/steady.hpp"
#include "postprice/values.hpp"

namespace postprice {

enum class BoundKind { rho, half, fixed_prob, harmonic, m_ratio, one_length, composed };

std::string bound_kind_name(BoundKind kind);

/// A guaranteed flat-vs-multi approximation ratio.
struct RatioBound {
  double value = 1.0;
  BoundKind kind = BoundKind::half;
  /// Corner B = (F(p_1), ..., F(p_n)) attaining the value, when one exists.
  std::optional<std::vector<double>> witness;
};

/// Thrown when an exhaustive search would exceed its size budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Two-length ratio as a function of lengths a < b and their probabilities.
/// Generic over the scalar so exact rationals can be plugged in.
template <class T>
T rho_value(const T& a, const T& b, const T& r1, const T& r2) {
  const T num = (a * r1 + b * r2) * (a * r1 + T(1) - r1);
  const T den = a * (a - T(1)) * r1 * r1 + a * (b - T(1)) * r1 * r2 + a * r1 + b * r2;
  return num / den;
}

/// b -> infinity limit of rho_value.
template <class T>
T rho_long_limit_value(const T& a, const T& r1) {
  return (a * r1 + T(1) - r1) / (a * r1 + T(1));
}

/// The h function left after the worst-case choice of partial expectations:
///   [S^2 - S sum (a_i-1) r_i B_i + S(1-R)] / [S^2 - (S-R) sum a_i r_i B_i + S(1-R)].
template <class T>
T h_value(std::span<const T> lengths, std::span<const T> probs, std::span<const T> B) {
  T S(0), R(0), blocked(0), weighted(0);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    S += lengths[i] * probs[i];
    R += probs[i];
    blocked += (lengths[i] - T(1)) * probs[i] * B[i];
    weighted += lengths[i] * probs[i] * B[i];
  }
  const T idle = T(1) - R;
  const T num = S * S - blocked * S + S * idle;
  const T den = S * S - weighted * (S - R) + S * idle;
  if (!(den > T(0))) throw std::domain_error("h function: nonpositive denominator");
  return num / den;
}

/// Throws std::invalid_argument unless 1 <= a < b and r1, r2 > 0 with r1 + r2 <= 1.
double rho(int a, int b, double r1, double r2);
double rho_long_limit(int a, double r1);

/// 1 / (1 + r1): the worst case of rho over all lengths for fixed r1.
RatioBound fixed_prob_bound(double r1);

double h_eval(const JobMix& mix, std::span<const double> B);

/// Minimum of h over the corners of [0,1]^n, with B_1 = 0 and B_n = 1 fixed.
/// Throws CapacityError for n > 24.
RatioBound h_corner_min(const JobMix& mix);

double harmonic_number(std::size_t n);

/// (M - 1) / (M ln M), equal to 1 at M = 1.
double m_ratio_term(double M);

/// max(1/H_n, (M-1)/(M ln M)) with M the largest load ratio S_i / S_j.
RatioBound fleet_bound(const Fleet& fleet);

/// max(1/H_n, (M-1)/(M ln M), 1/a) with M the largest rate ratio r_i / r_j.
RatioBound one_length_fleet_bound(const Fleet& fleet);

/// Per-length then per-server composition: fleet_bound / 2.
RatioBound composed_bound(const Fleet& fleet);

struct TightInstance {
  JobMix mix;
  ValueDistribution dist;
  PerLengthPrices prices;
};

/// Bimodal worst case for two lengths: v2 = 1 - eps with weight eps, and v1
/// placed so that q2 v2 / (q1 v1) = 1 / (S - R). The flat/multi ratio tends to
/// rho(a, b, r1, r2) as eps -> 0.
TightInstance tight_bimodal_instance(int a, int b, double r1, double r2, double eps);

/// Sum over servers of the reciprocal h_j terms for equal-R fleets, given
/// s_j = 1 / S_j, the shared R and B_j = F(p_j).
double h0_equal_r(std::span<const double> inverse_loads, double R, std::span<const double> B);

/// Same for one shared length a, given R_j = 1 / r_j.
double h0_shared_length(std::span<const double> inverse_rates, double a, std::span<const double> B);

struct EqualRH0Instance {
  std::vector<double> inverse_loads;
  double R;
  std::vector<double> B;
};

struct SharedLengthH0Instance {
  std::vector<double> inverse_rates;
  double a;
  std::vector<double> B;
};

/// s_j = c^{-2j}, B_j = 1 - c^{-2j+1}, R = 1; h0 tends to H_n as c grows.
EqualRH0Instance equal_r_h0_construction(std::size_t n, double c);

/// R_j = c^{2(n-j)}, B_j = 1 - c^{2(n-j)+1} / (a-1) with a - 1 = c^{2n-1};
/// h0 tends to H_n as c grows.
SharedLengthH0Instance shared_length_h0_construction(std::size_t n, double c);

}  // namespace postprice
