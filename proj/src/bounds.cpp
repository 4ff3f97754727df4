#include "postprice/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace postprice {

namespace {

constexpr std::size_t kMaxCornerLengths = 24;

void check_probs(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || r1 + r2 > 1.0 + 1e-12)
    throw std::invalid_argument("rho: need r1, r2 > 0 and r1 + r2 <= 1");
}

}  // namespace

std::string bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::rho:
      return "rho";
    case BoundKind::half:
      return "half";
    case BoundKind::fixed_prob:
      return "fixed-prob";
    case BoundKind::harmonic:
      return "harmonic";
    case BoundKind::m_ratio:
      return "m-ratio";
    case BoundKind::one_length:
      return "one-length";
    case BoundKind::composed:
      return "composed";
  }
  return "unknown";
}

double rho(int a, int b, double r1, double r2) {
  if (a < 1 || a >= b) throw std::invalid_argument("rho: need 1 <= a < b");
  check_probs(r1, r2);
  return rho_value<double>(a, b, r1, r2);
}

double rho_long_limit(int a, double r1) {
  if (a < 1) throw std::invalid_argument("rho: need a >= 1");
  if (!(r1 > 0.0 && r1 <= 1.0)) throw std::invalid_argument("rho: need 0 < r1 <= 1");
  return rho_long_limit_value<double>(a, r1);
}

RatioBound fixed_prob_bound(double r1) {
  if (!(r1 > 0.0 && r1 <= 1.0)) throw std::invalid_argument("fixed_prob_bound: need 0 < r1 <= 1");
  return {1.0 / (1.0 + r1), BoundKind::fixed_prob, std::nullopt};
}

double h_eval(const JobMix& mix, std::span<const double> B) {
  if (B.size() != mix.size()) throw std::invalid_argument("h_eval: expected one B per length");
  std::vector<double> lengths(mix.lengths().begin(), mix.lengths().end());
  return h_value<double>(lengths, mix.probs(), B);
}

RatioBound h_corner_min(const JobMix& mix) {
  const std::size_t n = mix.size();
  if (n > kMaxCornerLengths)
    throw CapacityError("h_corner_min: " + std::to_string(n) + " lengths exceed the corner budget of " +
                        std::to_string(kMaxCornerLengths));
  if (n == 1) return {1.0, BoundKind::half, std::vector<double>{0.0}};

  RatioBound best{2.0, n == 2 ? BoundKind::rho : BoundKind::half, std::nullopt};
  std::vector<double> B(n, 0.0);
  B.back() = 1.0;
  const std::size_t free = n - 2;
  for (std::size_t mask = 0; mask < (std::size_t{1} << free); ++mask) {
    for (std::size_t k = 0; k < free; ++k) B[k + 1] = (mask >> k) & 1U ? 1.0 : 0.0;
    const double v = h_eval(mix, B);
    if (v < best.value) {
      best.value = v;
      best.witness = B;
    }
  }
  return best;
}

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

double m_ratio_term(double M) {
  if (!(M >= 1.0)) throw std::invalid_argument("m_ratio_term: need M >= 1");
  if (M == 1.0) return 1.0;
  const double x = M - 1.0;
  return x / (M * std::log1p(x));
}

RatioBound fleet_bound(const Fleet& fleet) {
  if (fleet.mode() != FleetMode::equal_r) throw std::invalid_argument("fleet_bound: needs an equal-R fleet");
  double lo = fleet.server(0).load();
  double hi = lo;
  for (const auto& s : fleet.servers()) {
    lo = std::min(lo, s.load());
    hi = std::max(hi, s.load());
  }
  const double harmonic = 1.0 / harmonic_number(fleet.size());
  const double spread = m_ratio_term(hi / lo);
  if (harmonic >= spread) return {harmonic, BoundKind::harmonic, std::nullopt};
  return {spread, BoundKind::m_ratio, std::nullopt};
}

RatioBound one_length_fleet_bound(const Fleet& fleet) {
  if (fleet.mode() != FleetMode::shared_length)
    throw std::invalid_argument("one_length_fleet_bound: needs a shared-length fleet");
  double lo = fleet.server(0).probs().front();
  double hi = lo;
  for (const auto& s : fleet.servers()) {
    lo = std::min(lo, s.probs().front());
    hi = std::max(hi, s.probs().front());
  }
  const double value = std::max({1.0 / harmonic_number(fleet.size()), m_ratio_term(hi / lo),
                                 1.0 / static_cast<double>(fleet.shared_length())});
  return {value, BoundKind::one_length, std::nullopt};
}

RatioBound composed_bound(const Fleet& fleet) {
  return {0.5 * fleet_bound(fleet).value, BoundKind::composed, std::nullopt};
}

TightInstance tight_bimodal_instance(int a, int b, double r1, double r2, double eps) {
  if (a < 1 || a >= b) throw std::invalid_argument("tight_bimodal_instance: need 1 <= a < b");
  check_probs(r1, r2);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("tight_bimodal_instance: need 0 < eps < 1");
  JobMix mix({a, b}, {r1, r2});
  const double excess = mix.load() - mix.arrival_rate();
  if (!(excess > 0.0)) throw std::invalid_argument("tight_bimodal_instance: S = R leaves the ratio at 1");
  const double q2 = eps;
  const double q1 = 1.0 - eps;
  const double v2 = 1.0 - eps;
  const double v1 = q2 * v2 * excess / q1;
  if (!(v1 < v2))
    throw std::invalid_argument("tight_bimodal_instance: eps too large for these lengths (v1 >= v2); "
                                "need eps * (S - R) < 1 - eps");
  return {std::move(mix), make_bimodal(q2, v1, v2), PerLengthPrices{{v1, v2}}};
}

double h0_equal_r(std::span<const double> inverse_loads, double R, std::span<const double> B) {
  if (inverse_loads.size() != B.size() || B.empty())
    throw std::invalid_argument("h0_equal_r: need matching nonempty s and B");
  long double h0 = 0.0L;
  const std::size_t n = B.size();
  for (std::size_t j = 0; j < n; ++j) {
    const long double free = 1.0L - B[j];
    const long double load = 1.0L - R + static_cast<long double>(R) * B[j];
    const long double num = free + inverse_loads[j] * load;
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) sum += num / (free + inverse_loads[i] * load);
    h0 += 1.0L / sum;
  }
  return static_cast<double>(h0);
}

double h0_shared_length(std::span<const double> inverse_rates, double a, std::span<const double> B) {
  if (inverse_rates.size() != B.size() || B.empty())
    throw std::invalid_argument("h0_shared_length: need matching nonempty R and B");
  long double h0 = 0.0L;
  const std::size_t n = B.size();
  for (std::size_t j = 0; j < n; ++j) {
    const long double busy = (static_cast<long double>(a) - 1.0L) * (1.0L - B[j]);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) sum += (inverse_rates[j] + busy) / (inverse_rates[i] + busy);
    h0 += 1.0L / sum;
  }
  return static_cast<double>(h0);
}

EqualRH0Instance equal_r_h0_construction(std::size_t n, double c) {
  EqualRH0Instance out{{}, 1.0, {}};
  for (std::size_t j = 1; j <= n; ++j) {
    const double k = static_cast<double>(j);
    out.inverse_loads.push_back(std::pow(c, -2.0 * k));
    out.B.push_back(1.0 - std::pow(c, -2.0 * k + 1.0));
  }
  return out;
}

SharedLengthH0Instance shared_length_h0_construction(std::size_t n, double c) {
  const double nn = static_cast<double>(n);
  SharedLengthH0Instance out{{}, 1.0 + std::pow(c, 2.0 * nn - 1.0), {}};
  for (std::size_t j = 1; j <= n; ++j) {
    const double k = static_cast<double>(j);
    out.inverse_rates.push_back(std::pow(c, 2.0 * (nn - k)));
    out.B.push_back(1.0 - std::pow(c, 2.0 * (nn - k) + 1.0) / (out.a - 1.0));
  }
  return out;
}

}  // namespace postprice
