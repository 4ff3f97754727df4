#include "postprice/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "postprice/golden.hpp"

namespace postprice {

namespace {

// Ties within this relative margin go to the lower price.
bool strictly_better(double candidate, double incumbent) {
  if (!std::isfinite(incumbent)) return candidate > incumbent;
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

// Maximizes f over the candidate prices of `dist`; continuous laws get a
// golden-section pass inside the brackets around the best grid local maxima.
template <class F>
ScalarOptimum maximize_price(F&& f, const ValueDistribution& dist, const SearchOptions& options) {
  const auto grid = support_candidates(dist, options.grid_points);
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = f(grid[k]);

  ScalarOptimum best{grid.front(), values.front()};
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (strictly_better(values[k], best.value)) best = {grid[k], values[k]};
  if (dist.is_discrete()) return best;

  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const bool left_ok = k == 0 || values[k] >= values[k - 1];
    const bool right_ok = k + 1 == grid.size() || values[k] >= values[k + 1];
    if (left_ok && right_ok) peaks.push_back(k);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  if (peaks.size() > options.refine_brackets) peaks.resize(options.refine_brackets);

  for (std::size_t k : peaks) {
    const double lo = grid[k == 0 ? 0 : k - 1];
    const double hi = grid[std::min(k + 1, grid.size() - 1)];
    if (!(hi > lo)) continue;
    const auto refined = golden_section_maximize(f, lo, hi, options.refine_tolerance);
    if (strictly_better(refined.value, best.value)) best = refined;
  }
  return best;
}

std::size_t saturating_pow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

struct MultiSearch {
  const JobMix& mix;
  const ValueDistribution& dist;
  Objective objective;

  double value(std::span<const double> prices) const {
    return objective(single_server_metrics(mix, dist, prices));
  }
};

// Depth-first enumeration of every candidate tuple with running numerator
// and denominator sums. Visits tuples in lexicographic order, so the first
// maximum found carries the lowest prices.
std::vector<double> exhaustive_multi(const JobMix& mix, const ValueDistribution& dist, Objective objective,
                                     std::span<const double> candidates) {
  const std::size_t n = mix.size();
  const std::size_t K = candidates.size();
  std::vector<double> gain(K), blocked(K);
  for (std::size_t c = 0; c < K; ++c) {
    gain[c] = objective.gain(dist, candidates[c]);
    blocked[c] = dist.cdf_strict(candidates[c]);
  }
  std::vector<double> num_coef(n), den_coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    num_coef[i] = mix.lengths()[i] * mix.probs()[i];
    den_coef[i] = (mix.lengths()[i] - 1.0) * mix.probs()[i];
  }
  const double base = mix.load() + mix.idle_prob();

  std::vector<std::size_t> idx(n, 0), best_idx(n, 0);
  double best = -std::numeric_limits<double>::infinity();

  const auto visit = [&](const auto& self, std::size_t depth, double num, double den) -> void {
    if (depth == n) {
      const double v = num / den;
      if (strictly_better(v, best)) {
        best = v;
        best_idx = idx;
      }
      return;
    }
    for (std::size_t c = 0; c < K; ++c) {
      idx[depth] = c;
      self(self, depth + 1, num + num_coef[depth] * gain[c], den - den_coef[depth] * blocked[c]);
    }
  };
  visit(visit, 0, 0.0, base);

  std::vector<double> prices(n);
  for (std::size_t i = 0; i < n; ++i) prices[i] = candidates[best_idx[i]];
  return prices;
}

std::vector<double> coordinate_ascent_multi(const MultiSearch& search, const SearchOptions& options,
                                            std::span<const double> flat_start) {
  const std::size_t n = search.mix.size();
  const auto candidates = support_candidates(search.dist, options.grid_points);
  const bool discrete = search.dist.is_discrete();

  std::vector<std::vector<double>> starts;
  starts.emplace_back(flat_start.begin(), flat_start.end());
  starts.emplace_back(n, 0.0);
  std::mt19937_64 rng(options.seed);
  while (starts.size() < std::max<std::size_t>(options.restarts, 1)) {
    std::vector<double> s(n);
    for (auto& p : s) p = candidates[rng() % candidates.size()];
    starts.push_back(std::move(s));
  }

  std::vector<double> best_prices = starts.front();
  double best_value = search.value(best_prices);
  for (auto prices : starts) {
    double current = search.value(prices);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const double before = current;
      for (std::size_t i = 0; i < n; ++i) {
        auto f = [&](double p) {
          const double saved = prices[i];
          prices[i] = p;
          const double v = search.value(prices);
          prices[i] = saved;
          return v;
        };
        ScalarOptimum opt{prices[i], current};
        if (discrete) {
          for (double p : candidates) {
            const double v = f(p);
            if (strictly_better(v, opt.value)) opt = {p, v};
          }
        } else {
          const auto cand = maximize_price(f, search.dist, options);
          if (strictly_better(cand.value, opt.value)) opt = cand;
        }
        prices[i] = opt.x;
        current = opt.value;
      }
      if (current - before < options.sweep_tolerance) break;
    }
    if (strictly_better(current, best_value)) {
      best_value = current;
      best_prices = prices;
    }
  }
  return best_prices;
}

}  // namespace

std::string method_name(SearchMethod method) {
  switch (method) {
    case SearchMethod::exhaustive:
      return "exhaustive";
    case SearchMethod::coordinate_ascent:
      return "coordinate-ascent";
    case SearchMethod::grid_refine:
      return "grid+refine";
  }
  return "unknown";
}

OptimizationResult optimize_flat(const JobMix& mix, const ValueDistribution& dist, Objective objective,
                                 const SearchOptions& options) {
  const auto best = maximize_price(
      [&](double p) { return objective(single_server_flat_metrics(mix, dist, p)); }, dist, options);
  OptimizationResult out;
  out.schedule = FlatPrice{best.x};
  out.objective = objective;
  out.objective_value = objective(single_server_flat_metrics(mix, dist, best.x));
  out.method = dist.is_discrete() ? SearchMethod::exhaustive : SearchMethod::grid_refine;
  out.global = dist.is_discrete();
  return out;
}

OptimizationResult optimize_multi(const JobMix& mix, const ValueDistribution& dist, Objective objective,
                                  const SearchOptions& options) {
  const auto flat = optimize_flat(mix, dist, objective, options);
  const double flat_price = std::get<FlatPrice>(flat.schedule).price;
  OptimizationResult out;
  out.objective = objective;
  if (mix.size() == 1) {
    out.schedule = PerLengthPrices{{flat_price}};
    out.objective_value = flat.objective_value;
    out.method = flat.method;
    out.global = flat.global;
    return out;
  }

  std::vector<double> prices;
  const auto candidates = support_candidates(dist, options.grid_points);
  if (dist.is_discrete() &&
      saturating_pow(candidates.size(), mix.size(), options.exhaustive_budget) <= options.exhaustive_budget) {
    prices = exhaustive_multi(mix, dist, objective, candidates);
    out.method = SearchMethod::exhaustive;
    out.global = true;
  } else {
    const std::vector<double> start(mix.size(), flat_price);
    prices = coordinate_ascent_multi(MultiSearch{mix, dist, objective}, options, start);
    out.method = SearchMethod::coordinate_ascent;
    out.global = false;
  }
  out.objective_value = objective(single_server_metrics(mix, dist, prices));
  out.schedule = PerLengthPrices{std::move(prices)};
  return out;
}

SinglePriceChoice best_single_from_multi(const JobMix& mix, const ValueDistribution& dist,
                                         std::span<const double> prices, Objective objective) {
  if (prices.size() != mix.size())
    throw std::invalid_argument("best_single_from_multi: expected one price per length");
  SinglePriceChoice out;
  out.multi_value = objective(single_server_metrics(mix, dist, prices));
  bool first = true;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const double v = objective(single_server_flat_metrics(mix, dist, prices[i]));
    const bool tie = !strictly_better(v, out.flat_value) && !strictly_better(out.flat_value, v);
    if (first || strictly_better(v, out.flat_value) || (tie && prices[i] < out.price)) {
      out.index = i;
      out.price = prices[i];
      out.flat_value = v;
      first = false;
    }
  }
  out.ratio = out.multi_value > 0.0 ? out.flat_value / out.multi_value : 1.0;
  return out;
}

OptimizationResult optimize_fleet(const Fleet& fleet, const ValueDistribution& dist, Objective objective,
                                  FleetScheme scheme, const SearchOptions& options) {
  OptimizationResult out;
  out.objective = objective;
  switch (scheme) {
    case FleetScheme::flat: {
      const auto best = maximize_price(
          [&](double p) { return objective(fleet_metrics(fleet, dist, std::vector<double>(fleet.size(), p))); },
          dist, options);
      out.schedule = FlatPrice{best.x};
      out.method = dist.is_discrete() ? SearchMethod::exhaustive : SearchMethod::grid_refine;
      out.global = dist.is_discrete();
      break;
    }
    case FleetScheme::per_server: {
      // The fleet objective is a sum of independent per-server terms.
      std::vector<double> prices;
      out.method = dist.is_discrete() ? SearchMethod::exhaustive : SearchMethod::grid_refine;
      out.global = dist.is_discrete();
      for (const auto& server : fleet.servers()) {
        const auto r = optimize_flat(server, dist, objective, options);
        prices.push_back(std::get<FlatPrice>(r.schedule).price);
      }
      out.schedule = PerServerPrices{std::move(prices)};
      break;
    }
    case FleetScheme::per_server_per_length: {
      std::vector<std::vector<double>> prices;
      out.method = SearchMethod::exhaustive;
      for (const auto& server : fleet.servers()) {
        const auto r = optimize_multi(server, dist, objective, options);
        prices.push_back(std::get<PerLengthPrices>(r.schedule).prices);
        if (r.method != SearchMethod::exhaustive) out.method = r.method;
        out.global = out.global && r.global;
      }
      out.schedule = PerServerPerLengthPrices{std::move(prices)};
      break;
    }
  }
  out.objective_value = objective(evaluate(fleet, dist, out.schedule));
  return out;
}

}  // namespace postprice
