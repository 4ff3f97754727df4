#include "postprice/values.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace postprice {

namespace {

constexpr double kWeightTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Piecewise-linear helpers on a segment starting at x0 with density y0 and
// slope s, integrated over [x0, x0 + t].
double seg_mass(double y0, double s, double t) { return y0 * t + 0.5 * s * t * t; }

double seg_moment(double x0, double y0, double s, double t) {
  return x0 * y0 * t + 0.5 * (x0 * s + y0) * t * t + s * t * t * t / 3.0;
}

}  // namespace

ValueDistribution ValueDistribution::discrete(std::vector<Atom> atoms) {
  require(!atoms.empty(), "discrete distribution needs at least one atom");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    require(std::isfinite(atoms[k].value) && atoms[k].value >= 0.0,
            "discrete value must be finite and nonnegative");
    require(atoms[k].weight >= 0.0 && atoms[k].weight <= 1.0, "discrete weight must lie in [0,1]");
    if (k > 0) require(atoms[k].value > atoms[k - 1].value, "discrete values must be strictly ascending");
    total += atoms[k].weight;
  }
  require(std::abs(total - 1.0) <= kWeightTolerance,
          "discrete weights must sum to 1 (got " + std::to_string(total) + ")");

  ValueDistribution d;
  d.kind_ = Kind::discrete;
  d.lo_ = atoms.front().value;
  d.hi_ = atoms.back().value;
  const std::size_t n = atoms.size();
  d.below_.assign(n + 1, 0.0);
  d.at_least_.assign(n + 1, 0.0);
  d.moment_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) d.below_[k + 1] = d.below_[k] + atoms[k].weight;
  for (std::size_t k = n; k-- > 0;) {
    d.at_least_[k] = d.at_least_[k + 1] + atoms[k].weight;
    d.moment_[k] = d.moment_[k + 1] + atoms[k].value * atoms[k].weight;
  }
  d.atoms_ = std::move(atoms);
  return d;
}

ValueDistribution ValueDistribution::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi), "uniform bounds must be finite");
  require(lo >= 0.0, "uniform lower bound must be nonnegative");
  require(lo < hi, "uniform needs lo < hi");
  ValueDistribution d;
  d.kind_ = Kind::uniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

ValueDistribution ValueDistribution::piecewise_linear(std::vector<Breakpoint> points) {
  require(points.size() >= 2, "piecewise-linear density needs at least two breakpoints");
  for (std::size_t k = 0; k < points.size(); ++k) {
    require(std::isfinite(points[k].x) && points[k].x >= 0.0, "breakpoint x must be finite and nonnegative");
    require(std::isfinite(points[k].density) && points[k].density >= 0.0, "density must be nonnegative");
    if (k > 0) require(points[k].x > points[k - 1].x, "breakpoint x must be strictly ascending");
  }
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k)
    area += 0.5 * (points[k].density + points[k + 1].density) * (points[k + 1].x - points[k].x);
  require(area > 0.0, "piecewise-linear density has zero mass");
  for (auto& p : points) p.density /= area;

  ValueDistribution d;
  d.kind_ = Kind::piecewise_linear;
  d.lo_ = points.front().x;
  d.hi_ = points.back().x;
  const std::size_t m = points.size();
  d.seg_mass_below_.assign(m, 0.0);
  d.seg_moment_above_.assign(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double w = points[k + 1].x - points[k].x;
    const double s = (points[k + 1].density - points[k].density) / w;
    d.seg_mass_below_[k + 1] = d.seg_mass_below_[k] + seg_mass(points[k].density, s, w);
  }
  for (std::size_t k = m - 1; k-- > 0;) {
    const double w = points[k + 1].x - points[k].x;
    const double s = (points[k + 1].density - points[k].density) / w;
    d.seg_moment_above_[k] = d.seg_moment_above_[k + 1] + seg_moment(points[k].x, points[k].density, s, w);
  }
  // Normalization can leave the total a few ulps off one.
  const double total = d.seg_mass_below_.back();
  for (auto& c : d.seg_mass_below_) c /= total;
  d.knots_ = std::move(points);
  return d;
}

double ValueDistribution::reject_all_price() const noexcept {
  return hi_ + std::max(1.0, hi_) * 1e-6;
}

double ValueDistribution::cdf_strict(double x) const {
  switch (kind_) {
    case Kind::discrete: {
      const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                       [](const Atom& a, double v) { return a.value < v; });
      return below_[static_cast<std::size_t>(it - atoms_.begin())];
    }
    case Kind::uniform:
      return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
    case Kind::piecewise_linear: {
      if (x <= lo_) return 0.0;
      if (x >= hi_) return 1.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                       [](double v, const Breakpoint& b) { return v < b.x; });
      const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
      const double w = knots_[k + 1].x - knots_[k].x;
      const double s = (knots_[k + 1].density - knots_[k].density) / w;
      return std::min(1.0, seg_mass_below_[k] + seg_mass(knots_[k].density, s, x - knots_[k].x));
    }
  }
  return 0.0;
}

double ValueDistribution::tail(double x) const {
  if (kind_ == Kind::discrete) {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                     [](const Atom& a, double v) { return a.value < v; });
    return at_least_[static_cast<std::size_t>(it - atoms_.begin())];
  }
  return 1.0 - cdf_strict(x);
}

double ValueDistribution::partial_expectation(double p) const {
  switch (kind_) {
    case Kind::discrete: {
      const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), p,
                                       [](const Atom& a, double v) { return a.value < v; });
      return moment_[static_cast<std::size_t>(it - atoms_.begin())];
    }
    case Kind::uniform: {
      const double q = std::clamp(p, lo_, hi_);
      return (hi_ - q) * (hi_ + q) / (2.0 * (hi_ - lo_));
    }
    case Kind::piecewise_linear: {
      if (p <= lo_) return seg_moment_above_.front();
      if (p >= hi_) return 0.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), p,
                                       [](double v, const Breakpoint& b) { return v < b.x; });
      const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
      const double x0 = knots_[k].x;
      const double w = knots_[k + 1].x - x0;
      const double s = (knots_[k + 1].density - knots_[k].density) / w;
      const double inside = seg_moment(x0, knots_[k].density, s, w) - seg_moment(x0, knots_[k].density, s, p - x0);
      return std::max(0.0, seg_moment_above_[k + 1] + inside);
    }
  }
  return 0.0;
}

double ValueDistribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  switch (kind_) {
    case Kind::discrete: {
      // Smallest atom whose inclusive CDF exceeds u.
      const auto first = below_.begin() + 1;
      const auto it = std::upper_bound(first, below_.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - first), atoms_.size() - 1);
      return atoms_[k].value;
    }
    case Kind::uniform:
      return lo_ + u * (hi_ - lo_);
    case Kind::piecewise_linear: {
      auto it = std::upper_bound(seg_mass_below_.begin(), seg_mass_below_.end(), u);
      std::size_t k = static_cast<std::size_t>(it - seg_mass_below_.begin());
      if (k == 0) return lo_;
      --k;
      if (k + 1 >= knots_.size()) return hi_;
      const double x0 = knots_[k].x;
      const double w = knots_[k + 1].x - x0;
      const double y0 = knots_[k].density;
      const double s = (knots_[k + 1].density - y0) / w;
      const double target = u - seg_mass_below_[k];
      // Root of y0*t + s*t^2/2 = target in the cancellation-free form.
      const double disc = std::max(0.0, y0 * y0 + 2.0 * s * target);
      const double denom = y0 + std::sqrt(disc);
      const double t = denom > 0.0 ? 2.0 * target / denom : 0.0;
      return std::clamp(x0 + t, x0, knots_[k + 1].x);
    }
  }
  return lo_;
}

std::vector<double> support_candidates(const ValueDistribution& dist, std::size_t grid_points) {
  std::vector<double> out;
  if (dist.is_discrete()) {
    out.reserve(dist.atoms().size() + 2);
    out.push_back(0.0);
    for (const auto& a : dist.atoms())
      if (a.value > 0.0) out.push_back(a.value);
    out.push_back(dist.reject_all_price());
    return out;
  }
  if (grid_points < 2) throw std::invalid_argument("continuous price grid needs at least 2 points");
  const double lo = dist.min_support();
  const double hi = dist.max_support();
  out.reserve(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k)
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1));
  out.back() = hi;
  return out;
}

ValueDistribution make_bimodal(double q2, double v1, double v2) {
  require(q2 > 0.0 && q2 < 1.0, "bimodal weight q2 must lie in (0,1)");
  require(v1 >= 0.0, "bimodal low value must be nonnegative");
  require(v1 < v2, "bimodal values need v1 < v2");
  return ValueDistribution::discrete({{v1, 1.0 - q2}, {v2, q2}});
}

ValueDistribution discretize(const ValueDistribution& dist, std::size_t points) {
  if (points == 0) throw std::invalid_argument("discretization needs at least one point");
  if (dist.is_discrete()) return dist;
  std::vector<Atom> atoms;
  const double w = 1.0 / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double v = dist.quantile((static_cast<double>(k) + 0.5) * w);
    if (!atoms.empty() && v <= atoms.back().value)
      atoms.back().weight += w;
    else
      atoms.push_back({v, w});
  }
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  atoms.back().weight += 1.0 - total;
  return ValueDistribution::discrete(std::move(atoms));
}

}  // namespace postprice
