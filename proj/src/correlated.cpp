#include "postprice/correlated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace postprice {

CorrelatedClassList::CorrelatedClassList(std::vector<JobClass> classes) : classes_(std::move(classes)) {
  double total = 0.0;
  for (std::size_t j = 0; j < classes_.size(); ++j) {
    const auto& c = classes_[j];
    const std::string where = "class " + std::to_string(j) + ": ";
    if (!(c.rate > 0.0 && c.rate <= 1.0)) throw std::invalid_argument(where + "rate must lie in (0,1]");
    if (c.length < 1) throw std::invalid_argument(where + "length must be positive");
    if (!(c.value >= 0.0) || !std::isfinite(c.value))
      throw std::invalid_argument(where + "value must be finite and nonnegative");
    total += c.rate;
  }
  if (total > 1.0 + 1e-12)
    throw std::invalid_argument("class rates sum to " + std::to_string(total) + " > 1");
}

int CorrelatedClassList::max_length() const noexcept {
  int m = 1;
  for (const auto& c : classes_) m = std::max(m, c.length);
  return m;
}

double CorrelatedClassList::arrival_rate() const noexcept {
  double r = 0.0;
  for (const auto& c : classes_) r += c.rate;
  return r;
}

std::vector<JobClass> discretize_class(double rate, int length, const ValueDistribution& dist,
                                       std::size_t points) {
  const auto grid = discretize(dist, points);
  std::vector<JobClass> out;
  out.reserve(grid.atoms().size());
  for (const auto& atom : grid.atoms()) out.push_back({rate * atom.weight, length, atom.value});
  return out;
}

}  // namespace postprice
