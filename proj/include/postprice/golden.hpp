#pragma once

#include <cmath>
#include <utility>

namespace postprice {

struct ScalarOptimum {
  double x;
  double value;
};

/// Golden-section search for the maximum of f on [lo, hi].
///
/// Assumes f is unimodal on the bracket. The endpoints are evaluated too and
/// win when they beat the interior, so a monotone f returns its better end.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-12,
                                      int max_iterations = 200) {
  constexpr double kInvPhi = 0.6180339887498948482;
  ScalarOptimum best{lo, f(lo)};
  const auto consider = [&best](double x, double v) {
    if (v > best.value || (v == best.value && x < best.x)) best = {x, v};
  };
  consider(hi, f(hi));

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > tol * (1.0 + std::abs(c)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  consider(c, fc);
  consider(d, fd);
  return best;
}

}  // namespace postprice
