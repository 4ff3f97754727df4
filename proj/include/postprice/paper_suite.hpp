#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace postprice {

struct SuiteCheck {
  std::string name;
  std::string group;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteOptions {
  /// Keep checks whose group equals the filter or whose name starts with it
  /// followed by punctuation.
  std::string filter;
  /// Tolerance for closed-form comparisons. Rational values are compared
  /// exactly, so they pass even at 0.
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
};

std::vector<SuiteCheck> run_paper_suite(const SuiteOptions& options);

void print_suite(std::ostream& out, const std::vector<SuiteCheck>& checks, bool csv);

}  // namespace postprice
