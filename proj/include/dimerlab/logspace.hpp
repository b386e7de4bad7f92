#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace dimerlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace dimerlab
