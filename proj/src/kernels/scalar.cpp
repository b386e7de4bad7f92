#include "dimerlab/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dimerlab::kernels::scalar {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}
}  // namespace

void log_accumulate(double* dst, const double* src, std::size_t n, double shift) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = log_add(dst[i], src[i] + shift);
}

double log_sum_exp(const double* v, std::size_t n) {
  double hi = kNegInf;
  for (std::size_t i = 0; i < n; ++i) hi = std::max(hi, v[i]);
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(v[i] - hi);
  return hi + std::log(sum);
}

std::array<double, 5> centered_power_sums(const double* logw, std::size_t n, double log_norm,
                                          double offset, double center) {
  std::array<double, 5> out{};
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::exp(logw[j] - log_norm);
    const double x = static_cast<double>(j) + offset - center;
    const double x2 = x * x;
    out[0] += p;
    out[1] += p * x;
    out[2] += p * x2;
    out[3] += p * x2 * x;
    out[4] += p * x2 * x2;
  }
  return out;
}

}  // namespace dimerlab::kernels::scalar
