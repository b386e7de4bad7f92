#include "detail/mp.hpp"

#include <cmath>
#include <limits>

namespace dimerlab::detail {

namespace {
thread_local mpfr_prec_t g_precision = 128;
}

mpfr_prec_t working_precision() { return g_precision; }

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(g_precision) { g_precision = bits; }

PrecisionScope::~PrecisionScope() { g_precision = saved_; }

double Mp::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace dimerlab::detail
