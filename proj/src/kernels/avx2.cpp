// AVX2/FMA variants of the log-space kernels.
//
// Only raw pointers cross the boundary of this file, and every function that
// touches 256-bit registers carries the target attribute, so no inline code
// from shared headers is ever compiled for AVX2. Callers must check
// supported() first.

#include "dimerlab/kernels/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define DIMERLAB_HAVE_X86 1
#else
#define DIMERLAB_HAVE_X86 0
#endif

namespace dimerlab::kernels::avx2 {

#if DIMERLAB_HAVE_X86

#define DL_AVX2 __attribute__((target("avx2,fma")))

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp on [-708, 709]; inputs below -708 (including -inf) give 0.
// Cody-Waite reduction x = k ln2 + r, |r| <= ln2/2, then a degree-13 Taylor
// polynomial; truncation error is below 1e-17 relative.
DL_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lo_cut = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo_cut);
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^k via the exponent field; k lies in [-1022, 1023] after clamping.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_add_epi64(k64, _mm256_set1_epi64x(1023));
  k64 = _mm256_slli_epi64(k64, 52);
  const __m256d scale = _mm256_castsi256_pd(k64);

  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
}

// log1p on [0, 1] through log1p(y) = 2 atanh(y / (2 + y)); s <= 1/3 so the
// odd series converges to double precision in 18 terms.
DL_AVX2 inline __m256d log1p_unit_pd(__m256d y) {
  const __m256d s = _mm256_div_pd(y, _mm256_add_pd(_mm256_set1_pd(2.0), y));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 35.0);
  for (int k = 16; k >= 0; --k) {
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / (2.0 * k + 1.0)));
  }
  return _mm256_mul_pd(_mm256_add_pd(s, s), p);
}

DL_AVX2 inline __m256d log_add_pd(__m256d a, __m256d b) {
  const __m256d neg_inf = _mm256_set1_pd(kNegInf);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d hi = _mm256_max_pd(a, b);
  const __m256d diff = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(a, b));
  const __m256d e = exp_pd(_mm256_xor_pd(diff, sign_mask));
  const __m256d r = _mm256_add_pd(hi, log1p_unit_pd(e));
  const __m256d empty = _mm256_cmp_pd(hi, neg_inf, _CMP_EQ_OQ);
  return _mm256_blendv_pd(r, neg_inf, empty);
}

DL_AVX2 inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

DL_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

// Loads up to four doubles, padding with `fill`.
DL_AVX2 inline __m256d load_partial(const double* p, std::size_t n, double fill) {
  alignas(32) double buf[4] = {fill, fill, fill, fill};
  for (std::size_t i = 0; i < n; ++i) buf[i] = p[i];
  return _mm256_load_pd(buf);
}

// One block of centered_power_sums; advances the abscissae by four.
DL_AVX2 inline void accumulate_powers(__m256d lw, __m256d vnorm, __m256d& x, __m256d& s0,
                                      __m256d& s1, __m256d& s2, __m256d& s3, __m256d& s4) {
  const __m256d p = exp_pd(_mm256_sub_pd(lw, vnorm));
  const __m256d px = _mm256_mul_pd(p, x);
  const __m256d px2 = _mm256_mul_pd(px, x);
  const __m256d px3 = _mm256_mul_pd(px2, x);
  s0 = _mm256_add_pd(s0, p);
  s1 = _mm256_add_pd(s1, px);
  s2 = _mm256_add_pd(s2, px2);
  s3 = _mm256_add_pd(s3, px3);
  s4 = _mm256_fmadd_pd(px3, x, s4);
  x = _mm256_add_pd(x, _mm256_set1_pd(4.0));
}

}  // namespace

bool supported() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

DL_AVX2 void log_accumulate(double* dst, const double* src, std::size_t n, double shift) {
  const __m256d vshift = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(dst + i);
    const __m256d b = _mm256_add_pd(_mm256_loadu_pd(src + i), vshift);
    _mm256_storeu_pd(dst + i, log_add_pd(a, b));
  }
  if (i < n) {
    const std::size_t rest = n - i;
    const __m256d a = load_partial(dst + i, rest, kNegInf);
    const __m256d b = _mm256_add_pd(load_partial(src + i, rest, kNegInf), vshift);
    alignas(32) double out[4];
    _mm256_store_pd(out, log_add_pd(a, b));
    for (std::size_t k = 0; k < rest; ++k) dst[i + k] = out[k];
  }
}

DL_AVX2 double log_sum_exp(const double* v, std::size_t n) {
  __m256d vmax = _mm256_set1_pd(kNegInf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(v + i));
  double hi = hmax(vmax);
  for (std::size_t k = i; k < n; ++k) hi = v[k] > hi ? v[k] : hi;
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;

  const __m256d vhi = _mm256_set1_pd(hi);
  __m256d acc = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vhi)));
  }
  if (i < n) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(load_partial(v + i, n - i, kNegInf), vhi)));
  }
  return hi + std::log(hsum(acc));
}

DL_AVX2 std::array<double, 5> centered_power_sums(const double* logw, std::size_t n,
                                                  double log_norm, double offset, double center) {
  const __m256d vnorm = _mm256_set1_pd(log_norm);
  __m256d x = _mm256_add_pd(_mm256_set_pd(3.0, 2.0, 1.0, 0.0), _mm256_set1_pd(offset - center));
  __m256d s0 = _mm256_setzero_pd(), s1 = s0, s2 = s0, s3 = s0, s4 = s0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) accumulate_powers(_mm256_loadu_pd(logw + i), vnorm, x, s0, s1, s2, s3, s4);
  if (i < n) accumulate_powers(load_partial(logw + i, n - i, kNegInf), vnorm, x, s0, s1, s2, s3, s4);
  return {hsum(s0), hsum(s1), hsum(s2), hsum(s3), hsum(s4)};
}

#undef DL_AVX2

#else  // !DIMERLAB_HAVE_X86

bool supported() { return false; }
void log_accumulate(double* dst, const double* src, std::size_t n, double shift) {
  scalar::log_accumulate(dst, src, n, shift);
}
double log_sum_exp(const double* v, std::size_t n) { return scalar::log_sum_exp(v, n); }
std::array<double, 5> centered_power_sums(const double* logw, std::size_t n, double log_norm,
                                          double offset, double center) {
  return scalar::centered_power_sums(logw, n, log_norm, offset, center);
}

#endif

}  // namespace dimerlab::kernels::avx2
