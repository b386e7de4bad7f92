#pragma once

// Minimal RAII wrapper over mpfr_t. Every value is created at the calling
// thread's working precision, set through PrecisionScope.

#include <mpfr.h>

#include <utility>

namespace dimerlab::detail {

mpfr_prec_t working_precision();

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Mp {
 public:
  Mp() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  Mp(double d) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, d, MPFR_RNDN); }  // NOLINT
  Mp(const Mp& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp(Mp&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
  Mp& operator=(const Mp& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Mp& operator=(Mp&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mp() { mpfr_clear(v_); }

  static Mp exp_of(double d) {
    Mp r(d);
    mpfr_exp(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// log|x|, -inf for zero.
  double log_abs() const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  Mp& operator+=(const Mp& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator-=(const Mp& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator*=(const Mp& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator/=(const Mp& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend Mp operator+(Mp a, const Mp& b) { return a += b; }
  friend Mp operator-(Mp a, const Mp& b) { return a -= b; }
  friend Mp operator*(Mp a, const Mp& b) { return a *= b; }
  friend Mp operator/(Mp a, const Mp& b) { return a /= b; }
  friend Mp operator-(Mp a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }
  friend bool operator<(const Mp& a, const Mp& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Mp& a, const Mp& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Mp& a, const Mp& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }

  friend Mp abs(Mp a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
  friend Mp sqrt(Mp a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }

 private:
  mpfr_t v_;
};

}  // namespace dimerlab::detail
