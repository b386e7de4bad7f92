#pragma once

// Lee-Yang zeroes of the gauge-transformed (monic) partition polynomial.
//
// With nu = 0 the polynomial in w = e^x reads
//   Z(w) = w^zero_mult * prod_i (w^2 + lambda_i^2),
// so its zeroes are 0 and the conjugate pairs +-i lambda_i.

#include <optional>
#include <stdexcept>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/polynomial.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

/// Raised when a root leaves the imaginary axis, which the theory forbids.
class LeeYangError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LeeYangSpectrum {
  std::vector<double> lambdas;  // ascending, > 0
  int zero_mult = 0;
  int N = 0;
  int n = 1;  // layer count, the divisor of the empirical measure

  /// -lambda (descending), zeros, +lambda (ascending): 2|lambdas| + zero_mult atoms.
  std::vector<double> signed_atoms() const;
  double max_lambda() const;
};

/// The empirical measure with both normalizations: mass N/n = h and mass 1.
struct EmpiricalMeasure {
  std::vector<double> atoms;
  double by_n = 1.0;  // divisor n
  double by_N = 1.0;  // divisor N

  double mass_by_n() const { return static_cast<double>(atoms.size()) / by_n; }
};
EmpiricalMeasure empirical_measure(const LeeYangSpectrum& s);

/// Monic polynomial of the region: vertex weights moved onto the edges.
MonomerPolynomial gauge_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                   const std::optional<Region>& region = std::nullopt);

/// Double-precision route: s = w^2 substitution, balanced companion matrix,
/// dense eigensolve. Reliable only while the coefficient-to-root map is well
/// conditioned (small N); see spectrum_exact for everything else.
LeeYangSpectrum spectrum(const MonomerPolynomial& p, int n_layers, double imaginary_tol = 1e-7);

struct ExactSpectrumOptions {
  long initial_bits = 0;  // 0: chosen from the degree
  long max_bits = 1 << 15;
  double agreement = 1e-13;  // relative, between successive precisions
};

/// Arbitrary-precision route: the monic coefficients are recomputed by the
/// transfer recursion in MPFR arithmetic and the real roots of P(-t) are
/// found by Laguerre iteration with deflation and Newton polishing. The
/// precision doubles until two successive runs agree.
LeeYangSpectrum spectrum_exact(const CylinderGraph& g, const WeightAssignment& w,
                               const std::optional<Region>& region = std::nullopt,
                               const ExactSpectrumOptions& opt = {});

/// Max relative (log-space) error of w^zero_mult prod (w^2 + lambda^2)
/// against the normalized coefficients of p.
double reconstruction_residual(const LeeYangSpectrum& s, const MonomerPolynomial& p);

/// Interlacing of a child spectrum (one vertex removed) inside the parent:
/// with signed atoms p_1 <= ... <= p_N and c_1 <= ... <= c_{N-1},
/// p_k <= c_k <= p_{k+1} for every k, up to `slack`.
bool verify_interlacing(const LeeYangSpectrum& parent, const LeeYangSpectrum& child, double slack = 1e-9);

struct LocalizationResult {
  double bound = 0.0;             // max_u sum_{e~u} exp(omega_tilde_e)
  double max_lambda = 0.0;
  bool ok = false;                // max_lambda <= bound + 1e-9
  double tree_bound = 0.0;        // max_u sum_{e~u} exp(omega_tilde_e / 2)
  bool tree_ok = false;
};
LocalizationResult localization_check(const CylinderGraph& g, const WeightAssignment& w,
                                      const LeeYangSpectrum& s);

struct DensityFunctionals {
  double u_n = 0.0;     // n^{-1} <U>_x
  double varQ_n = 0.0;  // n^{-1} Var_x U
};
DensityFunctionals density_functionals(const LeeYangSpectrum& s, double x);

/// F(z) = N^{-1} sum over signed atoms of z / (z + lambda^2); z > 0.
double transform_F(const LeeYangSpectrum& s, double z);

}  // namespace dimerlab
