#pragma once

// The h = 1 case as a Jacobi matrix
//   A_n = tridiag(e^{omega_k/2}; i e^{nu_k}; e^{omega_k/2}),   Z_n = |det A_n|,
// and its gauge-transformed real part Omega~ with off-diagonals e^{omega~_k/2}.

#include <limits>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

struct JacobiMatrix {
  std::vector<double> nu;           // log of the imaginary diagonal, length n
  std::vector<double> omega;        // log of the squared off-diagonal, length n - 1
  std::vector<double> omega_tilde;  // omega_k - nu_k - nu_{k+1}

  int size() const { return static_cast<int>(nu.size()); }

  /// Requires a single-vertex fiber.
  static JacobiMatrix from(const CylinderGraph& g, const WeightAssignment& w);
  /// D A D with D_kk = e^{-nu_k/2}: unit imaginary diagonal, off-diagonals e^{omega~/2}.
  JacobiMatrix gauged() const;
};

/// det A_n = i^phase * e^{log_abs}, from the three-term recurrence.
struct Determinant {
  double log_abs = 0.0;
  int phase = 0;                 // mod 4
  bool phase_consistent = true;  // the two recurrence terms always had equal phase
};
Determinant det_abs(const JacobiMatrix& a);

/// Ascending eigenvalues of Omega~.
std::vector<double> omega_spectrum(const JacobiMatrix& a);

/// e^{2x} tr[(Omega~^2 + e^{2x})^{-1}], the Gibbs mean of U at tilt x.
double resolvent_U(const JacobiMatrix& a, double x);

struct JacobiReport {
  int n = 0;
  double det_residual = 0.0;         // |log|det A| - log Z(transfer)|
  bool phase_ok = false;             // phase == n mod 4 and consistent
  double gauge_residual = 0.0;       // |log|det DAD| - (log Z - sum nu)|
  double eigen_residual = 0.0;       // max |eig(Omega~) - signed Lee-Yang atoms|
  double resolvent_residual = 0.0;   // max over the x grid of |resolvent - <U>_x|
};

/// All h = 1 identities for one instance; the Lee-Yang side uses spectrum_exact.
JacobiReport jacobi_report(const CylinderGraph& g, const WeightAssignment& w,
                           const std::vector<double>& x_grid = {-1.0, 0.0, 1.0}, bool with_spectrum = true);

struct LyapunovSample {
  int n = 0;
  double log_z = 0.0;
  double sum_nu = 0.0;
  double log_z_tilde = std::numeric_limits<double>::quiet_NaN();  // log|det DAD|; log_z - sum_nu when NaN
};

struct LyapunovRow {
  int n = 0;
  double f_hat = 0.0;           // mean log Z / n
  double gamma_hat = 0.0;       // mean log Z~ / n
  double mean_nu = 0.0;         // mean sum nu / n
  double gap = 0.0;             // |f_hat - (gamma_hat - mean_nu)|
  double gauge_residual = 0.0;  // |f_hat - (gamma_hat + mean_nu)|
};

struct LyapunovReport {
  std::vector<LyapunovRow> rows;  // ascending n
  bool gap_shrinking = false;     // log gap has negative slope in log n and the top gap is below the first
  double gap_slope = 0.0;
};
LyapunovReport lyapunov_check(const std::vector<LyapunovSample>& table);

}  // namespace dimerlab
