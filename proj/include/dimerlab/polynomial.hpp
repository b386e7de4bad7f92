#pragma once

// The monomer-count polynomial Z(x) = sum_j a_j e^{jx}, stored as log a_j.

#include <vector>

#include "dimerlab/logspace.hpp"

namespace dimerlab {

struct MonomerPolynomial {
  /// Entry j is log a_j, -inf when a_j = 0. Length N + 1.
  std::vector<double> log_coeffs;
  /// Number of counted (masked) vertices; a_j = 0 for j > mask_size.
  int mask_size = 0;
  /// Number of vertices of the underlying graph.
  int N = 0;

  int degree() const;
  /// Smallest j with a_j > 0.
  int lowest() const;
};

/// log sum_j a_j e^{jx}.
double log_Z(const MonomerPolynomial& p, double x);

/// Cumulants kappa_1..kappa_order (order <= 4) of the count j under weights
/// a_j e^{jx}. A single nonzero coefficient gives zero for every order >= 2.
std::vector<double> cumulants_U(const MonomerPolynomial& p, double x, int order = 2);

/// Probability mass of j under a_j e^{jx}.
std::vector<double> pmf(const MonomerPolynomial& p, double x = 0.0);

}  // namespace dimerlab
