#pragma once

// Sample statistics for the replica harness.

#include <cstdint>
#include <random>
#include <vector>

namespace dimerlab::stats {

struct Summary {
  int count = 0;
  double mean = 0.0;
  double var = 0.0;       // unbiased
  double skew = 0.0;      // standardized third central moment
  double ex_kurt = 0.0;   // standardized fourth central moment - 3
  double var_se = 0.0;    // standard error of var, sqrt((m4 - var^2) / count)
};
Summary summarize(const std::vector<double>& x);

double normal_cdf(double z);

/// Kolmogorov-Smirnov distance of the sample, standardized by its own mean
/// and standard deviation, to N(0, 1). Zero-variance samples return 0.
double ks_normal(const std::vector<double>& x);

/// Same, after adding independent Uniform(-spacing/2, spacing/2) noise to
/// each value; used for lattice-valued samples.
double ks_normal_jittered(const std::vector<double>& x, double spacing, std::mt19937_64& rng);

/// sup_z |F(z) - Phi(z)| for the lattice law with atoms `values` and masses
/// `probs`, standardized by `mean` and `sd`; includes left limits at atoms.
double lattice_normal_distance(const std::vector<double>& values, const std::vector<double>& probs, double mean,
                               double sd);

/// Same law, but the CDF at each atom is compared with Phi half a lattice
/// span to the right (continuity correction). Atoms must be evenly spaced.
double lattice_normal_distance_corrected(const std::vector<double>& values, const std::vector<double>& probs,
                                         double mean, double sd);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
/// Pearson goodness of fit; categories with expected count below
/// `min_expected` are pooled into one bin.
ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                         double min_expected = 5.0);

double correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Least-squares slope of y on x.
double slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dimerlab::stats
