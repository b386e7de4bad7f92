#pragma once

// Exact layer-by-layer transfer engine.
//
// The state after layer i is the set T of layer-i fibers reserved for a
// horizontal dimer into layer i + 1. Passing from layer i - 1 (state S) to
// layer i (state T) places the horizontal dimers of S, a matching of H on
// the fibers that are neither in S nor in T, and monomers everywhere else.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/polynomial.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which unpaired vertices carry the tilt factor e^x.
struct CountingMask {
  std::vector<char> counted;

  static CountingMask all(const CylinderGraph& g);
  static CountingMask none(const CylinderGraph& g);
  /// Layers first..last inclusive (0-based).
  static CountingMask layers(const CylinderGraph& g, int first, int last);
  static CountingMask vertices(const CylinderGraph& g, const std::vector<Vertex>& vs);

  bool operator()(Vertex v) const { return counted[v] != 0; }
  int count() const;
};

/// Principal subgraph: a layer range with optional deleted vertices.
struct Region {
  int first_layer = 0;
  int last_layer = 0;
  std::vector<char> deleted;  // empty or one flag per vertex of the full graph

  static Region whole(const CylinderGraph& g);
  static Region layers(const CylinderGraph& g, int first, int last);
  Region without(const CylinderGraph& g, const std::vector<Vertex>& vs) const;

  bool contains(const CylinderGraph& g, Vertex v) const;
  int vertex_count(const CylinderGraph& g) const;
};

struct TransferLimits {
  int poly_max_h = 6;
  int poly_max_n = 1024;
  int scalar_max_h = 12;
};

/// Coefficients a_j = sum over matchings with j counted monomers of exp(H).
MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                       const CountingMask& mask, const Region& region,
                                       const TransferLimits& limits = {});
MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                       const CountingMask& mask);
MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w);

/// Partition polynomial of the layer range first..last (0-based, inclusive).
MonomerPolynomial restricted_polynomial(const CylinderGraph& g, const WeightAssignment& w, int first,
                                        int last, const CountingMask& mask);

/// Scalar mode: log Z at fixed tilt x on the counted vertices.
double log_partition(const CylinderGraph& g, const WeightAssignment& w, const Region& region, double x = 0.0,
                     const std::optional<CountingMask>& mask = std::nullopt,
                     const TransferLimits& limits = {});
double log_partition(const CylinderGraph& g, const WeightAssignment& w, double x = 0.0);

/// log Z together with the Gibbs mean and variance of the counted monomers,
/// carried exactly through the scalar transfer (no coefficient tracking).
struct CountMoments {
  double log_z = 0.0;
  double mean = 0.0;
  double var = 0.0;
};
CountMoments count_moments(const CylinderGraph& g, const WeightAssignment& w, const CountingMask& mask,
                           double x = 0.0, const std::optional<Region>& region = std::nullopt,
                           const TransferLimits& limits = {});

/// R_{n,k} = log Z - log Z_[0..k-1] - log Z_[k..n-1] at tilt x; the cut
/// removes the horizontal edges between layers k-1 and k (1 <= k < n).
double remainder_R(const CylinderGraph& g, const WeightAssignment& w, int k, double x = 0.0);

/// Upper bound sum_j (1 + |omega_tilde|) over the cut edges.
double remainder_bound(const CylinderGraph& g, const WeightAssignment& w, int k);

/// Cov(U_left, U_right) for the cut at k by polarization of variances.
double section_covariance(const CylinderGraph& g, const WeightAssignment& w, int k);

struct DyadicNode {
  int generation = 0;
  int first_layer = 0;
  int last_layer = 0;        // block before the terminal-layer drop
  bool terminal_drop = false;
  double T = 0.0;            // log Z_block - log Z_block-minus-last-layer
  double R = 0.0;            // central cut remainder
  double dR_dx = 0.0;        // central finite difference of R in the tilt
  double R_bound = 0.0;      // sum over cut edges of 1 + |omega_tilde|
  int cut = 0;               // first layer of the right half
};

struct DyadicReport {
  std::vector<DyadicNode> nodes;
  std::vector<std::pair<int, int>> leaves;  // blocks after the last generation
  double max_abs_R = 0.0;
  double max_abs_dR = 0.0;
  double max_bound_ratio = 0.0;  // max R / R_bound
  /// log Z - (sum of leaf log Z + sum of R + sum of T); zero up to rounding.
  double decomposition_residual = 0.0;
};

DyadicReport dyadic_report(const CylinderGraph& g, const WeightAssignment& w, int depth, double x = 0.0,
                           double fd_step = 1e-3);

}  // namespace dimerlab
