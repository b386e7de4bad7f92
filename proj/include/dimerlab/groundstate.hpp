#pragma once

// Zero temperature: the maximal Hamiltonian over all matchings.

#include <optional>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/matching.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

struct GroundState {
  double M = 0.0;
  Matching argmax;
};

/// Max-plus transfer with backpointers. Ties go to the first block in
/// ascending (forward set, then monomer before pairs in fiber order).
GroundState max_weight(const CylinderGraph& g, const WeightAssignment& w,
                       const std::optional<Region>& region = std::nullopt, const TransferLimits& limits = {});

/// M_n - M_[0..k-1] - M_[k..n-1] for the cut between layers k - 1 and k.
double gse_remainder(const CylinderGraph& g, const WeightAssignment& w, int k);

/// sum over the cut edges of max(omega_tilde, 0).
double gse_remainder_bound(const CylinderGraph& g, const WeightAssignment& w, int k);

struct TemperaturePoint {
  double beta = 0.0;
  double free_energy = 0.0;  // beta^{-1} log Z_beta
  double gap = 0.0;          // free_energy - M
  double gap_bound = 0.0;    // beta^{-1} log(number of matchings)
};

/// beta^{-1} log Z with all weights multiplied by beta, against M.
std::vector<TemperaturePoint> zero_temperature_ladder(const CylinderGraph& g, const WeightAssignment& w,
                                                      const std::vector<double>& betas);

}  // namespace dimerlab
