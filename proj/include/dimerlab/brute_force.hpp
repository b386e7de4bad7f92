#pragma once

// Exhaustive enumeration over all matchings. Used as the test oracle.

#include <functional>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/polynomial.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

inline constexpr int kBruteForceMaxVertices = 22;

struct EnumeratedMatching {
  std::vector<EdgeId> edges;  // ascending
  double hamiltonian = 0.0;
  int counted_monomers = 0;
};

/// Calls f once per matching of the region (all vertices when omitted).
void for_each_matching(const CylinderGraph& g, const WeightAssignment& w, const CountingMask& mask,
                       const std::function<void(const EnumeratedMatching&)>& f,
                       const std::optional<Region>& region = std::nullopt);

MonomerPolynomial brute_force_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                         const CountingMask& mask,
                                         const std::optional<Region>& region = std::nullopt);

/// Largest Hamiltonian over all matchings.
double brute_force_max(const CylinderGraph& g, const WeightAssignment& w);

}  // namespace dimerlab
