#pragma once

#include <string>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

struct Matching {
  std::vector<EdgeId> edges;  // ascending edge ids
};

/// Throws std::invalid_argument unless the edges exist and are vertex disjoint.
void validate_matching(const CylinderGraph& g, const Matching& m);

/// Per-vertex coverage flags.
std::vector<char> covered_vertices(const CylinderGraph& g, const Matching& m);

/// H(m): omega over the dimers plus nu over the unpaired vertices.
double hamiltonian(const CylinderGraph& g, const WeightAssignment& w, const Matching& m);

std::string to_json(const Matching& m);

}  // namespace dimerlab
