#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/weights.hpp"

namespace testing {

using namespace dimerlab;

inline HGraph random_fiber(std::mt19937_64& rng, int h) {
  std::vector<std::pair<int, int>> edges;
  std::bernoulli_distribution coin(0.6);
  for (int a = 0; a < h; ++a)
    for (int b = a + 1; b < h; ++b)
      if (coin(rng)) edges.emplace_back(a, b);
  return HGraph(h, edges);
}

inline WeightAssignment random_weights(std::mt19937_64& rng, const CylinderGraph& g, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> nu(g.vertex_count()), omega(g.edge_count());
  for (auto& v : nu) v = d(rng);
  for (auto& v : omega) v = d(rng);
  return make_weights(g, nu, omega);
}

inline double rel_log_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(1.0, std::fabs(b));
}

}  // namespace testing
