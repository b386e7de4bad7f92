#include "dimerlab/groundstate.hpp"

#include <algorithm>
#include <stdexcept>

#include "detail/backtrack.hpp"

namespace dimerlab {

namespace {

using detail::Mask;
using detail::MaxRing;

EdgeId vertical_edge_between(const CylinderGraph& g, int layer, int a, int b) {
  const auto& hedges = g.fiber().edges();
  for (int e = 0; e < static_cast<int>(hedges.size()); ++e) {
    if ((hedges[e].first == a && hedges[e].second == b) || (hedges[e].first == b && hedges[e].second == a)) {
      return g.vertical_edge(layer, e);
    }
  }
  throw std::logic_error("no fiber edge between the requested vertices");
}

}  // namespace

GroundState max_weight(const CylinderGraph& g, const WeightAssignment& w, const std::optional<Region>& region,
                       const TransferLimits& limits) {
  if (g.fiber_size() > limits.scalar_max_h) {
    throw CapacityError("ground state supports h <= " + std::to_string(limits.scalar_max_h));
  }
  const Region r = region ? *region : Region::whole(g);
  const detail::LayerTables<MaxRing> tables(detail::LayeredInstance(g, w, r, nullptr, 0.0));
  GroundState gs;
  gs.M = tables.total;

  Mask t = 0;
  for (int idx = static_cast<int>(tables.layers.size()) - 1; idx >= 0; --idx) {
    const auto& L = tables.layers[idx];
    const Mask free = L.present & ~t;
    MaxRing::Accumulator acc;
    detail::for_each_submask(free & tables.prev_allowed[idx], [&](Mask s) {
      const double b = tables.before(idx, s);
      const double loc = tables.local[idx][free & ~s];
      if (b == kNegInf || loc == kNegInf) return;
      acc.add(s, b, tables.hw_in[idx][s], loc);
    });
    const Mask s = acc.arg();
    const auto& local = tables.local[idx];
    Mask a = free & ~s;
    while (a != 0) {
      const int v = std::countr_zero(a);
      const Mask rest = a & ~(Mask{1} << v);
      double best = L.nu[v] + local[rest];
      int partner = -1;
      for (int u = 0; u < tables.h; ++u) {
        if (((rest >> u) & 1u) == 0 || L.vertical[v][u] == kNegInf) continue;
        const double c = L.vertical[v][u] + local[rest & ~(Mask{1} << u)];
        if (c > best) {
          best = c;
          partner = u;
        }
      }
      if (partner < 0) {
        a = rest;
      } else {
        gs.argmax.edges.push_back(vertical_edge_between(g, L.index, v, partner));
        a = rest & ~(Mask{1} << partner);
      }
    }
    for (int j = 0; j < tables.h; ++j)
      if ((s >> j) & 1u) gs.argmax.edges.push_back(g.horizontal_edge(L.index - 1, j));
    t = s;
  }
  std::sort(gs.argmax.edges.begin(), gs.argmax.edges.end());
  return gs;
}

double gse_remainder(const CylinderGraph& g, const WeightAssignment& w, int k) {
  const int n = g.layers();
  if (k < 1 || k >= n) throw std::invalid_argument("cut must satisfy 1 <= k < n");
  return max_weight(g, w).M - max_weight(g, w, Region::layers(g, 0, k - 1)).M -
         max_weight(g, w, Region::layers(g, k, n - 1)).M;
}

double gse_remainder_bound(const CylinderGraph& g, const WeightAssignment& w, int k) {
  double b = 0.0;
  for (int j = 0; j < g.fiber_size(); ++j) b += std::max(0.0, w.omega_tilde[g.horizontal_edge(k - 1, j)]);
  return b;
}

std::vector<TemperaturePoint> zero_temperature_ladder(const CylinderGraph& g, const WeightAssignment& w,
                                                      const std::vector<double>& betas) {
  const double M = max_weight(g, w).M;
  const double log_count = log_partition(g, constant_weights(g, 0.0, 0.0));
  std::vector<TemperaturePoint> out;
  for (double beta : betas) {
    if (!(beta > 0)) throw std::invalid_argument("inverse temperatures must be positive");
    TemperaturePoint p;
    p.beta = beta;
    p.free_energy = log_partition(g, scaled(g, w, beta)) / beta;
    p.gap = p.free_energy - M;
    p.gap_bound = log_count / beta;
    out.push_back(p);
  }
  return out;
}

}  // namespace dimerlab
