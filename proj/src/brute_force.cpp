#include "dimerlab/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dimerlab {

namespace {

struct Walker {
  const CylinderGraph& g;
  const WeightAssignment& w;
  const CountingMask& mask;
  const std::function<void(const EnumeratedMatching&)>& f;
  std::vector<char> active;
  std::vector<char> used;
  EnumeratedMatching cur;

  void run(Vertex v) {
    while (v < g.vertex_count() && (!active[v] || used[v])) ++v;
    if (v == g.vertex_count()) {
      EnumeratedMatching m = cur;
      std::sort(m.edges.begin(), m.edges.end());
      f(m);
      return;
    }
    used[v] = 1;
    if (w.nu[v] != kNegInf) {
      cur.hamiltonian += w.nu[v];
      cur.counted_monomers += mask(v) ? 1 : 0;
      run(v + 1);
      cur.hamiltonian -= w.nu[v];
      cur.counted_monomers -= mask(v) ? 1 : 0;
    }
    for (auto [u, e] : g.incident(v)) {
      if (u < v || !active[u] || used[u] || w.omega[e] == kNegInf) continue;
      used[u] = 1;
      cur.edges.push_back(e);
      cur.hamiltonian += w.omega[e];
      run(v + 1);
      cur.hamiltonian -= w.omega[e];
      cur.edges.pop_back();
      used[u] = 0;
    }
    used[v] = 0;
  }
};

}  // namespace

void for_each_matching(const CylinderGraph& g, const WeightAssignment& w, const CountingMask& mask,
                       const std::function<void(const EnumeratedMatching&)>& f,
                       const std::optional<Region>& region) {
  const Region r = region ? *region : Region::whole(g);
  std::vector<char> active(g.vertex_count());
  int count = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    active[v] = r.contains(g, v) ? 1 : 0;
    count += active[v];
  }
  if (count > kBruteForceMaxVertices) {
    throw CapacityError("brute-force enumeration supports at most " + std::to_string(kBruteForceMaxVertices) +
                        " vertices (got " + std::to_string(count) + ")");
  }
  Walker walker{g, w, mask, f, std::move(active), std::vector<char>(g.vertex_count(), 0), {}};
  walker.run(0);
}

MonomerPolynomial brute_force_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                         const CountingMask& mask, const std::optional<Region>& region) {
  const Region r = region ? *region : Region::whole(g);
  MonomerPolynomial p;
  p.N = r.vertex_count(g);
  for (Vertex v = 0; v < g.vertex_count(); ++v) p.mask_size += (r.contains(g, v) && mask(v)) ? 1 : 0;
  // Per-count maxima first so the sums below are exp of nonpositive numbers.
  std::vector<double> top(p.N + 1, kNegInf);
  for_each_matching(g, w, mask, [&](const EnumeratedMatching& m) {
    top[m.counted_monomers] = std::max(top[m.counted_monomers], m.hamiltonian);
  }, r);
  std::vector<double> sum(p.N + 1, 0.0);
  for_each_matching(g, w, mask, [&](const EnumeratedMatching& m) {
    sum[m.counted_monomers] += std::exp(m.hamiltonian - top[m.counted_monomers]);
  }, r);
  p.log_coeffs.assign(p.N + 1, kNegInf);
  for (int j = 0; j <= p.N; ++j)
    if (top[j] != kNegInf) p.log_coeffs[j] = top[j] + std::log(sum[j]);
  return p;
}

double brute_force_max(const CylinderGraph& g, const WeightAssignment& w) {
  double best = kNegInf;
  for_each_matching(g, w, CountingMask::all(g), [&](const EnumeratedMatching& m) {
    best = std::max(best, m.hamiltonian);
  });
  return best;
}

}  // namespace dimerlab
