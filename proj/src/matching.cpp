#include "dimerlab/matching.hpp"

#include "json.hpp"
#include <stdexcept>

namespace dimerlab {

void validate_matching(const CylinderGraph& g, const Matching& m) {
  std::vector<char> seen(g.vertex_count(), 0);
  for (EdgeId e : m.edges) {
    if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("matching uses unknown edge " + std::to_string(e));
    const auto& ed = g.edge(e);
    if (seen[ed.u] || seen[ed.v]) {
      throw std::invalid_argument("matching covers a vertex twice at edge " + std::to_string(e));
    }
    seen[ed.u] = seen[ed.v] = 1;
  }
}

std::vector<char> covered_vertices(const CylinderGraph& g, const Matching& m) {
  std::vector<char> c(g.vertex_count(), 0);
  for (EdgeId e : m.edges) c[g.edge(e).u] = c[g.edge(e).v] = 1;
  return c;
}

double hamiltonian(const CylinderGraph& g, const WeightAssignment& w, const Matching& m) {
  const auto c = covered_vertices(g, m);
  double h = 0.0;
  for (EdgeId e : m.edges) h += w.omega[e];
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!c[v]) h += w.nu[v];
  return h;
}

std::string to_json(const Matching& m) { return nlohmann::json(m.edges).dump(); }

}  // namespace dimerlab
