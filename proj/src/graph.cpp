#include "dimerlab/graph.hpp"

#include <algorithm>
#include <set>

namespace dimerlab {

namespace {
// Subset states of a layer are 32-bit masks; the transfer caps are far below.
constexpr int kMaxFiber = 30;
}  // namespace

HGraph::HGraph(int h, std::vector<std::pair<int, int>> edges) : h_(h), edges_(std::move(edges)) {
  if (h < 1) throw GraphError("H needs at least one vertex");
  if (h > kMaxFiber) throw GraphError("H has more than " + std::to_string(kMaxFiber) + " vertices");
  adjacency_.assign(h, 0u);
  std::set<std::pair<int, int>> seen;
  for (auto& [a, b] : edges_) {
    if (a < 0 || b < 0 || a >= h || b >= h) {
      throw GraphError("H edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    }
    if (a == b) throw GraphError("H has a self-loop at vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) {
      throw GraphError("H has a duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    adjacency_[a] |= 1u << b;
    adjacency_[b] |= 1u << a;
  }
}

HGraph HGraph::path(int h) {
  std::vector<std::pair<int, int>> e;
  for (int j = 0; j + 1 < h; ++j) e.emplace_back(j, j + 1);
  return HGraph(h, std::move(e));
}

HGraph HGraph::cycle(int h) {
  if (h < 3) return path(h);
  auto e = path(h).edges();
  e.emplace_back(0, h - 1);
  return HGraph(h, std::move(e));
}

HGraph HGraph::complete(int h) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < h; ++a)
    for (int b = a + 1; b < h; ++b) e.emplace_back(a, b);
  return HGraph(h, std::move(e));
}

HGraph HGraph::empty(int h) { return HGraph(h, {}); }

HGraph HGraph::named(const std::string& family, int h) {
  if (family == "path") return path(h);
  if (family == "cycle") return cycle(h);
  if (family == "complete") return complete(h);
  if (family == "empty") return empty(h);
  throw GraphError("unknown H family '" + family + "' (expected path, cycle, complete or empty)");
}

CylinderGraph::CylinderGraph(int n, HGraph fiber) : n_(n), fiber_(std::move(fiber)) {
  if (n < 1) throw GraphError("cylinder needs at least one layer");
  const int h = fiber_.size();
  edges_.reserve(static_cast<std::size_t>((n - 1) * h) + static_cast<std::size_t>(n) * fiber_.edges().size());
  for (int k = 0; k + 1 < n; ++k)
    for (int j = 0; j < h; ++j) edges_.push_back({vertex(k, j), vertex(k + 1, j), true});
  for (int i = 0; i < n; ++i)
    for (const auto& [a, b] : fiber_.edges()) edges_.push_back({vertex(i, a), vertex(i, b), false});

  incident_.assign(static_cast<std::size_t>(n * h), {});
  for (EdgeId e = 0; e < edge_count(); ++e) {
    incident_[edges_[e].u].emplace_back(edges_[e].v, e);
    incident_[edges_[e].v].emplace_back(edges_[e].u, e);
  }
  for (auto& inc : incident_) {
    std::sort(inc.begin(), inc.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
  }
}

int CylinderGraph::max_degree() const {
  int d = 0;
  for (const auto& inc : incident_) d = std::max(d, static_cast<int>(inc.size()));
  return d;
}

EdgeId CylinderGraph::find_edge(Vertex u, Vertex v) const {
  for (const auto& [w, e] : incident_[u])
    if (w == v) return e;
  return -1;
}

CylinderGraph build_cylinder(int n, const HGraph& fiber) { return CylinderGraph(n, fiber); }

}  // namespace dimerlab
