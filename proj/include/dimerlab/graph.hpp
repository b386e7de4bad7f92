#pragma once

// Cylinder graphs G_n x H.
//
// Indexing is 0-based throughout. Vertex (i, j) sits on layer i in [0, n)
// and fiber j in [0, h); its canonical id is i * h + j (layer-major, fiber
// minor). Edges are stored in canonical order: all horizontal edges first,
// ordered by (k, j) where edge (k, j) joins (k, j) and (k + 1, j), then the
// vertical edges ordered by (layer i, index of the H edge).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dimerlab {

using Vertex = int;
using EdgeId = int;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The fiber graph H on vertices {0, ..., h-1}.
class HGraph {
 public:
  HGraph(int h, std::vector<std::pair<int, int>> edges);

  static HGraph path(int h);
  static HGraph cycle(int h);
  static HGraph complete(int h);
  static HGraph empty(int h);
  /// "path", "cycle", "complete" or "empty".
  static HGraph named(const std::string& family, int h);

  int size() const { return h_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool adjacent(int a, int b) const { return (adjacency_[a] >> b) & 1u; }
  /// Bitmask of the H-neighbours of a.
  std::uint32_t neighbours(int a) const { return adjacency_[a]; }

 private:
  int h_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::uint32_t> adjacency_;
};

struct Edge {
  Vertex u;
  Vertex v;
  bool horizontal;
};

class CylinderGraph {
 public:
  CylinderGraph(int n, HGraph fiber);

  int layers() const { return n_; }
  int fiber_size() const { return fiber_.size(); }
  const HGraph& fiber() const { return fiber_; }

  int vertex_count() const { return n_ * fiber_.size(); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int horizontal_edge_count() const { return (n_ - 1) * fiber_.size(); }

  Vertex vertex(int layer, int fib) const { return layer * fiber_.size() + fib; }
  int layer_of(Vertex v) const { return v / fiber_.size(); }
  int fiber_of(Vertex v) const { return v % fiber_.size(); }

  /// Edge joining (k, j) and (k + 1, j); 0 <= k < n - 1.
  EdgeId horizontal_edge(int k, int j) const { return k * fiber_.size() + j; }
  /// Copy of H edge number e inside layer i.
  EdgeId vertical_edge(int layer, int e) const {
    return horizontal_edge_count() + layer * static_cast<int>(fiber_.edges().size()) + e;
  }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// (neighbour, edge) pairs incident to v, in canonical edge order.
  const std::vector<std::pair<Vertex, EdgeId>>& incident(Vertex v) const { return incident_[v]; }
  int degree(Vertex v) const { return static_cast<int>(incident_[v].size()); }
  int max_degree() const;

  /// Edge between u and v, or -1.
  EdgeId find_edge(Vertex u, Vertex v) const;

 private:
  int n_;
  HGraph fiber_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<Vertex, EdgeId>>> incident_;
};

CylinderGraph build_cylinder(int n, const HGraph& fiber);

}  // namespace dimerlab
