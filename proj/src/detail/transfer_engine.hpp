#pragma once

// Layer recursion shared by every transfer mode. A mode is a "ring" type
// providing:
//
//   Value                   element type
//   zero(), one()           additive and multiplicative identities
//   is_zero(v)
//   monomer(nu, counted, x) element of a single unpaired vertex
//   weight(logw)            plain weight e^logw
//   mul(a, b), add_to(acc, v)
//   Accumulator             acc.add(S, big, log_shift, local); acc.finish()
//
// Subsets of a layer are bitmasks over the fibers of H.

#include <bit>
#include <cstdint>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/logspace.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab::detail {

using Mask = std::uint32_t;

/// Ascending enumeration of the submasks of `set`, starting at 0.
template <class F>
inline void for_each_submask(Mask set, F&& f) {
  Mask s = 0;
  do {
    f(s);
    s = (s - set) & set;
  } while (s != 0);
}

struct LayerView {
  int index = 0;
  Mask present = 0;  // fibers not deleted
  Mask counted = 0;  // present and carrying the tilt
  std::vector<double> nu;
  std::vector<std::vector<double>> vertical;  // h x h, -inf where no H edge
};

/// Graph, weights, region and mask flattened per layer.
class LayeredInstance {
 public:
  LayeredInstance(const CylinderGraph& g, const WeightAssignment& w, const Region& region,
                  const std::vector<char>* counted, double x);

  int h() const { return h_; }
  int first() const { return region_.first_layer; }
  int last() const { return region_.last_layer; }
  double tilt() const { return x_; }
  const CylinderGraph& graph() const { return g_; }
  const WeightAssignment& weights() const { return w_; }

  LayerView layer(int i) const;
  /// Fibers of layer i that may reserve a horizontal dimer forward.
  Mask forward_allowed(int i) const;
  /// Log weights of the horizontal edges between i and i + 1, per fiber.
  std::vector<double> horizontal(int i) const;
  /// hw[S] = sum of horizontal log weights over S, for edges between i and i + 1.
  std::vector<double> horizontal_sums(int i) const;

  int present_vertices() const;
  int counted_vertices() const;

 private:
  Mask present_mask(int i) const;

  const CylinderGraph& g_;
  const WeightAssignment& w_;
  Region region_;
  const std::vector<char>* counted_;
  double x_;
  int h_;
};

/// Weight of matchings of H restricted to every subset A of the layer.
template <class R>
std::vector<typename R::Value> local_table(const LayerView& L, int h, double x) {
  const std::size_t size = std::size_t{1} << h;
  std::vector<typename R::Value> local(size, R::zero());
  local[0] = R::one();
  for (Mask a = 1; a < size; ++a) {
    if ((a & ~L.present) != 0) continue;
    const int v = std::countr_zero(a);
    const Mask rest = a & ~(Mask{1} << v);
    auto val = R::mul(R::monomer(L.nu[v], ((L.counted >> v) & 1u) != 0, x), local[rest]);
    for (int u = 0; u < h; ++u) {
      if (((rest >> u) & 1u) == 0 || L.vertical[v][u] == kNegInf) continue;
      R::add_to(val, R::mul(R::weight(L.vertical[v][u]), local[rest & ~(Mask{1} << u)]));
    }
    local[a] = std::move(val);
  }
  return local;
}

/// Runs the recursion over the region. Returns the state vector after the
/// last layer (only state 0 is populated there). When `history` is given it
/// receives the state vector after every layer.
template <class R>
std::vector<typename R::Value> run_layers(const LayeredInstance& inst,
                                          std::vector<std::vector<typename R::Value>>* history = nullptr) {
  const int h = inst.h();
  const std::size_t size = std::size_t{1} << h;
  std::vector<typename R::Value> g(size, R::zero());
  g[0] = R::one();
  Mask prev_allowed = 0;
  std::vector<double> hw(size, 0.0);

  for (int i = inst.first(); i <= inst.last(); ++i) {
    const LayerView L = inst.layer(i);
    const auto local = local_table<R>(L, h, inst.tilt());
    const Mask allowed = inst.forward_allowed(i);
    std::vector<typename R::Value> next(size, R::zero());
    for_each_submask(allowed, [&](Mask t) {
      const Mask free = L.present & ~t;
      typename R::Accumulator acc;
      for_each_submask(free & prev_allowed, [&](Mask s) {
        if (R::is_zero(g[s])) return;
        const auto& loc = local[free & ~s];
        if (R::is_zero(loc)) return;
        acc.add(s, g[s], hw[s], loc);
      });
      next[t] = acc.finish();
    });
    g = std::move(next);
    prev_allowed = allowed;
    if (i < inst.last()) hw = inst.horizontal_sums(i);
    if (history != nullptr) history->push_back(g);
  }
  return g;
}

// Scalar log-space mode at fixed tilt.
struct ScalarRing {
  using Value = double;
  static Value zero() { return kNegInf; }
  static Value one() { return 0.0; }
  static bool is_zero(Value v) { return v == kNegInf; }
  static Value monomer(double nu, bool counted, double x) { return counted ? nu + x : nu; }
  static Value weight(double lw) { return lw; }
  static Value mul(Value a, Value b) { return a + b; }
  static void add_to(Value& acc, Value v) { acc = log_add(acc, v); }

  class Accumulator {
   public:
    void add(Mask, double big, double shift, double local) { terms_.push_back(big + shift + local); }
    double finish() const;

   private:
    std::vector<double> terms_;
  };
};

// Log Z with the exact mean and variance of the counted monomers.
struct JetRing {
  struct Value {
    double l = kNegInf;
    double mean = 0.0;
    double var = 0.0;
  };
  static Value zero() { return {}; }
  static Value one() { return {0.0, 0.0, 0.0}; }
  static bool is_zero(const Value& v) { return v.l == kNegInf; }
  static Value monomer(double nu, bool counted, double x) {
    return counted ? Value{nu + x, 1.0, 0.0} : Value{nu, 0.0, 0.0};
  }
  static Value weight(double lw) { return {lw, 0.0, 0.0}; }
  static Value mul(const Value& a, const Value& b) {
    if (is_zero(a) || is_zero(b)) return zero();
    return {a.l + b.l, a.mean + b.mean, a.var + b.var};
  }
  static void add_to(Value& acc, const Value& v);

  class Accumulator {
   public:
    void add(Mask, const Value& big, double shift, const Value& local) {
      Value t = mul(big, local);
      t.l += shift;
      terms_.push_back(t);
    }
    Value finish() const;

   private:
    std::vector<Value> terms_;
  };
};

// Full coefficient tracking in log space.
struct PolyRing {
  struct Value {
    int lo = 0;
    std::vector<double> c;  // c[k] = log coefficient of index lo + k
  };
  static Value zero() { return {}; }
  static Value one() { return {0, {0.0}}; }
  static bool is_zero(const Value& v) { return v.c.empty(); }
  static Value monomer(double nu, bool counted, double) {
    if (nu == kNegInf) return zero();
    return {counted ? 1 : 0, {nu}};
  }
  static Value weight(double lw) {
    if (lw == kNegInf) return zero();
    return {0, {lw}};
  }
  static Value mul(const Value& a, const Value& b);
  static void add_to(Value& acc, const Value& v);

  class Accumulator {
   public:
    void add(Mask, const Value& big, double shift, const Value& local);
    Value finish();

   private:
    void ensure(int lo, int hi);
    Value out_;
  };
};

// Max-plus mode; remembers the first maximizing S in ascending order.
struct MaxRing {
  using Value = double;
  static Value zero() { return kNegInf; }
  static Value one() { return 0.0; }
  static bool is_zero(Value v) { return v == kNegInf; }
  static Value monomer(double nu, bool, double) { return nu; }
  static Value weight(double lw) { return lw; }
  static Value mul(Value a, Value b) { return a + b; }
  static void add_to(Value& acc, Value v) {
    if (v > acc) acc = v;
  }

  class Accumulator {
   public:
    void add(Mask s, double big, double shift, double local) {
      const double v = big + shift + local;
      if (v > best_) {
        best_ = v;
        arg_ = s;
      }
    }
    double finish() const { return best_; }
    Mask arg() const { return arg_; }

   private:
    double best_ = kNegInf;
    Mask arg_ = 0;
  };
};

}  // namespace dimerlab::detail
