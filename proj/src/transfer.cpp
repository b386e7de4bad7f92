#include "dimerlab/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "detail/transfer_engine.hpp"
#include "dimerlab/kernels/kernels.hpp"

namespace dimerlab {

namespace detail {

LayeredInstance::LayeredInstance(const CylinderGraph& g, const WeightAssignment& w, const Region& region,
                                 const std::vector<char>* counted, double x)
    : g_(g), w_(w), region_(region), counted_(counted), x_(x), h_(g.fiber_size()) {
  check_weights(g, w);
  if (region.first_layer < 0 || region.last_layer >= g.layers() || region.first_layer > region.last_layer) {
    throw std::invalid_argument("layer range [" + std::to_string(region.first_layer) + ", " +
                                std::to_string(region.last_layer) + "] is not inside [0, " +
                                std::to_string(g.layers() - 1) + "]");
  }
  if (!region.deleted.empty() && static_cast<int>(region.deleted.size()) != g.vertex_count()) {
    throw std::invalid_argument("deleted-vertex flags do not cover the graph");
  }
  if (counted != nullptr && static_cast<int>(counted->size()) != g.vertex_count()) {
    throw std::invalid_argument("counting mask does not cover the graph");
  }
  if (std::isnan(x) || std::isinf(x)) throw std::invalid_argument("tilt must be finite");
}

Mask LayeredInstance::present_mask(int i) const {
  Mask m = (Mask{1} << h_) - 1;
  if (!region_.deleted.empty()) {
    for (int j = 0; j < h_; ++j)
      if (region_.deleted[g_.vertex(i, j)]) m &= ~(Mask{1} << j);
  }
  return m;
}

LayerView LayeredInstance::layer(int i) const {
  LayerView L;
  L.index = i;
  L.present = present_mask(i);
  L.nu.resize(h_);
  L.vertical.assign(h_, std::vector<double>(h_, kNegInf));
  for (int j = 0; j < h_; ++j) {
    const Vertex v = g_.vertex(i, j);
    L.nu[j] = w_.nu[v];
    if (((L.present >> j) & 1u) && (counted_ == nullptr || (*counted_)[v])) L.counted |= Mask{1} << j;
  }
  const auto& hedges = g_.fiber().edges();
  for (int e = 0; e < static_cast<int>(hedges.size()); ++e) {
    const auto [a, b] = hedges[e];
    const double lw = w_.omega[g_.vertical_edge(i, e)];
    L.vertical[a][b] = lw;
    L.vertical[b][a] = lw;
  }
  return L;
}

Mask LayeredInstance::forward_allowed(int i) const {
  if (i >= region_.last_layer) return 0;
  return present_mask(i) & present_mask(i + 1);
}

std::vector<double> LayeredInstance::horizontal(int i) const {
  std::vector<double> out(h_);
  for (int j = 0; j < h_; ++j) out[j] = w_.omega[g_.horizontal_edge(i, j)];
  return out;
}

std::vector<double> LayeredInstance::horizontal_sums(int i) const {
  const auto hz = horizontal(i);
  const std::size_t size = std::size_t{1} << h_;
  std::vector<double> hw(size, 0.0);
  for (Mask s = 1; s < size; ++s) {
    const int j = std::countr_zero(s);
    hw[s] = hw[s & (s - 1)] + hz[j];
  }
  return hw;
}

int LayeredInstance::present_vertices() const {
  int c = 0;
  for (int i = first(); i <= last(); ++i) c += std::popcount(present_mask(i));
  return c;
}

int LayeredInstance::counted_vertices() const {
  int c = 0;
  for (int i = first(); i <= last(); ++i) c += std::popcount(layer(i).counted);
  return c;
}

double ScalarRing::Accumulator::finish() const { return kernels::log_sum_exp(terms_); }

void JetRing::add_to(Value& acc, const Value& v) {
  if (is_zero(v)) return;
  if (is_zero(acc)) {
    acc = v;
    return;
  }
  const double l = log_add(acc.l, v.l);
  const double pa = std::exp(acc.l - l);
  const double pv = std::exp(v.l - l);
  const double mean = pa * acc.mean + pv * v.mean;
  const double da = acc.mean - mean;
  const double dv = v.mean - mean;
  acc.var = pa * (acc.var + da * da) + pv * (v.var + dv * dv);
  acc.mean = mean;
  acc.l = l;
}

JetRing::Value JetRing::Accumulator::finish() const {
  if (terms_.empty()) return zero();
  std::vector<double> ls(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) ls[k] = terms_[k].l;
  const double l = kernels::log_sum_exp(ls);
  double mean = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) mean += std::exp(ls[k] - l) * terms_[k].mean;
  double var = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const double d = terms_[k].mean - mean;
    var += std::exp(ls[k] - l) * (terms_[k].var + d * d);
  }
  return {l, mean, var};
}

PolyRing::Value PolyRing::mul(const Value& a, const Value& b) {
  if (is_zero(a) || is_zero(b)) return zero();
  Value out{a.lo + b.lo, std::vector<double>(a.c.size() + b.c.size() - 1, kNegInf)};
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] = log_add(out.c[i + j], a.c[i] + b.c[j]);
  return out;
}

void PolyRing::add_to(Value& acc, const Value& v) {
  if (is_zero(v)) return;
  if (is_zero(acc)) {
    acc = v;
    return;
  }
  const int lo = std::min(acc.lo, v.lo);
  const int hi = std::max(acc.lo + static_cast<int>(acc.c.size()), v.lo + static_cast<int>(v.c.size()));
  std::vector<double> c(static_cast<std::size_t>(hi - lo), kNegInf);
  for (std::size_t k = 0; k < acc.c.size(); ++k) c[acc.lo - lo + k] = acc.c[k];
  for (std::size_t k = 0; k < v.c.size(); ++k) c[v.lo - lo + k] = log_add(c[v.lo - lo + k], v.c[k]);
  acc = {lo, std::move(c)};
}

void PolyRing::Accumulator::ensure(int lo, int hi) {
  if (out_.c.empty()) {
    out_.lo = lo;
    out_.c.assign(static_cast<std::size_t>(hi - lo), kNegInf);
    return;
  }
  const int cur_hi = out_.lo + static_cast<int>(out_.c.size());
  if (lo < out_.lo) {
    out_.c.insert(out_.c.begin(), static_cast<std::size_t>(out_.lo - lo), kNegInf);
    out_.lo = lo;
  }
  if (hi > cur_hi) out_.c.resize(out_.c.size() + static_cast<std::size_t>(hi - cur_hi), kNegInf);
}

void PolyRing::Accumulator::add(Mask, const Value& big, double shift, const Value& local) {
  const int len = static_cast<int>(big.c.size());
  ensure(big.lo + local.lo, big.lo + local.lo + static_cast<int>(local.c.size()) - 1 + len);
  for (std::size_t k = 0; k < local.c.size(); ++k) {
    const double s = shift + local.c[k];
    if (s == kNegInf) continue;
    const int base = big.lo + local.lo + static_cast<int>(k) - out_.lo;
    kernels::log_accumulate(std::span<double>(out_.c.data() + base, big.c.size()), big.c, s);
  }
}

PolyRing::Value PolyRing::Accumulator::finish() {
  std::size_t a = 0;
  std::size_t b = out_.c.size();
  while (a < b && out_.c[a] == kNegInf) ++a;
  while (b > a && out_.c[b - 1] == kNegInf) --b;
  if (a == b) return zero();
  return {out_.lo + static_cast<int>(a),
          std::vector<double>(out_.c.begin() + static_cast<std::ptrdiff_t>(a),
                              out_.c.begin() + static_cast<std::ptrdiff_t>(b))};
}

}  // namespace detail

CountingMask CountingMask::all(const CylinderGraph& g) { return {std::vector<char>(g.vertex_count(), 1)}; }

CountingMask CountingMask::none(const CylinderGraph& g) { return {std::vector<char>(g.vertex_count(), 0)}; }

CountingMask CountingMask::layers(const CylinderGraph& g, int first, int last) {
  CountingMask m = none(g);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const int i = g.layer_of(v);
    if (i >= first && i <= last) m.counted[v] = 1;
  }
  return m;
}

CountingMask CountingMask::vertices(const CylinderGraph& g, const std::vector<Vertex>& vs) {
  CountingMask m = none(g);
  for (Vertex v : vs) m.counted.at(v) = 1;
  return m;
}

int CountingMask::count() const { return static_cast<int>(std::count(counted.begin(), counted.end(), 1)); }

Region Region::whole(const CylinderGraph& g) { return {0, g.layers() - 1, {}}; }

Region Region::layers(const CylinderGraph& g, int first, int last) {
  if (first < 0 || last >= g.layers() || first > last) {
    throw std::invalid_argument("bad layer range [" + std::to_string(first) + ", " + std::to_string(last) + "]");
  }
  return {first, last, {}};
}

Region Region::without(const CylinderGraph& g, const std::vector<Vertex>& vs) const {
  Region r = *this;
  if (r.deleted.empty()) r.deleted.assign(g.vertex_count(), 0);
  for (Vertex v : vs) r.deleted.at(v) = 1;
  return r;
}

bool Region::contains(const CylinderGraph& g, Vertex v) const {
  const int i = g.layer_of(v);
  return i >= first_layer && i <= last_layer && (deleted.empty() || !deleted[v]);
}

int Region::vertex_count(const CylinderGraph& g) const {
  int c = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) c += contains(g, v) ? 1 : 0;
  return c;
}

namespace {

void check_poly_caps(const CylinderGraph& g, const Region& r, const TransferLimits& lim) {
  if (g.fiber_size() > lim.poly_max_h) {
    throw CapacityError("polynomial mode supports h <= " + std::to_string(lim.poly_max_h) + " (got h = " +
                        std::to_string(g.fiber_size()) + "); use scalar mode or raise the limit");
  }
  const int n = r.last_layer - r.first_layer + 1;
  if (n > lim.poly_max_n) {
    throw CapacityError("polynomial mode supports n <= " + std::to_string(lim.poly_max_n) + " (got n = " +
                        std::to_string(n) + ")");
  }
}

void check_scalar_caps(const CylinderGraph& g, const TransferLimits& lim) {
  if (g.fiber_size() > lim.scalar_max_h) {
    throw CapacityError("scalar mode supports h <= " + std::to_string(lim.scalar_max_h) + " (got h = " +
                        std::to_string(g.fiber_size()) + ")");
  }
}

}  // namespace

MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                       const CountingMask& mask, const Region& region,
                                       const TransferLimits& limits) {
  check_poly_caps(g, region, limits);
  detail::LayeredInstance inst(g, w, region, &mask.counted, 0.0);
  const auto state = detail::run_layers<detail::PolyRing>(inst);
  MonomerPolynomial p;
  p.N = inst.present_vertices();
  p.mask_size = inst.counted_vertices();
  p.log_coeffs.assign(static_cast<std::size_t>(p.N) + 1, kNegInf);
  const auto& z = state[0];
  for (std::size_t k = 0; k < z.c.size(); ++k) p.log_coeffs[z.lo + k] = z.c[k];
  return p;
}

MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                       const CountingMask& mask) {
  return partition_polynomial(g, w, mask, Region::whole(g));
}

MonomerPolynomial partition_polynomial(const CylinderGraph& g, const WeightAssignment& w) {
  return partition_polynomial(g, w, CountingMask::all(g), Region::whole(g));
}

MonomerPolynomial restricted_polynomial(const CylinderGraph& g, const WeightAssignment& w, int first, int last,
                                        const CountingMask& mask) {
  return partition_polynomial(g, w, mask, Region::layers(g, first, last));
}

double log_partition(const CylinderGraph& g, const WeightAssignment& w, const Region& region, double x,
                     const std::optional<CountingMask>& mask, const TransferLimits& limits) {
  check_scalar_caps(g, limits);
  detail::LayeredInstance inst(g, w, region, mask ? &mask->counted : nullptr, x);
  return detail::run_layers<detail::ScalarRing>(inst)[0];
}

double log_partition(const CylinderGraph& g, const WeightAssignment& w, double x) {
  return log_partition(g, w, Region::whole(g), x);
}

CountMoments count_moments(const CylinderGraph& g, const WeightAssignment& w, const CountingMask& mask, double x,
                           const std::optional<Region>& region, const TransferLimits& limits) {
  check_scalar_caps(g, limits);
  const Region r = region ? *region : Region::whole(g);
  detail::LayeredInstance inst(g, w, r, &mask.counted, x);
  const auto z = detail::run_layers<detail::JetRing>(inst)[0];
  return {z.l, z.mean, z.var};
}

double remainder_R(const CylinderGraph& g, const WeightAssignment& w, int k, double x) {
  const int n = g.layers();
  if (k < 1 || k >= n) throw std::invalid_argument("cut must satisfy 1 <= k < n");
  const double whole = log_partition(g, w, Region::whole(g), x);
  const double left = log_partition(g, w, Region::layers(g, 0, k - 1), x);
  const double right = log_partition(g, w, Region::layers(g, k, n - 1), x);
  return whole - left - right;
}

double remainder_bound(const CylinderGraph& g, const WeightAssignment& w, int k) {
  double b = 0.0;
  for (int j = 0; j < g.fiber_size(); ++j) b += 1.0 + std::fabs(w.omega_tilde[g.horizontal_edge(k - 1, j)]);
  return b;
}

double section_covariance(const CylinderGraph& g, const WeightAssignment& w, int k) {
  const int n = g.layers();
  if (k < 1 || k >= n) throw std::invalid_argument("cut must satisfy 1 <= k < n");
  const double var_all = cumulants_U(partition_polynomial(g, w, CountingMask::all(g)), 0.0, 2)[1];
  const double var_left = cumulants_U(partition_polynomial(g, w, CountingMask::layers(g, 0, k - 1)), 0.0, 2)[1];
  const double var_right = cumulants_U(partition_polynomial(g, w, CountingMask::layers(g, k, n - 1)), 0.0, 2)[1];
  return 0.5 * (var_all - var_left - var_right);
}

DyadicReport dyadic_report(const CylinderGraph& g, const WeightAssignment& w, int depth, double x,
                           double fd_step) {
  const int n = g.layers();
  if (depth < 0 || (depth > 0 && (n >> depth) < 1)) {
    throw std::invalid_argument("dyadic depth " + std::to_string(depth) + " exceeds log2(n) for n = " +
                                std::to_string(n));
  }
  auto lz = [&](int a, int b, double t) { return log_partition(g, w, Region::layers(g, a, b), t); };
  auto remainder_at = [&](int a, int cut, int b, double t) { return lz(a, b, t) - lz(a, cut - 1, t) - lz(cut, b, t); };

  DyadicReport rep;
  std::vector<std::pair<int, int>> blocks{{0, n - 1}};
  double total_errors = 0.0;
  for (int gen = 0; gen < depth; ++gen) {
    std::vector<std::pair<int, int>> children;
    for (auto [a, b] : blocks) {
      DyadicNode node;
      node.generation = gen;
      node.first_layer = a;
      node.last_layer = b;
      int end = b;
      if ((b - a + 1) % 2 == 1) {
        node.terminal_drop = true;
        node.T = lz(a, b, x) - lz(a, b - 1, x);
        end = b - 1;
      }
      const int half = (end - a + 1) / 2;
      node.cut = a + half;
      node.R = remainder_at(a, node.cut, end, x);
      node.dR_dx = (remainder_at(a, node.cut, end, x + fd_step) - remainder_at(a, node.cut, end, x - fd_step)) /
                   (2 * fd_step);
      node.R_bound = remainder_bound(g, w, node.cut);
      rep.max_abs_R = std::max(rep.max_abs_R, std::fabs(node.R));
      rep.max_abs_dR = std::max(rep.max_abs_dR, std::fabs(node.dR_dx));
      if (node.R_bound > 0) rep.max_bound_ratio = std::max(rep.max_bound_ratio, node.R / node.R_bound);
      total_errors += node.R + node.T;
      children.emplace_back(a, node.cut - 1);
      children.emplace_back(node.cut, end);
      rep.nodes.push_back(node);
    }
    blocks = std::move(children);
  }
  rep.leaves = blocks;
  double leaf_sum = 0.0;
  for (auto [a, b] : blocks) leaf_sum += lz(a, b, x);
  rep.decomposition_residual = lz(0, n - 1, x) - (leaf_sum + total_errors);
  return rep;
}

}  // namespace dimerlab
