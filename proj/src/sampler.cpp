#include "dimerlab/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "detail/backtrack.hpp"

namespace dimerlab {

namespace {

using detail::Mask;
using detail::ScalarRing;

// Index drawn with probability proportional to exp(logw).
std::size_t draw_index(std::mt19937_64& rng, const std::vector<double>& logw) {
  double top = kNegInf;
  for (double l : logw) top = std::max(top, l);
  std::vector<double> p(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) p[k] = std::exp(logw[k] - top);
  std::discrete_distribution<std::size_t> d(p.begin(), p.end());
  return d(rng);
}

}  // namespace

struct ExactSampler::Impl {
  const CylinderGraph& g;
  detail::LayerTables<ScalarRing> tables;

  Impl(const CylinderGraph& graph, const WeightAssignment& w)
      : g(graph), tables(detail::LayeredInstance(graph, w, Region::whole(graph), nullptr, 0.0)) {}

  void sample_local(std::mt19937_64& rng, int idx, Mask a, std::vector<EdgeId>& out) const {
    const auto& L = tables.layers[idx];
    const auto& local = tables.local[idx];
    const auto& hedges = g.fiber().edges();
    while (a != 0) {
      const int v = std::countr_zero(a);
      const Mask rest = a & ~(Mask{1} << v);
      std::vector<double> logw{L.nu[v] + local[rest]};
      std::vector<int> partner{-1};
      for (int u = 0; u < tables.h; ++u) {
        if (((rest >> u) & 1u) == 0 || L.vertical[v][u] == kNegInf) continue;
        logw.push_back(L.vertical[v][u] + local[rest & ~(Mask{1} << u)]);
        partner.push_back(u);
      }
      const int u = partner[draw_index(rng, logw)];
      if (u < 0) {
        a = rest;
        continue;
      }
      for (int e = 0; e < static_cast<int>(hedges.size()); ++e) {
        if ((hedges[e].first == v && hedges[e].second == u) || (hedges[e].first == u && hedges[e].second == v)) {
          out.push_back(g.vertical_edge(L.index, e));
          break;
        }
      }
      a = rest & ~(Mask{1} << u);
    }
  }

  Matching draw(std::mt19937_64& rng) const {
    Matching m;
    Mask t = 0;
    for (int idx = static_cast<int>(tables.layers.size()) - 1; idx >= 0; --idx) {
      const auto& L = tables.layers[idx];
      const Mask free = L.present & ~t;
      std::vector<Mask> choices;
      std::vector<double> logw;
      detail::for_each_submask(free & tables.prev_allowed[idx], [&](Mask s) {
        const double l = tables.before(idx, s) + tables.hw_in[idx][s] + tables.local[idx][free & ~s];
        if (l == kNegInf) return;
        choices.push_back(s);
        logw.push_back(l);
      });
      const Mask s = choices[draw_index(rng, logw)];
      sample_local(rng, idx, free & ~s, m.edges);
      for (int j = 0; j < tables.h; ++j)
        if ((s >> j) & 1u) m.edges.push_back(g.horizontal_edge(L.index - 1, j));
      t = s;
    }
    std::sort(m.edges.begin(), m.edges.end());
    return m;
  }
};

ExactSampler::ExactSampler(const CylinderGraph& g, const WeightAssignment& w, const TransferLimits& limits) {
  if (g.fiber_size() > limits.scalar_max_h) {
    throw CapacityError("sampling supports h <= " + std::to_string(limits.scalar_max_h));
  }
  impl_ = std::make_unique<Impl>(g, w);
}

ExactSampler::~ExactSampler() = default;
ExactSampler::ExactSampler(ExactSampler&&) noexcept = default;

Matching ExactSampler::draw(std::mt19937_64& rng) const { return impl_->draw(rng); }

double ExactSampler::log_z() const { return impl_->tables.total; }

std::vector<Matching> exact_sample(const CylinderGraph& g, const WeightAssignment& w, RngSeed seed, int count) {
  ExactSampler sampler(g, w);
  auto rng = make_engine(seed, RngDomain::sampler);
  std::vector<Matching> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(sampler.draw(rng));
  return out;
}

std::vector<double> uniform_t_grid(int m) {
  if (m < 1) throw std::invalid_argument("t grid needs at least one increment");
  std::vector<double> t(m + 1);
  for (int k = 0; k <= m; ++k) t[k] = static_cast<double>(k) / m;
  return t;
}

Observables observables(const CylinderGraph& g, const Matching& m, const std::vector<double>& t_grid, double u) {
  validate_matching(g, m);
  const auto covered = covered_vertices(g, m);
  const int n = g.layers();
  Observables o;
  o.prefix.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    int free = 0;
    for (int j = 0; j < g.fiber_size(); ++j) free += covered[g.vertex(i, j)] ? 0 : 1;
    o.prefix[i + 1] = o.prefix[i] + free;
  }
  o.U = o.prefix[n];
  const double sn = std::sqrt(static_cast<double>(n));
  for (double t : t_grid) {
    if (t < 0 || t > 1) throw std::invalid_argument("height grid points must lie in [0, 1]");
    const int k = static_cast<int>(std::floor(n * t + 1e-12));
    o.height.t.push_back(t);
    o.height.theta.push_back(o.prefix[k]);
    o.height.theta_hat.push_back((o.prefix[k] - n * t * u) / sn);
  }
  return o;
}

std::string heights_csv(const std::vector<HeightSeries>& series) {
  std::ostringstream os;
  os.precision(17);
  os << "sample,t,theta,theta_hat\n";
  for (std::size_t s = 0; s < series.size(); ++s)
    for (std::size_t k = 0; k < series[s].t.size(); ++k)
      os << s << ',' << series[s].t[k] << ',' << series[s].theta[k] << ',' << series[s].theta_hat[k] << '\n';
  return os.str();
}

}  // namespace dimerlab
