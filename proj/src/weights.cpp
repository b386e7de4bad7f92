#include "dimerlab/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dimerlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t == "-inf") return kNegInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in disorder law");
  }
  if (used != t.size()) throw std::invalid_argument("bad number '" + s + "' in disorder law");
  return v;
}

double draw(const Law& l, std::mt19937_64& rng) {
  return std::visit(
      overloaded{
          [](const law::Constant& c) { return c.value; },
          [&](const law::Uniform& u) { return std::uniform_real_distribution<double>(u.lo, u.hi)(rng); },
          [&](const law::Normal& n) { return std::normal_distribution<double>(n.mean, n.sd)(rng); },
          [&](const law::BernoulliShift& b) { return std::bernoulli_distribution(b.p)(rng) ? b.v1 : b.v0; },
          [&](const law::ExponentialShift& e) {
            return e.shift + std::exponential_distribution<double>(e.rate)(rng);
          },
      },
      l);
}

}  // namespace

Law parse_law(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    // A bare number means a constant law.
    return law::Constant{parse_number(text)};
  }
  std::string name = text.substr(0, open);
  std::erase_if(name, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  std::vector<double> args;
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) args.push_back(parse_number(item));

  auto need = [&](std::size_t k) {
    if (args.size() != k) {
      throw std::invalid_argument("law '" + name + "' takes " + std::to_string(k) + " arguments, got " +
                                  std::to_string(args.size()));
    }
  };
  Law out;
  if (name == "const" || name == "constant") {
    need(1);
    out = law::Constant{args[0]};
  } else if (name == "uniform") {
    need(2);
    out = law::Uniform{args[0], args[1]};
  } else if (name == "normal") {
    need(2);
    out = law::Normal{args[0], args[1]};
  } else if (name == "bernoulli" || name == "bernoulli_shift") {
    need(3);
    out = law::BernoulliShift{args[0], args[1], args[2]};
  } else if (name == "exp" || name == "exponential" || name == "exponential_shift") {
    need(2);
    out = law::ExponentialShift{args[0], args[1]};
  } else {
    throw std::invalid_argument("unknown disorder law '" + name + "'");
  }
  validate_law(out);
  return out;
}

std::string format_law(const Law& l) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const law::Constant& c) { os << "const(" << c.value << ")"; },
                 [&](const law::Uniform& u) { os << "uniform(" << u.lo << "," << u.hi << ")"; },
                 [&](const law::Normal& n) { os << "normal(" << n.mean << "," << n.sd << ")"; },
                 [&](const law::BernoulliShift& b) { os << "bernoulli(" << b.p << "," << b.v0 << "," << b.v1 << ")"; },
                 [&](const law::ExponentialShift& e) { os << "exp(" << e.rate << "," << e.shift << ")"; },
             },
             l);
  return os.str();
}

void validate_law(const Law& l) {
  std::visit(overloaded{
                 [](const law::Constant& c) {
                   if (std::isnan(c.value) || c.value == std::numeric_limits<double>::infinity())
                     throw std::invalid_argument("constant law must be finite or -inf");
                 },
                 [](const law::Uniform& u) {
                   if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || !(u.lo < u.hi))
                     throw std::invalid_argument("uniform(a,b) needs finite a < b");
                 },
                 [](const law::Normal& n) {
                   if (!std::isfinite(n.mean) || !std::isfinite(n.sd) || n.sd < 0)
                     throw std::invalid_argument("normal(m,s) needs finite m and s >= 0");
                 },
                 [](const law::BernoulliShift& b) {
                   if (!(b.p >= 0 && b.p <= 1) || !std::isfinite(b.v0) || !std::isfinite(b.v1))
                     throw std::invalid_argument("bernoulli(p,v0,v1) needs p in [0,1] and finite values");
                 },
                 [](const law::ExponentialShift& e) {
                   if (!(e.rate > 0) || !std::isfinite(e.rate) || !std::isfinite(e.shift))
                     throw std::invalid_argument("exp(rate,shift) needs rate > 0 and finite shift");
                 },
             },
             l);
}

bool is_degenerate(const Law& l) {
  return std::visit(overloaded{
                        [](const law::Constant&) { return true; },
                        [](const law::Uniform&) { return false; },
                        [](const law::Normal& n) { return n.sd == 0; },
                        [](const law::BernoulliShift& b) { return b.p == 0 || b.p == 1 || b.v0 == b.v1; },
                        [](const law::ExponentialShift&) { return false; },
                    },
                    l);
}

std::mt19937_64 make_engine(RngSeed seed, RngDomain domain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(seed.stream), static_cast<std::uint32_t>(seed.stream >> 32),
                    static_cast<std::uint32_t>(domain), 0x6d6f6e6fu};
  return std::mt19937_64(seq);
}

void WeightAssignment::refresh_gauge(const CylinderGraph& g) {
  omega_tilde.resize(omega.size());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    omega_tilde[e] = omega[e] - nu[ed.u] - nu[ed.v];
  }
  gauge_offset = 0.0;
  for (double v : nu) gauge_offset += v;
}

void check_weights(const CylinderGraph& g, const WeightAssignment& w) {
  if (static_cast<int>(w.nu.size()) != g.vertex_count()) {
    throw std::invalid_argument("vertex weight count " + std::to_string(w.nu.size()) + " does not match N = " +
                                std::to_string(g.vertex_count()));
  }
  if (static_cast<int>(w.omega.size()) != g.edge_count()) {
    throw std::invalid_argument("edge weight count " + std::to_string(w.omega.size()) +
                                " does not match |E| = " + std::to_string(g.edge_count()));
  }
  auto ok = [](double x) { return !std::isnan(x) && x != std::numeric_limits<double>::infinity(); };
  for (double x : w.nu)
    if (!ok(x)) throw std::invalid_argument("non-finite vertex weight (only -inf is allowed)");
  for (double x : w.omega)
    if (!ok(x)) throw std::invalid_argument("non-finite edge weight (only -inf is allowed)");
}

WeightAssignment make_weights(const CylinderGraph& g, std::vector<double> nu, std::vector<double> omega,
                              RngSeed seed) {
  WeightAssignment w;
  w.nu = std::move(nu);
  w.omega = std::move(omega);
  w.seed = seed;
  check_weights(g, w);
  w.refresh_gauge(g);
  return w;
}

WeightAssignment constant_weights(const CylinderGraph& g, double nu, double omega) {
  return make_weights(g, std::vector<double>(g.vertex_count(), nu), std::vector<double>(g.edge_count(), omega));
}

WeightAssignment sample_weights(const CylinderGraph& g, const DisorderSpec& spec, RngSeed seed) {
  validate_law(spec.vertex_law);
  validate_law(spec.edge_law);
  auto vrng = make_engine(seed, RngDomain::vertex_weights);
  auto erng = make_engine(seed, RngDomain::edge_weights);
  std::vector<double> nu(g.vertex_count());
  std::vector<double> omega(g.edge_count());
  for (auto& x : nu) x = draw(spec.vertex_law, vrng);
  for (auto& x : omega) x = draw(spec.edge_law, erng);
  return make_weights(g, std::move(nu), std::move(omega), seed);
}

WeightAssignment gauge_transformed(const CylinderGraph& g, const WeightAssignment& w) {
  WeightAssignment out;
  out.nu.assign(w.nu.size(), 0.0);
  out.omega = w.omega_tilde;
  out.seed = w.seed;
  out.refresh_gauge(g);
  return out;
}

WeightAssignment scaled(const CylinderGraph& g, const WeightAssignment& w, double beta) {
  WeightAssignment out = w;
  for (auto& x : out.nu) x *= beta;
  for (auto& x : out.omega) x *= beta;
  out.refresh_gauge(g);
  return out;
}

double weighted_degree(const CylinderGraph& g, const WeightAssignment& w, Vertex v) {
  double sum = 0.0;
  for (const auto& [u, e] : g.incident(v)) sum += std::exp(w.omega_tilde[e]);
  return sum;
}

}  // namespace dimerlab
