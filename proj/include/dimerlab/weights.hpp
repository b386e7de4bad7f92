#pragma once

// Disorder laws, sampled weight assignments and the gauge transformation.

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "dimerlab/graph.hpp"

namespace dimerlab {

namespace law {
struct Constant { double value; };
struct Uniform { double lo, hi; };
struct Normal { double mean, sd; };
/// v1 with probability p, otherwise v0.
struct BernoulliShift { double p, v0, v1; };
/// shift + Exp(rate).
struct ExponentialShift { double rate, shift; };
}  // namespace law

using Law = std::variant<law::Constant, law::Uniform, law::Normal, law::BernoulliShift,
                         law::ExponentialShift>;

/// Parses "const(c)", "uniform(a,b)", "normal(m,s)", "bernoulli(p,v0,v1)" or
/// "exp(rate,shift)". "-inf" is accepted as a constant (disabled sites).
Law parse_law(const std::string& text);
std::string format_law(const Law& l);
void validate_law(const Law& l);
bool is_degenerate(const Law& l);

struct DisorderSpec {
  Law vertex_law = law::Constant{0.0};
  Law edge_law = law::Constant{0.0};
};

/// Seed plus per-replica stream. Weight and sampler draws use separate
/// domains derived from the same pair, so they never share a sequence.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

enum class RngDomain : std::uint64_t { vertex_weights = 1, edge_weights = 2, sampler = 3, misc = 4 };

/// Engine seeded deterministically from (seed, stream, domain).
std::mt19937_64 make_engine(RngSeed seed, RngDomain domain);

struct WeightAssignment {
  std::vector<double> nu;           // per vertex, canonical order
  std::vector<double> omega;        // per edge, canonical order
  std::vector<double> omega_tilde;  // omega_e - nu_u - nu_v
  double gauge_offset = 0.0;        // sum of nu
  RngSeed seed{};

  /// Rebuilds the gauge fields from nu and omega.
  void refresh_gauge(const CylinderGraph& g);
};

WeightAssignment make_weights(const CylinderGraph& g, std::vector<double> nu, std::vector<double> omega,
                              RngSeed seed = {});
WeightAssignment constant_weights(const CylinderGraph& g, double nu, double omega);
WeightAssignment sample_weights(const CylinderGraph& g, const DisorderSpec& spec, RngSeed seed);

/// Same Gibbs measure with every vertex weight moved onto the edges (nu = 0).
WeightAssignment gauge_transformed(const CylinderGraph& g, const WeightAssignment& w);
/// All weights multiplied by beta (inverse temperature).
WeightAssignment scaled(const CylinderGraph& g, const WeightAssignment& w, double beta);

/// sum over edges e ~ v of exp(omega_tilde_e).
double weighted_degree(const CylinderGraph& g, const WeightAssignment& w, Vertex v);

void check_weights(const CylinderGraph& g, const WeightAssignment& w);

}  // namespace dimerlab
