#pragma once

// Exact sampling from the Gibbs measure and matching observables.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dimerlab/graph.hpp"
#include "dimerlab/matching.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

/// Forward messages at x = 0, computed once; draws are independent given the engine.
class ExactSampler {
 public:
  ExactSampler(const CylinderGraph& g, const WeightAssignment& w, const TransferLimits& limits = {});
  ~ExactSampler();
  ExactSampler(ExactSampler&&) noexcept;

  Matching draw(std::mt19937_64& rng) const;
  double log_z() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `count` i.i.d. draws from the sampler domain of `seed`.
std::vector<Matching> exact_sample(const CylinderGraph& g, const WeightAssignment& w, RngSeed seed, int count);

struct HeightSeries {
  std::vector<double> t;
  std::vector<double> theta;      // U over layers 1..floor(nt)
  std::vector<double> theta_hat;  // n^{-1/2} (theta - n t u)
};

struct Observables {
  int U = 0;
  std::vector<int> prefix;  // prefix[k] = unpaired vertices on the first k layers, k = 0..n
  HeightSeries height;
};

/// t = 0, 1/m, ..., 1.
std::vector<double> uniform_t_grid(int m = 16);

/// Validates m; `u` is the centering constant per layer.
Observables observables(const CylinderGraph& g, const Matching& m, const std::vector<double>& t_grid,
                        double u = 0.0);

/// Rows "sample,t,theta,theta_hat".
std::string heights_csv(const std::vector<HeightSeries>& series);

}  // namespace dimerlab
