#include <cmath>
#include <random>

#include "doctest.h"
#include "dimerlab/io.hpp"
#include "dimerlab/stats.hpp"
#include "dimerlab/transfer.hpp"
#include "helpers.hpp"

using namespace dimerlab;

TEST_CASE("summary of a normal sample") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(2.0, 3.0);
  std::vector<double> x(20000);
  for (auto& v : x) v = d(rng);
  const auto s = stats::summarize(x);
  CHECK(s.count == 20000);
  CHECK(s.mean == doctest::Approx(2.0).epsilon(0.03));
  CHECK(s.var == doctest::Approx(9.0).epsilon(0.03));
  CHECK(std::fabs(s.skew) < 0.05);
  CHECK(std::fabs(s.ex_kurt) < 0.1);
  CHECK(stats::ks_normal(x) < 0.015);
}

TEST_CASE("lattice distance of a fair coin") {
  const double d = stats::lattice_normal_distance({0.0, 1.0}, {0.5, 0.5}, 0.5, 0.5);
  CHECK(d == doctest::Approx(stats::normal_cdf(1.0) - 0.5).epsilon(1e-12));
}

TEST_CASE("continuity correction removes the lattice floor") {
  // Binomial(400, 1/2) on the even lattice 0, 2, ..., 800.
  std::vector<double> values, probs;
  double lp = -400 * std::log(2.0);
  for (int k = 0; k <= 400; ++k) {
    values.push_back(2.0 * k);
    probs.push_back(std::exp(lp + std::lgamma(401.0) - std::lgamma(k + 1.0) - std::lgamma(401.0 - k)));
  }
  const double plain = stats::lattice_normal_distance(values, probs, 400, 20);
  const double corrected = stats::lattice_normal_distance_corrected(values, probs, 400, 20);
  CHECK(plain == doctest::Approx(0.5 * 2 / (20 * std::sqrt(2 * M_PI))).epsilon(0.05));
  CHECK(corrected < 0.005);
}

TEST_CASE("chi square accepts the true law and rejects a wrong one") {
  std::mt19937_64 rng(5);
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
  std::discrete_distribution<int> d(probs.begin(), probs.end());
  std::vector<double> counts(4, 0.0);
  for (int k = 0; k < 40000; ++k) counts[d(rng)] += 1;
  CHECK(stats::chi_square_gof(counts, probs).p_value > 1e-3);
  CHECK(stats::chi_square_gof(counts, {0.25, 0.25, 0.25, 0.25}).p_value < 1e-6);
}

TEST_CASE("correlation and slope") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{3, 5, 7, 9, 11};
  CHECK(stats::correlation(x, y) == doctest::Approx(1.0));
  CHECK(stats::slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("weights and polynomials round-trip through JSON") {
  std::mt19937_64 rng(9);
  const auto g = build_cylinder(6, HGraph::cycle(3));
  const auto w = testing::random_weights(rng, g);
  const auto text = io::weights_to_json(g, w).dump();
  const auto [g2, w2] = io::weights_from_json(nlohmann::json::parse(text));
  CHECK(g2.vertex_count() == g.vertex_count());
  CHECK(w2.nu == w.nu);
  CHECK(w2.omega == w.omega);

  const auto p = partition_polynomial(g, w);
  const auto p2 = io::polynomial_from_json(nlohmann::json::parse(io::polynomial_to_json(p).dump()));
  CHECK(p2.log_coeffs == p.log_coeffs);
  CHECK(p2.N == p.N);
}

TEST_CASE("format_double is round-trip exact") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(io::format_double(v)) == v);
  CHECK(io::format_double(-INFINITY) == "-inf");
  CHECK(io::parse_log_value(io::log_value(-INFINITY)) == -INFINITY);
}

TEST_CASE("sha256 of a known string") {
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
