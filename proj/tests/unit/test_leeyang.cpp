#include <cmath>
#include <random>

#include "doctest.h"
#include "dimerlab/leeyang.hpp"
#include "helpers.hpp"

using namespace dimerlab;

TEST_CASE("two-vertex spectrum is exp(omega_tilde / 2)") {
  const auto g = build_cylinder(2, HGraph::path(1));
  for (double t : {-3.0, -0.4, 0.0, 1.7}) {
    const auto w = make_weights(g, {0.3, -0.1}, {t + 0.2});
    const auto s = spectrum_exact(g, w);
    REQUIRE(s.lambdas.size() == 1);
    CHECK(s.zero_mult == 0);
    CHECK(std::fabs(s.lambdas[0] - std::exp(w.omega_tilde[0] / 2)) <= 1e-12 * std::exp(w.omega_tilde[0] / 2));
    const auto c = spectrum(gauge_polynomial(g, w), 2);
    CHECK(std::fabs(c.lambdas[0] - std::exp(w.omega_tilde[0] / 2)) <= 1e-12 * std::exp(w.omega_tilde[0] / 2));
  }
}

TEST_CASE("hand-derived spectra") {
  const auto p3 = build_cylinder(3, HGraph::path(1));
  const auto s3 = spectrum(gauge_polynomial(p3, constant_weights(p3, 0, 0)), 3);
  CHECK(s3.zero_mult == 1);
  REQUIRE(s3.lambdas.size() == 1);
  CHECK(s3.lambdas[0] == doctest::Approx(std::sqrt(2.0)));

  const auto c4 = build_cylinder(2, HGraph::path(2));
  const auto w = constant_weights(c4, 0, 0);
  for (const auto& s : {spectrum(gauge_polynomial(c4, w), 2), spectrum_exact(c4, w)}) {
    REQUIRE(s.lambdas.size() == 2);
    CHECK(s.lambdas[0] == doctest::Approx(std::sqrt(2 - std::sqrt(2.0))).epsilon(1e-12));
    CHECK(s.lambdas[1] == doctest::Approx(std::sqrt(2 + std::sqrt(2.0))).epsilon(1e-12));
    CHECK(2 * s.lambdas.size() + s.zero_mult == static_cast<std::size_t>(s.N));
  }
}

TEST_CASE("exact and companion routes agree on small instances") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = build_cylinder(2 + trial % 5, testing::random_fiber(rng, 1 + trial % 3));
    const auto w = testing::random_weights(rng, g, 0.7);
    const auto p = gauge_polynomial(g, w);
    const auto a = spectrum_exact(g, w);
    const auto b = spectrum(p, g.layers());
    CHECK(a.zero_mult == b.zero_mult);
    REQUIRE(a.lambdas.size() == b.lambdas.size());
    for (std::size_t k = 0; k < a.lambdas.size(); ++k)
      CHECK(std::fabs(a.lambdas[k] - b.lambdas[k]) <= 1e-6 * std::max(1.0, a.lambdas[k]));
    CHECK(reconstruction_residual(a, p) <= 1e-8);
  }
}

TEST_CASE("exact route survives ill-conditioned coefficients") {
  // n = 128 path: the coefficient-to-root map loses dozens of digits here.
  const auto g = build_cylinder(128, HGraph::path(1));
  std::mt19937_64 rng(43);
  const auto w = testing::random_weights(rng, g);
  const auto s = spectrum_exact(g, w);
  CHECK(s.lambdas.size() == 64);
  CHECK(reconstruction_residual(s, gauge_polynomial(g, w)) <= 1e-8);
}

TEST_CASE("interlacing") {
  const auto p3 = build_cylinder(3, HGraph::path(1));
  const auto p2 = build_cylinder(2, HGraph::path(1));
  const auto parent = spectrum_exact(p3, constant_weights(p3, 0, 0));
  const auto child = spectrum_exact(p2, constant_weights(p2, 0, 0));
  CHECK(verify_interlacing(parent, child));
  CHECK_THROWS_AS(verify_interlacing(parent, parent), std::invalid_argument);

  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = build_cylinder(2 + trial % 4, testing::random_fiber(rng, 1 + trial % 3));
    const auto w = testing::random_weights(rng, g);
    const Vertex u = g.vertex(g.layers() - 1, static_cast<int>(rng() % g.fiber_size()));
    const auto whole = spectrum_exact(g, w);
    const auto minus = spectrum_exact(g, w, Region::whole(g).without(g, {u}));
    CHECK(verify_interlacing(whole, minus));
  }
}

TEST_CASE("localization examples") {
  const auto p2 = build_cylinder(2, HGraph::path(1));
  const auto w2 = constant_weights(p2, 0, 0);
  const auto r2 = localization_check(p2, w2, spectrum_exact(p2, w2));
  CHECK(r2.bound == doctest::Approx(1));
  CHECK(r2.max_lambda == doctest::Approx(1));
  CHECK(r2.ok);
  const auto p3 = build_cylinder(3, HGraph::path(1));
  const auto w3 = constant_weights(p3, 0, 0);
  const auto r3 = localization_check(p3, w3, spectrum_exact(p3, w3));
  CHECK(r3.bound == doctest::Approx(2));
  CHECK(r3.ok);
  CHECK(r3.tree_ok);
  // A negative gauge weight puts the root above the degree bound but not the tree bound.
  const auto wn = make_weights(p2, {0, 0}, {-1});
  const auto rn = localization_check(p2, wn, spectrum_exact(p2, wn));
  CHECK_FALSE(rn.ok);
  CHECK(rn.tree_ok);
}

TEST_CASE("spectral functionals against the coefficient route") {
  const auto p2 = build_cylinder(2, HGraph::path(1));
  const auto s2 = spectrum_exact(p2, constant_weights(p2, 0, 0));
  CHECK(density_functionals(s2, 0).u_n * 2 == doctest::Approx(1.0));
  CHECK(transform_F(s2, 1.0) == doctest::Approx(0.5));
  CHECK(transform_F(s2, 1e12) == doctest::Approx(1.0));
  CHECK_THROWS(transform_F(s2, 0.0));

  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = build_cylinder(3 + trial, testing::random_fiber(rng, 2));
    const auto w = testing::random_weights(rng, g);
    const auto s = spectrum_exact(g, w);
    const auto p = partition_polynomial(g, w);
    const double n = g.layers();
    for (int k = -8; k <= 8; ++k) {
      const double x = 0.25 * k;
      const auto c = cumulants_U(p, x, 2);
      const auto d = density_functionals(s, x);
      CHECK(std::fabs(d.u_n - c[0] / n) <= 1e-9);
      CHECK(std::fabs(d.varQ_n - c[1] / n) <= 1e-9);
      CHECK(std::fabs(transform_F(s, std::exp(2 * x)) - n * d.u_n / s.N) <= 1e-12);
    }
    const auto m = empirical_measure(s);
    CHECK(m.mass_by_n() == doctest::Approx(2.0));
  }
}
