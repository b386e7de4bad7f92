#include <cmath>
#include <random>

#include "doctest.h"
#include "dimerlab/brute_force.hpp"
#include "dimerlab/transfer.hpp"
#include "helpers.hpp"

using namespace dimerlab;
using testing::rel_log_diff;

namespace {

double coeff(const MonomerPolynomial& p, int j) { return std::exp(p.log_coeffs[j]); }

}  // namespace

TEST_CASE("hand-enumerated polynomials") {
  SUBCASE("single vertex") {
    const auto g = build_cylinder(1, HGraph::path(1));
    const auto p = partition_polynomial(g, make_weights(g, {0.7}, {}));
    CHECK(p.log_coeffs[0] == kNegInf);
    CHECK(p.log_coeffs[1] == doctest::Approx(0.7));
  }
  SUBCASE("path-2") {
    const auto g = build_cylinder(2, HGraph::path(1));
    auto p = partition_polynomial(g, constant_weights(g, 0, 0));
    CHECK(coeff(p, 0) == doctest::Approx(1));
    CHECK(coeff(p, 2) == doctest::Approx(1));
    CHECK(log_Z(p, 0) == doctest::Approx(std::log(2.0)));
    CHECK(log_Z(p, -60) == doctest::Approx(0.0));
    const auto w = make_weights(g, {0.3, -1.1}, {0.9});
    CHECK(log_partition(g, w) == doctest::Approx(std::log(std::exp(0.3 - 1.1) + std::exp(0.9))));
  }
  SUBCASE("path-4") {
    const auto g = build_cylinder(4, HGraph::path(1));
    const auto p = partition_polynomial(g, constant_weights(g, 0, 0));
    CHECK(coeff(p, 4) == doctest::Approx(1));
    CHECK(coeff(p, 2) == doctest::Approx(3));
    CHECK(coeff(p, 0) == doctest::Approx(1));
    CHECK(p.log_coeffs[1] == kNegInf);
    CHECK(log_Z(p, 0) == doctest::Approx(std::log(5.0)));
  }
  SUBCASE("C4") {
    const auto g = build_cylinder(2, HGraph::path(2));
    const auto p = partition_polynomial(g, constant_weights(g, 0, 0));
    CHECK(coeff(p, 0) == doctest::Approx(2));
    CHECK(coeff(p, 2) == doctest::Approx(4));
    CHECK(coeff(p, 4) == doctest::Approx(1));
    CHECK(cumulants_U(p, 0, 1)[0] == doctest::Approx(12.0 / 7.0));
  }
  SUBCASE("path-3 and restriction") {
    const auto g = build_cylinder(3, HGraph::path(1));
    const auto w = constant_weights(g, 0, 0);
    const auto p = brute_force_polynomial(g, w, CountingMask::all(g));
    CHECK(coeff(p, 3) == doctest::Approx(1));
    CHECK(coeff(p, 1) == doctest::Approx(2));
    const auto mid = restricted_polynomial(g, w, 1, 1, CountingMask::all(g));
    CHECK(mid.N == 1);
    CHECK(coeff(mid, 1) == doctest::Approx(1));
  }
  SUBCASE("isolated fiber vertices") {
    const auto g = build_cylinder(1, HGraph::empty(3));
    const auto w = make_weights(g, {0.1, 0.2, 0.3}, {});
    const auto p = brute_force_polynomial(g, w, CountingMask::all(g));
    CHECK(p.lowest() == 3);
    CHECK(p.log_coeffs[3] == doctest::Approx(0.6));
  }
}

TEST_CASE("cumulants of path-2") {
  const auto g = build_cylinder(2, HGraph::path(1));
  const auto c = cumulants_U(partition_polynomial(g, constant_weights(g, 0, 0)), 0, 4);
  CHECK(c[0] == doctest::Approx(1));
  CHECK(c[1] == doctest::Approx(1));
  CHECK(std::fabs(c[2]) < 1e-12);
  CHECK(c[3] == doctest::Approx(-2));
}

TEST_CASE("degenerate polynomial has zero higher cumulants") {
  const auto g = build_cylinder(1, HGraph::empty(2));
  const auto c = cumulants_U(partition_polynomial(g, constant_weights(g, 0.5, 0)), 0.3, 4);
  CHECK(c[0] == doctest::Approx(2));
  CHECK(c[1] == 0.0);
  CHECK(c[3] == 0.0);
}

TEST_CASE("transfer equals brute force on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = 1 + trial % 3;
    const int n = 1 + static_cast<int>(rng() % (22 / h));
    const auto g = build_cylinder(n, testing::random_fiber(rng, h));
    const auto w = testing::random_weights(rng, g);
    const int first = static_cast<int>(rng() % n);
    const auto mask = CountingMask::layers(g, first, n - 1);
    const auto a = partition_polynomial(g, w, mask);
    const auto b = brute_force_polynomial(g, w, mask);
    REQUIRE(a.log_coeffs.size() == b.log_coeffs.size());
    CHECK(a.mask_size == b.mask_size);
    for (std::size_t j = 0; j < a.log_coeffs.size(); ++j) {
      if (b.log_coeffs[j] == kNegInf) {
        CHECK(a.log_coeffs[j] == kNegInf);
      } else {
        CHECK(rel_log_diff(a.log_coeffs[j], b.log_coeffs[j]) <= 1e-10);
      }
    }
    CHECK(log_partition(g, w, Region::whole(g), 0.4, mask) == doctest::Approx(log_Z(b, 0.4)).epsilon(1e-12));
  }
}

TEST_CASE("disabled sites propagate as missing terms") {
  const auto g = build_cylinder(3, HGraph::path(2));
  std::mt19937_64 rng(5);
  auto w = testing::random_weights(rng, g);
  w.nu[2] = kNegInf;
  w.omega[0] = kNegInf;
  w.refresh_gauge(g);
  const auto a = partition_polynomial(g, w);
  const auto b = brute_force_polynomial(g, w, CountingMask::all(g));
  for (std::size_t j = 0; j < a.log_coeffs.size(); ++j) {
    if (b.log_coeffs[j] == kNegInf) {
      CHECK(a.log_coeffs[j] == kNegInf);
    } else {
      CHECK(rel_log_diff(a.log_coeffs[j], b.log_coeffs[j]) <= 1e-10);
    }
  }
}

TEST_CASE("parity, gauge identity and trivial bounds") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = build_cylinder(3 + trial % 5, testing::random_fiber(rng, 3));
    const auto w = testing::random_weights(rng, g);
    const auto p = partition_polynomial(g, w);
    for (int j = 0; j <= p.N; ++j)
      if ((j - p.N) % 2 != 0) CHECK(p.log_coeffs[j] == kNegInf);
    const auto gw = gauge_transformed(g, w);
    CHECK(std::fabs(log_partition(g, w) - (w.gauge_offset + log_partition(g, gw))) <= 1e-9);
    double lower = 0.0, upper = 0.0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      lower += w.nu[v];
      double s = 1.0 + std::exp(w.nu[v]);
      for (auto [u, e] : g.incident(v)) s += std::exp(w.omega[e]);
      upper += std::log(s);
    }
    const double lz = log_partition(g, w);
    CHECK(lz >= lower - 1e-12);
    CHECK(lz <= upper + 1e-12);
  }
}

TEST_CASE("terminal-vertex recurrence") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = build_cylinder(2 + trial % 6, testing::random_fiber(rng, 1 + trial % 4));
    const auto w = testing::random_weights(rng, g);
    const auto whole = Region::whole(g);
    const Vertex u = g.vertex(g.layers() - 1, static_cast<int>(rng() % g.fiber_size()));
    double rhs = w.nu[u] + log_partition(g, w, whole.without(g, {u}));
    for (auto [v, e] : g.incident(u)) rhs = log_add(rhs, w.omega[e] + log_partition(g, w, whole.without(g, {u, v})));
    CHECK(std::fabs(log_partition(g, w) - rhs) <= 1e-9);
  }
}

TEST_CASE("cumulants agree with finite differences and the jet route") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = build_cylinder(4 + trial, testing::random_fiber(rng, 2));
    const auto w = testing::random_weights(rng, g);
    const auto p = partition_polynomial(g, w);
    for (double x : {-1.0, 0.0, 0.7}) {
      const double d = 1e-3;
      const double fp = log_Z(p, x + d), f0 = log_Z(p, x), fm = log_Z(p, x - d);
      const auto c = cumulants_U(p, x, 2);
      CHECK(std::fabs(c[0] - (fp - fm) / (2 * d)) <= 1e-5 * std::fabs(c[0]));
      CHECK(std::fabs(c[1] - (fp - 2 * f0 + fm) / (d * d)) <= 1e-5 * std::fabs(c[1]) + 1e-6);
      const auto m = count_moments(g, w, CountingMask::all(g), x);
      CHECK(std::fabs(m.log_z - f0) <= 1e-10 * std::fabs(f0) + 1e-12);
      CHECK(std::fabs(m.mean - c[0]) <= 1e-9);
      CHECK(std::fabs(m.var - c[1]) <= 1e-9);
    }
  }
}

TEST_CASE("remainder and its bound") {
  const auto g2 = build_cylinder(2, HGraph::path(1));
  const auto w2 = make_weights(g2, {0.4, -0.2}, {0.5});
  CHECK(remainder_R(g2, w2, 1) == doctest::Approx(std::log1p(std::exp(w2.omega_tilde[0]))));

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = build_cylinder(2 + trial % 9, testing::random_fiber(rng, 1 + trial % 3));
    const auto w = testing::random_weights(rng, g, 2.0);
    for (int k = 1; k < g.layers(); ++k) {
      const double r = remainder_R(g, w, k, 0.0);
      CHECK(r >= -1e-10);
      CHECK(r <= remainder_bound(g, w, k) + 1e-12);
    }
  }

  const auto g = build_cylinder(6, HGraph::cycle(3));
  auto w = testing::random_weights(rng, g);
  for (int j = 0; j < 3; ++j) w.omega[g.horizontal_edge(2, j)] = -1e6;
  w.refresh_gauge(g);
  CHECK(remainder_R(g, w, 3) <= 1e-6);
  CHECK(std::fabs(section_covariance(g, w, 3)) <= 1e-9);
}

TEST_CASE("section covariance equals the brute-force joint law") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = build_cylinder(3 + trial % 5, testing::random_fiber(rng, 2));
    const auto w = testing::random_weights(rng, g);
    const int k = 1 + static_cast<int>(rng() % (g.layers() - 1));
    double z = 0, el = 0, er = 0, elr = 0;
    const double shift = log_partition(g, w);
    for_each_matching(g, w, CountingMask::all(g), [&](const EnumeratedMatching& m) {
      std::vector<char> covered(g.vertex_count(), 0);
      for (EdgeId e : m.edges) covered[g.edge(e).u] = covered[g.edge(e).v] = 1;
      int left = 0, right = 0;
      for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (!covered[v]) (g.layer_of(v) < k ? left : right)++;
      const double p = std::exp(m.hamiltonian - shift);
      z += p;
      el += p * left;
      er += p * right;
      elr += p * left * right;
    });
    CHECK(z == doctest::Approx(1.0));
    CHECK(std::fabs(section_covariance(g, w, k) - (elr - el * er)) <= 1e-9);
  }
  const auto p2 = build_cylinder(2, HGraph::path(1));
  // U_left = U_right = U/2, each Bernoulli(1/2): Cov = 1/4
  CHECK(section_covariance(p2, constant_weights(p2, 0, 0), 1) == doctest::Approx(0.25));
}

TEST_CASE("dyadic subdivision") {
  std::mt19937_64 rng(37);
  const auto g4 = build_cylinder(4, HGraph::path(2));
  const auto w4 = testing::random_weights(rng, g4);
  const auto r1 = dyadic_report(g4, w4, 1);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(r1.nodes[0].R == doctest::Approx(remainder_R(g4, w4, 2)));

  const auto g16 = build_cylinder(16, HGraph::cycle(3));
  const auto r = dyadic_report(g16, constant_weights(g16, 0, 0), 4);
  for (const auto& node : r.nodes) {
    for (const auto& other : r.nodes)
      if (other.generation == node.generation) CHECK(std::fabs(other.R - node.R) <= 1e-12);
  }
  CHECK(std::fabs(r.decomposition_residual) <= 1e-9);

  const auto g13 = build_cylinder(13, HGraph::path(2));
  const auto w13 = testing::random_weights(rng, g13);
  const auto r13 = dyadic_report(g13, w13, 3, 0.2);
  CHECK(std::fabs(r13.decomposition_residual) <= 1e-9);
  CHECK(r13.max_bound_ratio <= 1.0);
  CHECK_THROWS(dyadic_report(g4, w4, 3));
}

TEST_CASE("capacity limits are explicit") {
  const auto g = build_cylinder(2, HGraph::path(7));
  const auto w = constant_weights(g, 0, 0);
  CHECK_THROWS_AS(partition_polynomial(g, w), CapacityError);
  CHECK_NOTHROW(log_partition(g, w));
  const auto big = build_cylinder(2, HGraph::path(13));
  CHECK_THROWS_AS(log_partition(big, constant_weights(big, 0, 0)), CapacityError);
  auto bad = w;
  bad.nu[0] = std::nan("");
  CHECK_THROWS(log_partition(g, bad));
}
