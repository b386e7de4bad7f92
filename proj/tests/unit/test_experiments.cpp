#include <cmath>

#include "doctest.h"
#include "dimerlab/experiments.hpp"

using namespace dimerlab;

namespace {

ExperimentConfig constant_path(std::vector<int> ladder) {
  return parse_config(
      "[graph]\nfiber = path\nh = 1\nladder = " +
      [&] {
        std::string s;
        for (int n : ladder) s += (s.empty() ? "" : ",") + std::to_string(n);
        return s;
      }() +
      "\n[disorder]\nvertex = const(0)\nedge = const(0)\n[experiment]\nreplicas = 4\nchecks = lln,clt_logz\n");
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config("[graph]\nfibre = path\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[experiment]\nmode = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[experiment]\nchecks = lln,nope\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[graph]\nladder = 8,x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[disorder]\nvertex = normal(0)\n"), std::invalid_argument);
}

TEST_CASE("config survives a render and reparse") {
  auto cfg = parse_config(
      "[experiment]\nname = demo\nseed = 42\nreplicas = 10\nmode = poly\n"
      "[graph]\nfiber = cycle\nh = 3\nladder = 16,8\n"
      "[disorder]\nvertex = normal(0,1)\nedge = uniform(-1,0)\n[thresholds]\nks_max = 0.05\n");
  CHECK(cfg.ladder == std::vector<int>{8, 16});
  const auto again = parse_config(config_to_ini(cfg));
  CHECK(config_to_ini(again) == config_to_ini(cfg));
  CHECK(again.thresholds.ks_max == 0.05);
  CHECK(again.mode == Mode::poly);
}

TEST_CASE("replicas on P4 with unit weights") {
  auto cfg = constant_path({4});
  const auto table = run_replicas(cfg);
  REQUIRE(table.size() == 4);
  for (const auto& r : table) {
    CHECK(r.error.empty());
    CHECK(r.log_z == doctest::Approx(std::log(5.0)));
  }
  const auto res = run_experiment(constant_path({4, 8}));
  REQUIRE(res.checks.size() == 2);
  CHECK(res.checks[1].skipped);
  CHECK(res.checks[1].verdict == "zero-variance");
}

TEST_CASE("free energy of the unit path tends to log of the golden ratio") {
  auto cfg = constant_path({256, 512});
  const auto lim = estimate_limits(run_replicas(cfg));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(lim.top.f_hat == doctest::Approx(std::log(phi)).epsilon(2e-3));
  CHECK(lim.top.sigma_F2 == doctest::Approx(0.0));
}

TEST_CASE("replica rows are deterministic and independent of thread count") {
  auto cfg = parse_config(
      "[experiment]\nreplicas = 6\nseed = 7\n[graph]\nfiber = path\nh = 2\nladder = 6,10\n"
      "[disorder]\nvertex = normal(0,1)\nedge = normal(0,1)\n[metrics]\nground = true\nsections = true\n");
  const auto a = replicas_csv(run_replicas(cfg));
  cfg.threads = 3;
  const auto b = replicas_csv(run_replicas(cfg));
  CHECK(a == b);
  const auto row = run_replica(cfg, 10, 4);
  CHECK(replicas_csv({row}) == replicas_csv({run_replicas(cfg)[6 + 4]}));
}

TEST_CASE("scalar and polynomial modes agree per replica") {
  auto cfg = parse_config(
      "[experiment]\nreplicas = 3\n[graph]\nfiber = cycle\nh = 3\nladder = 9\n"
      "[disorder]\nvertex = normal(0,1)\nedge = normal(0,1)\n[metrics]\nsections = true\n");
  const auto s = run_replicas(cfg);
  cfg.mode = Mode::poly;
  const auto p = run_replicas(cfg);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(s[k].log_z == doctest::Approx(p[k].log_z).epsilon(1e-12));
    CHECK(s[k].mean_U == doctest::Approx(p[k].mean_U).epsilon(1e-9));
    CHECK(s[k].var_U == doctest::Approx(p[k].var_U).epsilon(1e-8));
    CHECK(s[k].cov_sections == doctest::Approx(p[k].cov_sections).epsilon(1e-6));
  }
}

TEST_CASE("quenched distance of a two-vertex graph") {
  const auto g = build_cylinder(2, HGraph::path(1));
  const auto w = constant_weights(g, 0.0, 0.0);
  // U takes 0 and 2 with probabilities 1/2 and 1/2 once the edge weight matches
  // the monomer pair weight.
  CHECK(quenched_distance(g, w) == doctest::Approx(stats::normal_cdf(1.0) - 0.5).epsilon(1e-12));
}
