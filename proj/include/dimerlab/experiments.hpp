#pragma once

// Disorder-replica campaigns and the statistical checks run on them.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "dimerlab/graph.hpp"
#include "dimerlab/stats.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab {

enum class Mode { poly, scalar };
Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct CheckThresholds {
  double skew_max = 0.15;
  double kurt_max = 0.3;
  double ks_max = 0.035;
  double mean_drift_max = 0.01;   // relative change of mean/n between the top two n
  double var_drift_max = 0.10;    // relative change of var/n between the top two n
  double positivity_sigmas = 3.0;
  double quenched_distance_max = 0.05;
  double quenched_fraction_min = 0.95;
  double cov_ratio_max = 0.02;    // |Cov|/n against sigma_Q^2
  double section_var_tol = 0.10;
  double fdd_var_tol = 0.15;
  double fdd_corr_max = 0.1;
  double fdd_ks_scale = 1.565;    // KS envelope = scale / sqrt(samples)
  double quenched_failure_alpha = 0.05;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string fiber = "path";
  int h = 1;
  DisorderSpec disorder;
  std::vector<int> ladder{32, 64, 128};
  int replicas = 100;
  std::uint64_t seed = 1;
  Mode mode = Mode::scalar;
  int threads = 1;
  bool ground = true;
  bool sections = true;
  bool spectrum = false;
  std::vector<double> x_grid{0.0};
  int height_n = 0;        // 0: top of the ladder
  int height_samples = 0;  // 0: no height campaign
  int height_increments = 8;
  int quenched_envs = 0;   // 0: no quenched campaign
  std::vector<int> quenched_ladder;
  std::vector<std::string> checks;
  CheckThresholds thresholds;

  HGraph fiber_graph() const { return HGraph::named(fiber, h); }
};

/// Flat INI text; see docs/config.md. Throws std::invalid_argument.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical INI rendering (stable key order), used for hashing and manifests.
std::string config_to_ini(const ExperimentConfig& cfg);

/// Stream of replica r at size n, so rows do not depend on scheduling.
std::uint64_t replica_stream(int n, int replica);

struct ReplicaRow {
  int n = 0;
  int replica = 0;
  std::uint64_t stream = 0;
  double log_z = 0.0;
  double sum_nu = 0.0;
  double mean_U = 0.0;  // Gibbs mean at x = 0
  double var_U = 0.0;   // Gibbs variance at x = 0
  int cut = 0;          // floor(n / 2)
  double var_left = 0.0;
  double var_right = 0.0;
  double cov_sections = 0.0;
  double M = 0.0;
  double max_lambda = 0.0;
  double u_n = 0.0;
  double varQ_n = 0.0;
  double spectral_residual = 0.0;  // max over x_grid of spectral vs coefficient route
  std::string error;
};
using ReplicaTable = std::vector<ReplicaRow>;

ReplicaRow run_replica(const ExperimentConfig& cfg, int n, int replica);
/// Runs every (n, replica) with cfg.threads workers; rows in (n, replica) order.
ReplicaTable run_replicas(const ExperimentConfig& cfg);

struct LadderPoint {
  int n = 0;
  int count = 0;
  stats::Summary log_z, mean_U, var_U, M;
  double f_hat = 0.0, sigma_F2 = 0.0;
  double u_hat = 0.0, sigma_Q2 = 0.0, sigma_A2 = 0.0;
  double m_hat = 0.0, sigma_M2 = 0.0;
  double total_var_U = 0.0;     // population variance of U over both layers of randomness
  double split_residual = 0.0;  // total - (mean Var_mu U + population var <U>)
  double mean_cov_over_n = 0.0, mean_var_left_over_n = 0.0, mean_var_right_over_n = 0.0;
};

struct Limits {
  std::vector<LadderPoint> ladder;  // ascending n
  LadderPoint top;
  std::vector<double> f_drift, u_drift, m_drift;  // successive differences
  bool enough_ladder = false;                     // >= 3 values of n
};
Limits estimate_limits(const ReplicaTable& table);
const LadderPoint& ladder_point(const Limits& lim, int n);

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string verdict;
  nlohmann::json detail;
};

CheckResult free_energy_lln_check(const Limits& lim, const CheckThresholds& th);
/// metric: "log_z", "mean_U" or "M".
CheckResult clt_check(const ReplicaTable& table, const std::string& metric, int n, const CheckThresholds& th);
CheckResult annealed_positivity_check(const ReplicaTable& table, int n, const CheckThresholds& th);
CheckResult ground_drift_check(const Limits& lim, const CheckThresholds& th);
CheckResult joint_sections_check(const Limits& lim, int n_cov, int n_var, const CheckThresholds& th);
CheckResult linear_growth_check(const Limits& lim, int replicas);
CheckResult lyapunov_ladder_check(const ReplicaTable& table);

/// sup-distance between the standardized exact law of U and N(0, 1).
double quenched_distance(const CylinderGraph& g, const WeightAssignment& w);
/// The continuity-corrected variant; a diagnostic, never a verdict.
double quenched_distance_corrected(const CylinderGraph& g, const WeightAssignment& w);
/// Per environment, distances along cfg.quenched_ladder (same disorder stream for every n).
CheckResult quenched_clt_check(const ExperimentConfig& cfg);

/// Height increments over (environment, Gibbs sample) pairs at cfg.height_n.
CheckResult brownian_fdd_check(const ExperimentConfig& cfg, const Limits& lim);

struct ExperimentResult {
  ReplicaTable table;
  Limits limits;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs the campaign and every check named in cfg.checks.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string replicas_csv(const ReplicaTable& table);
nlohmann::json summary_json(const Limits& lim);
nlohmann::json report_json(const ExperimentResult& r);

}  // namespace dimerlab
