#include "dimerlab/experiments.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "detail/parallel.hpp"
#include "dimerlab/groundstate.hpp"
#include "dimerlab/io.hpp"
#include "dimerlab/jacobi.hpp"
#include "dimerlab/leeyang.hpp"
#include "dimerlab/sampler.hpp"
#include "dimerlab/transfer.hpp"

namespace dimerlab {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kChecks{"lln",      "clt_logz", "clt_meanU",     "clt_M",      "annealed", "ground_drift",
                                    "sections", "quenched", "linear_growth", "fdd",        "lyapunov"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    const auto a = cur.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = cur.find_last_not_of(" \t");
    out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& s, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "' in " + key);
    }
  }
  return out;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad boolean '" + s + "' for " + key);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += v[k];
    } else if constexpr (std::is_same_v<T, double>) {
      out += io::format_double(v[k]);
    } else {
      out += std::to_string(v[k]);
    }
  }
  return out;
}

std::vector<double> metric_values(const ReplicaTable& table, const std::string& metric, int n) {
  std::vector<double> v;
  for (const auto& r : table) {
    if (r.n != n || !r.error.empty()) continue;
    if (metric == "log_z") {
      v.push_back(r.log_z);
    } else if (metric == "mean_U") {
      v.push_back(r.mean_U);
    } else if (metric == "M") {
      v.push_back(r.M);
    } else {
      throw std::invalid_argument("unknown metric " + metric);
    }
  }
  return v;
}

nlohmann::json summary_to_json(const stats::Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"var", s.var}, {"skew", s.skew}, {"ex_kurt", s.ex_kurt},
          {"var_se", s.var_se}};
}

// The two largest ladder points, second-largest first.
std::pair<const LadderPoint*, const LadderPoint*> top_two(const Limits& lim) {
  if (lim.ladder.size() < 2) return {nullptr, nullptr};
  return {&lim.ladder[lim.ladder.size() - 2], &lim.ladder.back()};
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "poly") return Mode::poly;
  if (s == "scalar") return Mode::scalar;
  throw std::invalid_argument("mode must be poly or scalar, got '" + s + "'");
}

std::string mode_name(Mode m) { return m == Mode::poly ? "poly" : "scalar"; }

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  auto& th = cfg.thresholds;
  const std::map<std::string, std::map<std::string, std::function<void(const std::string&)>>> handlers{
      {"experiment",
       {{"name", [&](const std::string& v) { cfg.name = v; }},
        {"seed", [&](const std::string& v) { cfg.seed = std::stoull(v); }},
        {"replicas", [&](const std::string& v) { cfg.replicas = std::stoi(v); }},
        {"mode", [&](const std::string& v) { cfg.mode = parse_mode(v); }},
        {"threads", [&](const std::string& v) { cfg.threads = std::stoi(v); }},
        {"checks", [&](const std::string& v) { cfg.checks = split_list(v); }}}},
      {"graph",
       {{"fiber", [&](const std::string& v) { cfg.fiber = v; }},
        {"h", [&](const std::string& v) { cfg.h = std::stoi(v); }},
        {"ladder", [&](const std::string& v) { cfg.ladder = parse_numbers<int>(v, "graph.ladder"); }}}},
      {"disorder",
       {{"vertex", [&](const std::string& v) { cfg.disorder.vertex_law = parse_law(v); }},
        {"edge", [&](const std::string& v) { cfg.disorder.edge_law = parse_law(v); }}}},
      {"metrics",
       {{"ground", [&](const std::string& v) { cfg.ground = parse_bool(v, "metrics.ground"); }},
        {"sections", [&](const std::string& v) { cfg.sections = parse_bool(v, "metrics.sections"); }},
        {"spectrum", [&](const std::string& v) { cfg.spectrum = parse_bool(v, "metrics.spectrum"); }},
        {"x_grid", [&](const std::string& v) { cfg.x_grid = parse_numbers<double>(v, "metrics.x_grid"); }}}},
      {"heights",
       {{"n", [&](const std::string& v) { cfg.height_n = std::stoi(v); }},
        {"samples", [&](const std::string& v) { cfg.height_samples = std::stoi(v); }},
        {"increments", [&](const std::string& v) { cfg.height_increments = std::stoi(v); }}}},
      {"quenched",
       {{"environments", [&](const std::string& v) { cfg.quenched_envs = std::stoi(v); }},
        {"ladder", [&](const std::string& v) { cfg.quenched_ladder = parse_numbers<int>(v, "quenched.ladder"); }}}},
      {"thresholds",
       {{"skew_max", [&](const std::string& v) { th.skew_max = std::stod(v); }},
        {"kurt_max", [&](const std::string& v) { th.kurt_max = std::stod(v); }},
        {"ks_max", [&](const std::string& v) { th.ks_max = std::stod(v); }},
        {"mean_drift_max", [&](const std::string& v) { th.mean_drift_max = std::stod(v); }},
        {"var_drift_max", [&](const std::string& v) { th.var_drift_max = std::stod(v); }},
        {"positivity_sigmas", [&](const std::string& v) { th.positivity_sigmas = std::stod(v); }},
        {"quenched_distance_max", [&](const std::string& v) { th.quenched_distance_max = std::stod(v); }},
        {"quenched_fraction_min", [&](const std::string& v) { th.quenched_fraction_min = std::stod(v); }},
        {"cov_ratio_max", [&](const std::string& v) { th.cov_ratio_max = std::stod(v); }},
        {"section_var_tol", [&](const std::string& v) { th.section_var_tol = std::stod(v); }},
        {"fdd_var_tol", [&](const std::string& v) { th.fdd_var_tol = std::stod(v); }},
        {"fdd_corr_max", [&](const std::string& v) { th.fdd_corr_max = std::stod(v); }},
        {"fdd_ks_scale", [&](const std::string& v) { th.fdd_ks_scale = std::stod(v); }}}}};

  for (const auto& [section, body] : tree) {
    const auto hs = handlers.find(section);
    if (hs == handlers.end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const auto hk = hs->second.find(key);
      if (hk == hs->second.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      try {
        hk->second(value.data());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: " + section + "." + key + ": " + e.what());
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("config: " + section + "." + key + " out of range");
      }
    }
  }

  HGraph::named(cfg.fiber, cfg.h);
  validate_law(cfg.disorder.vertex_law);
  validate_law(cfg.disorder.edge_law);
  if (cfg.ladder.empty()) throw std::invalid_argument("config: graph.ladder is empty");
  std::sort(cfg.ladder.begin(), cfg.ladder.end());
  if (cfg.ladder.front() < 1) throw std::invalid_argument("config: ladder sizes must be positive");
  if (std::adjacent_find(cfg.ladder.begin(), cfg.ladder.end()) != cfg.ladder.end()) {
    throw std::invalid_argument("config: ladder sizes must be distinct");
  }
  if (cfg.replicas < 2) throw std::invalid_argument("config: replicas must be at least 2");
  if (cfg.threads < 1) throw std::invalid_argument("config: threads must be at least 1");
  const TransferLimits lim;
  if (cfg.mode == Mode::poly && cfg.h > lim.poly_max_h) {
    throw std::invalid_argument("config: polynomial mode supports h <= " + std::to_string(lim.poly_max_h));
  }
  if (cfg.h > lim.scalar_max_h) {
    throw std::invalid_argument("config: scalar mode supports h <= " + std::to_string(lim.scalar_max_h));
  }
  for (const auto& c : cfg.checks) {
    if (!kChecks.count(c)) throw std::invalid_argument("config: unknown check '" + c + "'");
  }
  if (cfg.height_increments < 1) throw std::invalid_argument("config: heights.increments must be positive");
  if (cfg.quenched_ladder.empty()) cfg.quenched_ladder = cfg.ladder;
  std::sort(cfg.quenched_ladder.begin(), cfg.quenched_ladder.end());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(io::read_file(path)); }

std::string config_to_ini(const ExperimentConfig& cfg) {
  const auto& th = cfg.thresholds;
  std::ostringstream os;
  os << "[experiment]\nname = " << cfg.name << "\nseed = " << cfg.seed << "\nreplicas = " << cfg.replicas
     << "\nmode = " << mode_name(cfg.mode) << "\nthreads = " << cfg.threads << "\nchecks = " << join(cfg.checks)
     << "\n\n[graph]\nfiber = " << cfg.fiber << "\nh = " << cfg.h << "\nladder = " << join(cfg.ladder)
     << "\n\n[disorder]\nvertex = " << format_law(cfg.disorder.vertex_law)
     << "\nedge = " << format_law(cfg.disorder.edge_law) << "\n\n[metrics]\nground = " << cfg.ground
     << "\nsections = " << cfg.sections << "\nspectrum = " << cfg.spectrum << "\nx_grid = " << join(cfg.x_grid)
     << "\n\n[heights]\nn = " << cfg.height_n << "\nsamples = " << cfg.height_samples
     << "\nincrements = " << cfg.height_increments << "\n\n[quenched]\nenvironments = " << cfg.quenched_envs
     << "\nladder = " << join(cfg.quenched_ladder) << "\n\n[thresholds]\nskew_max = " << io::format_double(th.skew_max)
     << "\nkurt_max = " << io::format_double(th.kurt_max) << "\nks_max = " << io::format_double(th.ks_max)
     << "\nmean_drift_max = " << io::format_double(th.mean_drift_max)
     << "\nvar_drift_max = " << io::format_double(th.var_drift_max)
     << "\npositivity_sigmas = " << io::format_double(th.positivity_sigmas)
     << "\nquenched_distance_max = " << io::format_double(th.quenched_distance_max)
     << "\nquenched_fraction_min = " << io::format_double(th.quenched_fraction_min)
     << "\ncov_ratio_max = " << io::format_double(th.cov_ratio_max)
     << "\nsection_var_tol = " << io::format_double(th.section_var_tol)
     << "\nfdd_var_tol = " << io::format_double(th.fdd_var_tol)
     << "\nfdd_corr_max = " << io::format_double(th.fdd_corr_max)
     << "\nfdd_ks_scale = " << io::format_double(th.fdd_ks_scale) << "\n";
  return os.str();
}

std::uint64_t replica_stream(int n, int replica) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(replica);
}

namespace {

ReplicaRow replica_on(const ExperimentConfig& cfg, const CylinderGraph& g, int replica) {
  ReplicaRow row;
  row.n = g.layers();
  row.replica = replica;
  row.stream = replica_stream(row.n, replica);
  try {
    const auto w = sample_weights(g, cfg.disorder, {cfg.seed, row.stream});
    row.sum_nu = w.gauge_offset;
    const int n = row.n;
    row.cut = n / 2;
    if (cfg.mode == Mode::poly) {
      const auto p = partition_polynomial(g, w);
      row.log_z = log_Z(p, 0.0);
      const auto c = cumulants_U(p, 0.0, 2);
      row.mean_U = c[0];
      row.var_U = c[1];
      if (cfg.sections && n >= 2) {
        row.var_left = cumulants_U(partition_polynomial(g, w, CountingMask::layers(g, 0, row.cut - 1)), 0.0, 2)[1];
        row.var_right = cumulants_U(partition_polynomial(g, w, CountingMask::layers(g, row.cut, n - 1)), 0.0, 2)[1];
      }
    } else {
      const auto m = count_moments(g, w, CountingMask::all(g));
      row.log_z = m.log_z;
      row.mean_U = m.mean;
      row.var_U = m.var;
      if (cfg.sections && n >= 2) {
        row.var_left = count_moments(g, w, CountingMask::layers(g, 0, row.cut - 1)).var;
        row.var_right = count_moments(g, w, CountingMask::layers(g, row.cut, n - 1)).var;
      }
    }
    if (cfg.sections && n >= 2) row.cov_sections = 0.5 * (row.var_U - row.var_left - row.var_right);
    if (cfg.ground) row.M = max_weight(g, w).M;
    if (cfg.spectrum) {
      const auto s = spectrum_exact(g, w);
      row.max_lambda = s.max_lambda();
      const auto d = density_functionals(s, 0.0);
      row.u_n = d.u_n;
      row.varQ_n = d.varQ_n;
      for (double x : cfg.x_grid) {
        const auto m = count_moments(g, w, CountingMask::all(g), x);
        const auto dx = density_functionals(s, x);
        row.spectral_residual = std::max({row.spectral_residual, std::fabs(dx.u_n - m.mean / n),
                                          std::fabs(dx.varQ_n - m.var / n)});
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

ReplicaRow run_replica(const ExperimentConfig& cfg, int n, int replica) {
  return replica_on(cfg, build_cylinder(n, cfg.fiber_graph()), replica);
}

ReplicaTable run_replicas(const ExperimentConfig& cfg) {
  std::vector<CylinderGraph> graphs;
  for (int n : cfg.ladder) graphs.push_back(build_cylinder(n, cfg.fiber_graph()));
  ReplicaTable table(cfg.ladder.size() * static_cast<std::size_t>(cfg.replicas));
  detail::parallel_for(table.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t k = i / cfg.replicas;
    table[i] = replica_on(cfg, graphs[k], static_cast<int>(i % cfg.replicas));
  });
  return table;
}

Limits estimate_limits(const ReplicaTable& table) {
  std::map<int, std::vector<const ReplicaRow*>> by_n;
  for (const auto& r : table)
    if (r.error.empty()) by_n[r.n].push_back(&r);
  Limits lim;
  for (const auto& [n, rows] : by_n) {
    LadderPoint p;
    p.n = n;
    p.count = static_cast<int>(rows.size());
    std::vector<double> lz, mu, vu, m;
    double second = 0, cov = 0, vl = 0, vr = 0;
    for (const auto* r : rows) {
      lz.push_back(r->log_z);
      mu.push_back(r->mean_U);
      vu.push_back(r->var_U);
      m.push_back(r->M);
      second += r->var_U + r->mean_U * r->mean_U;
      cov += r->cov_sections;
      vl += r->var_left;
      vr += r->var_right;
    }
    p.log_z = stats::summarize(lz);
    p.mean_U = stats::summarize(mu);
    p.var_U = stats::summarize(vu);
    p.M = stats::summarize(m);
    p.f_hat = p.log_z.mean / n;
    p.sigma_F2 = p.log_z.var / n;
    p.u_hat = p.mean_U.mean / n;
    p.sigma_Q2 = p.var_U.mean / n;
    p.sigma_A2 = p.mean_U.var / n;
    p.m_hat = p.M.mean / n;
    p.sigma_M2 = p.M.var / n;
    const double c = p.count;
    const double pop_var_mean = p.mean_U.var * (c - 1) / c;
    p.total_var_U = second / c - p.mean_U.mean * p.mean_U.mean;
    p.split_residual = p.total_var_U - (p.var_U.mean + pop_var_mean);
    p.mean_cov_over_n = cov / c / n;
    p.mean_var_left_over_n = vl / c / n;
    p.mean_var_right_over_n = vr / c / n;
    lim.ladder.push_back(p);
  }
  if (!lim.ladder.empty()) lim.top = lim.ladder.back();
  for (std::size_t k = 1; k < lim.ladder.size(); ++k) {
    lim.f_drift.push_back(lim.ladder[k].f_hat - lim.ladder[k - 1].f_hat);
    lim.u_drift.push_back(lim.ladder[k].u_hat - lim.ladder[k - 1].u_hat);
    lim.m_drift.push_back(lim.ladder[k].m_hat - lim.ladder[k - 1].m_hat);
  }
  lim.enough_ladder = lim.ladder.size() >= 3;
  return lim;
}

const LadderPoint& ladder_point(const Limits& lim, int n) {
  for (const auto& p : lim.ladder)
    if (p.n == n) return p;
  throw std::invalid_argument("no ladder point at n = " + std::to_string(n));
}

CheckResult free_energy_lln_check(const Limits& lim, const CheckThresholds& th) {
  CheckResult r;
  r.name = "lln";
  const auto [a, b] = top_two(lim);
  if (!a) {
    r.skipped = true;
    r.verdict = "needs two ladder sizes";
    return r;
  }
  const double mean_drift = std::fabs(b->f_hat - a->f_hat) / std::fabs(b->f_hat);
  r.detail = {{"n_low", a->n}, {"n_high", b->n}, {"f_low", a->f_hat}, {"f_high", b->f_hat},
              {"mean_drift", mean_drift}, {"sigma_F2_low", a->sigma_F2}, {"sigma_F2_high", b->sigma_F2}};
  bool ok = mean_drift < th.mean_drift_max;
  if (b->sigma_F2 <= 0 && a->sigma_F2 <= 0) {
    r.verdict = "zero-variance: variance clauses not applicable";
  } else {
    const double var_drift = std::fabs(b->sigma_F2 - a->sigma_F2) / b->sigma_F2;
    const double se = b->log_z.var_se / b->n;
    r.detail["var_drift"] = var_drift;
    r.detail["sigma_F2_se"] = se;
    r.detail["sigma_F2_z"] = b->sigma_F2 / se;
    ok = ok && var_drift < th.var_drift_max && b->sigma_F2 > th.positivity_sigmas * se;
  }
  r.passed = ok;
  if (r.verdict.empty()) r.verdict = ok ? "pass" : "fail";
  return r;
}

CheckResult clt_check(const ReplicaTable& table, const std::string& metric, int n, const CheckThresholds& th) {
  CheckResult r;
  r.name = metric == "log_z" ? "clt_logz" : metric == "mean_U" ? "clt_meanU" : "clt_" + metric;
  const auto v = metric_values(table, metric, n);
  const auto s = stats::summarize(v);
  r.detail = {{"n", n}, {"count", s.count}, {"summary", summary_to_json(s)}};
  if (s.count < 2 || s.var <= 1e-24 * std::max(1.0, s.mean * s.mean)) {
    r.skipped = true;
    r.passed = true;
    r.verdict = "zero-variance";
    return r;
  }
  const double ks = stats::ks_normal(v);
  r.detail["ks"] = ks;
  r.passed = std::fabs(s.skew) <= th.skew_max && std::fabs(s.ex_kurt) <= th.kurt_max && ks <= th.ks_max;
  r.verdict = r.passed ? "pass" : "fail";
  if (s.count < 500) r.detail["warning"] = "fewer than 500 replicas; envelopes are calibrated for 2000";
  return r;
}

CheckResult annealed_positivity_check(const ReplicaTable& table, int n, const CheckThresholds& th) {
  CheckResult r;
  r.name = "annealed";
  const auto s = stats::summarize(metric_values(table, "mean_U", n));
  const double sigma_A2 = s.var / n;
  const double se = s.var_se / n;
  r.detail = {{"n", n}, {"sigma_A2", sigma_A2}, {"se", se}, {"z", se > 0 ? sigma_A2 / se : 0.0}};
  r.passed = sigma_A2 > th.positivity_sigmas * se && se > 0;
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

CheckResult ground_drift_check(const Limits& lim, const CheckThresholds& th) {
  CheckResult r;
  r.name = "ground_drift";
  const auto [a, b] = top_two(lim);
  if (!a) {
    r.skipped = true;
    r.verdict = "needs two ladder sizes";
    return r;
  }
  const double drift = std::fabs(b->m_hat - a->m_hat) / std::fabs(b->m_hat);
  r.detail = {{"n_low", a->n}, {"n_high", b->n}, {"m_low", a->m_hat}, {"m_high", b->m_hat}, {"drift", drift},
              {"sigma_M2", b->sigma_M2}};
  r.passed = drift < th.mean_drift_max;
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

CheckResult joint_sections_check(const Limits& lim, int n_cov, int n_var, const CheckThresholds& th) {
  CheckResult r;
  r.name = "sections";
  const auto& pc = ladder_point(lim, n_cov);
  const auto& pv = ladder_point(lim, n_var);
  const double t = static_cast<double>(n_var / 2) / n_var;
  const double cov_ratio = std::fabs(pc.mean_cov_over_n) / pc.sigma_Q2;
  const double left = pv.mean_var_left_over_n / (t * pv.sigma_Q2);
  const double right = pv.mean_var_right_over_n / ((1 - t) * pv.sigma_Q2);
  r.detail = {{"n_cov", n_cov}, {"cov_over_n", pc.mean_cov_over_n}, {"sigma_Q2_cov", pc.sigma_Q2},
              {"cov_ratio", cov_ratio}, {"n_var", n_var}, {"t", t}, {"left_ratio", left}, {"right_ratio", right},
              {"sigma_Q2_var", pv.sigma_Q2}};
  r.passed = cov_ratio <= th.cov_ratio_max && std::fabs(left - 1) <= th.section_var_tol &&
             std::fabs(right - 1) <= th.section_var_tol;
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

CheckResult linear_growth_check(const Limits& lim, int replicas) {
  CheckResult r;
  r.name = "linear_growth";
  const auto [a, b] = top_two(lim);
  if (!a) {
    r.skipped = true;
    r.verdict = "needs two ladder sizes";
    return r;
  }
  const double u = b->u_hat;
  std::vector<double> ns, dev;
  double max_dev = 0;
  for (const auto& p : lim.ladder) {
    ns.push_back(p.n);
    dev.push_back(std::fabs(p.mean_U.mean - p.n * u));
    max_dev = std::max(max_dev, dev.back());
  }
  const double agreement = std::fabs(b->u_hat - a->u_hat);
  r.detail = {{"u_hat", u}, {"deviations", dev}, {"max_deviation", max_dev}, {"slope", stats::slope(ns, dev)},
              {"top_two_agreement", agreement}, {"envelope", 2.0 / std::sqrt(static_cast<double>(replicas))}};
  r.passed = agreement <= 2.0 / std::sqrt(static_cast<double>(replicas));
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

CheckResult lyapunov_ladder_check(const ReplicaTable& table) {
  CheckResult r;
  r.name = "lyapunov";
  std::vector<LyapunovSample> samples;
  for (const auto& row : table)
    if (row.error.empty()) samples.push_back({row.n, row.log_z, row.sum_nu});
  const auto rep = lyapunov_check(samples);
  double worst_gauge = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : rep.rows) {
    worst_gauge = std::max(worst_gauge, x.gauge_residual);
    rows.push_back({{"n", x.n}, {"f_hat", x.f_hat}, {"gamma_hat", x.gamma_hat}, {"mean_nu", x.mean_nu},
                    {"gap", x.gap}, {"gauge_residual", x.gauge_residual}});
  }
  r.detail = {{"rows", rows}, {"gap_shrinking", rep.gap_shrinking}, {"gap_slope", rep.gap_slope},
              {"max_gauge_residual", worst_gauge}};
  r.passed = rep.gap_shrinking && worst_gauge <= 1e-9;
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

namespace {

double lattice_distance(const CylinderGraph& g, const WeightAssignment& w, bool corrected) {
  const auto p = partition_polynomial(g, w);
  const auto probs = pmf(p, 0.0);
  const auto c = cumulants_U(p, 0.0, 2);
  std::vector<double> values(probs.size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = static_cast<double>(j);
  if (c[1] <= 0) return 1.0;
  return corrected ? stats::lattice_normal_distance_corrected(values, probs, c[0], std::sqrt(c[1]))
                   : stats::lattice_normal_distance(values, probs, c[0], std::sqrt(c[1]));
}

}  // namespace

double quenched_distance(const CylinderGraph& g, const WeightAssignment& w) { return lattice_distance(g, w, false); }

double quenched_distance_corrected(const CylinderGraph& g, const WeightAssignment& w) {
  return lattice_distance(g, w, true);
}

CheckResult quenched_clt_check(const ExperimentConfig& cfg) {
  CheckResult r;
  r.name = "quenched";
  const auto& ladder = cfg.quenched_ladder;
  const int envs = cfg.quenched_envs > 0 ? cfg.quenched_envs : cfg.replicas;
  std::vector<CylinderGraph> graphs;
  for (int n : ladder) graphs.push_back(build_cylinder(n, cfg.fiber_graph()));
  std::vector<std::vector<double>> dist(envs, std::vector<double>(ladder.size()));
  std::vector<double> corrected_top(envs);
  detail::parallel_for(envs, cfg.threads, [&](std::size_t e) {
    const RngSeed seed{cfg.seed, (std::uint64_t{1} << 63) | e};
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const auto w = sample_weights(graphs[k], cfg.disorder, seed);
      dist[e][k] = quenched_distance(graphs[k], w);
      if (k + 1 == ladder.size()) corrected_top[e] = quenched_distance_corrected(graphs[k], w);
    }
  });
  int decreasing = 0, small = 0, both = 0;
  std::vector<double> top;
  for (const auto& d : dist) {
    bool dec = true;
    for (std::size_t k = 1; k < d.size(); ++k) dec = dec && d[k] < d[k - 1];
    const bool ok_top = d.back() <= cfg.thresholds.quenched_distance_max;
    decreasing += dec;
    small += ok_top;
    both += dec && ok_top;
    top.push_back(d.back());
  }
  const double frac = static_cast<double>(both) / envs;
  std::vector<double> mean_dist(ladder.size(), 0.0);
  for (const auto& d : dist)
    for (std::size_t k = 0; k < d.size(); ++k) mean_dist[k] += d[k] / envs;
  r.detail = {{"ladder", ladder},
              {"environments", envs},
              {"mean_distance", mean_dist},
              {"max_top_distance", *std::max_element(top.begin(), top.end())},
              {"fraction_decreasing", static_cast<double>(decreasing) / envs},
              {"fraction_top_below_max", static_cast<double>(small) / envs},
              {"fraction_both", frac},
              {"max_top_corrected_distance", *std::max_element(corrected_top.begin(), corrected_top.end())}};
  r.passed = frac >= cfg.thresholds.quenched_fraction_min;
  r.verdict = r.passed ? "pass" : "fail";
  return r;
}

CheckResult brownian_fdd_check(const ExperimentConfig& cfg, const Limits& lim) {
  CheckResult r;
  r.name = "fdd";
  const int n = cfg.height_n > 0 ? cfg.height_n : cfg.ladder.back();
  const int S = cfg.height_samples;
  const int m = cfg.height_increments;
  if (S < 2) {
    r.skipped = true;
    r.verdict = "no height samples configured";
    return r;
  }
  const auto& p = ladder_point(lim, n);
  const double u = p.u_hat;
  const double sigma2 = p.sigma_Q2 + p.sigma_A2;
  const auto g = build_cylinder(n, cfg.fiber_graph());
  const auto grid = uniform_t_grid(m);
  std::vector<std::vector<double>> theta(S);
  detail::parallel_for(S, cfg.threads, [&](std::size_t s) {
    const RngSeed seed{cfg.seed, (std::uint64_t{1} << 62) | s};
    const auto w = sample_weights(g, cfg.disorder, seed);
    ExactSampler sampler(g, w);
    auto rng = make_engine(seed, RngDomain::sampler);
    theta[s] = observables(g, sampler.draw(rng), grid, u).height.theta_hat;
  });
  std::vector<std::vector<double>> inc(m, std::vector<double>(S));
  bool starts_at_zero = true;
  for (int s = 0; s < S; ++s) {
    starts_at_zero = starts_at_zero && theta[s][0] == 0.0;
    for (int i = 0; i < m; ++i) inc[i][s] = theta[s][i + 1] - theta[s][i];
  }
  auto jitter = make_engine({cfg.seed, std::uint64_t{1} << 61}, RngDomain::misc);
  const double dt = 1.0 / m;
  const double ks_env = cfg.thresholds.fdd_ks_scale / std::sqrt(static_cast<double>(S));
  std::vector<double> ratios, ks;
  double max_corr = 0;
  bool ok = starts_at_zero;
  for (int i = 0; i < m; ++i) {
    const auto s = stats::summarize(inc[i]);
    ratios.push_back(s.var / (sigma2 * dt));
    ks.push_back(stats::ks_normal_jittered(inc[i], 1.0 / std::sqrt(static_cast<double>(n)), jitter));
    ok = ok && std::fabs(ratios.back() - 1) <= cfg.thresholds.fdd_var_tol && ks.back() <= ks_env;
    for (int j = 0; j < i; ++j) max_corr = std::max(max_corr, std::fabs(stats::correlation(inc[i], inc[j])));
  }
  ok = ok && max_corr <= cfg.thresholds.fdd_corr_max;
  r.detail = {{"n", n},           {"samples", S},   {"increments", m},         {"u_hat", u},
              {"sigma2", sigma2}, {"var_ratios", ratios}, {"max_abs_corr", max_corr}, {"ks", ks},
              {"ks_envelope", ks_env}, {"starts_at_zero", starts_at_zero}};
  r.passed = ok;
  r.verdict = ok ? "pass" : "fail";
  return r;
}

bool ExperimentResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || c.skipped; });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.table = run_replicas(cfg);
  res.limits = estimate_limits(res.table);
  const int top = cfg.ladder.back();
  const int second = cfg.ladder.size() >= 2 ? cfg.ladder[cfg.ladder.size() - 2] : top;
  for (const auto& c : cfg.checks) {
    if (c == "lln") res.checks.push_back(free_energy_lln_check(res.limits, cfg.thresholds));
    if (c == "clt_logz") res.checks.push_back(clt_check(res.table, "log_z", top, cfg.thresholds));
    if (c == "clt_meanU") res.checks.push_back(clt_check(res.table, "mean_U", top, cfg.thresholds));
    if (c == "clt_M") res.checks.push_back(clt_check(res.table, "M", top, cfg.thresholds));
    if (c == "annealed") res.checks.push_back(annealed_positivity_check(res.table, top, cfg.thresholds));
    if (c == "ground_drift") res.checks.push_back(ground_drift_check(res.limits, cfg.thresholds));
    if (c == "sections") res.checks.push_back(joint_sections_check(res.limits, second, top, cfg.thresholds));
    if (c == "linear_growth") res.checks.push_back(linear_growth_check(res.limits, cfg.replicas));
    if (c == "quenched") res.checks.push_back(quenched_clt_check(cfg));
    if (c == "fdd") res.checks.push_back(brownian_fdd_check(cfg, res.limits));
    if (c == "lyapunov") {
      if (cfg.h != 1) throw std::invalid_argument("the lyapunov check needs h = 1");
      res.checks.push_back(lyapunov_ladder_check(res.table));
    }
  }
  return res;
}

std::string replicas_csv(const ReplicaTable& table) {
  std::ostringstream os;
  os << "n,replica,stream,log_z,sum_nu,mean_U,var_U,cut,var_left,var_right,cov_sections,M,max_lambda,u_n,varQ_n,"
        "spectral_residual,error\n";
  using io::format_double;
  for (const auto& r : table) {
    os << r.n << ',' << r.replica << ',' << r.stream << ',' << format_double(r.log_z) << ','
       << format_double(r.sum_nu) << ',' << format_double(r.mean_U) << ',' << format_double(r.var_U) << ','
       << r.cut << ',' << format_double(r.var_left) << ',' << format_double(r.var_right) << ','
       << format_double(r.cov_sections) << ',' << format_double(r.M) << ',' << format_double(r.max_lambda) << ','
       << format_double(r.u_n) << ',' << format_double(r.varQ_n) << ',' << format_double(r.spectral_residual)
       << ",\"";
    for (char ch : r.error) os << (ch == '"' ? '\'' : ch);
    os << "\"\n";
  }
  return os.str();
}

nlohmann::json summary_json(const Limits& lim) {
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& p : lim.ladder) {
    ladder.push_back({{"n", p.n},
                      {"count", p.count},
                      {"log_z", summary_to_json(p.log_z)},
                      {"mean_U", summary_to_json(p.mean_U)},
                      {"var_U", summary_to_json(p.var_U)},
                      {"M", summary_to_json(p.M)},
                      {"f_hat", p.f_hat},
                      {"sigma_F2", p.sigma_F2},
                      {"u_hat", p.u_hat},
                      {"sigma_Q2", p.sigma_Q2},
                      {"sigma_A2", p.sigma_A2},
                      {"m_hat", p.m_hat},
                      {"sigma_M2", p.sigma_M2},
                      {"total_var_U", p.total_var_U},
                      {"split_residual", p.split_residual},
                      {"cov_over_n", p.mean_cov_over_n},
                      {"var_left_over_n", p.mean_var_left_over_n},
                      {"var_right_over_n", p.mean_var_right_over_n}});
  }
  const auto& t = lim.top;
  return {{"schema", "dimerlab.summary/1"},
          {"ladder", ladder},
          {"estimates",
           {{"n", t.n},
            {"f_hat", t.f_hat},
            {"sigma_F2", t.sigma_F2},
            {"u_hat", t.u_hat},
            {"sigma_Q2", t.sigma_Q2},
            {"sigma_A2", t.sigma_A2},
            {"m_hat", t.m_hat},
            {"sigma_M2", t.sigma_M2}}},
          {"drift", {{"f", lim.f_drift}, {"u", lim.u_drift}, {"m", lim.m_drift}}},
          {"enough_ladder", lim.enough_ladder}};
}

nlohmann::json report_json(const ExperimentResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"verdict", c.verdict},
                      {"detail", c.detail}});
  }
  int errors = 0;
  for (const auto& row : r.table) errors += row.error.empty() ? 0 : 1;
  return {{"schema", "dimerlab.report/1"}, {"all_passed", r.all_passed()}, {"row_errors", errors}, {"checks", checks}};
}

}  // namespace dimerlab
