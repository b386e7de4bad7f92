#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "dimerlab/experiments.hpp"
#include "dimerlab/groundstate.hpp"
#include "dimerlab/io.hpp"
#include "dimerlab/jacobi.hpp"
#include "dimerlab/leeyang.hpp"
#include "dimerlab/sampler.hpp"
#include "dimerlab/transfer.hpp"
#include "dimerlab/version.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using namespace dimerlab;
using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> mode;
  std::optional<int> threads;
};

struct GraphOptions {
  std::optional<int> n;
  std::optional<int> h;
  std::optional<std::string> family;
  std::optional<double> constant;
  std::optional<std::string> nu_law;
  std::optional<std::string> omega_law;
  std::uint64_t stream = 0;
  std::string weights_file;
};

void add_common(CLI::App* app, Common& c, bool config_required = false) {
  auto* opt = app->add_option("--config", c.config, "Experiment config file (see docs/config.md)");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--out", c.out, "Output directory; a manifest is written there");
  app->add_option("--mode", c.mode, "Transfer mode")->check(CLI::IsMember({"poly", "scalar"}));
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void add_graph(CLI::App* app, GraphOptions& g) {
  app->add_option("--n", g.n, "Number of layers")->check(CLI::PositiveNumber);
  app->add_option("--h", g.h, "Vertices per layer")->check(CLI::PositiveNumber);
  app->add_option("--H", g.family, "Fiber family: path, cycle, complete or empty");
  app->add_option("--const", g.constant, "Set every nu and omega to this value");
  app->add_option("--nu-law", g.nu_law, "Vertex law, e.g. normal(0,1)");
  app->add_option("--omega-law", g.omega_law, "Edge law, e.g. uniform(-1,0)");
  app->add_option("--stream", g.stream, "Disorder stream index");
  app->add_option("--weights", g.weights_file, "Weights JSON written by an earlier run");
}

struct Instance {
  CylinderGraph graph;
  WeightAssignment weights;
  json resolved;
};

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    if (!fs::exists(c.config)) throw UsageError("config file not found: " + c.config);
    try {
      cfg = load_config(c.config);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.mode) cfg.mode = parse_mode(*c.mode);
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

Instance make_instance(const Common& c, const GraphOptions& o) {
  if (!o.weights_file.empty()) {
    if (!fs::exists(o.weights_file)) throw UsageError("weights file not found: " + o.weights_file);
    auto [g, w] = io::weights_from_json(json::parse(io::read_file(o.weights_file)));
    json r = {{"weights_sha256", io::sha256_hex(io::read_file(o.weights_file))}};
    return {std::move(g), std::move(w), r};
  }
  auto cfg = base_config(c);
  const int h = o.h.value_or(cfg.h);
  const std::string family = o.family.value_or(cfg.fiber);
  const int n = o.n.value_or(cfg.ladder.back());
  DisorderSpec spec = cfg.disorder;
  if (o.constant) spec.vertex_law = spec.edge_law = law::Constant{*o.constant};
  try {
    if (o.nu_law) spec.vertex_law = parse_law(*o.nu_law);
    if (o.omega_law) spec.edge_law = parse_law(*o.omega_law);
    auto g = build_cylinder(n, HGraph::named(family, h));
    auto w = sample_weights(g, spec, {cfg.seed, o.stream});
    json r = {{"n", n},
              {"h", h},
              {"fiber", family},
              {"vertex_law", format_law(spec.vertex_law)},
              {"edge_law", format_law(spec.edge_law)},
              {"seed", cfg.seed},
              {"stream", o.stream}};
    return {std::move(g), std::move(w), r};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream os;
  os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Output {
 public:
  Output(std::string dir, std::string command, json resolved, std::vector<std::string> argv)
      : dir_(std::move(dir)), command_(std::move(command)), resolved_(std::move(resolved)), argv_(std::move(argv)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }

  void write(const std::string& name, const std::string& contents) {
    if (!enabled()) return;
    io::write_file((fs::path(dir_) / name).string(), contents);
    files_.push_back({{"name", name}, {"sha256", io::sha256_hex(contents)}});
  }

  void finish(const std::string& config_text, std::optional<std::uint64_t> seed) {
    if (!enabled()) return;
    json m = {{"schema", "dimerlab.manifest/1"},
              {"command", command_},
              {"argv", argv_},
              {"resolved", resolved_},
              {"config_sha256", io::sha256_hex(config_text)},
              {"versions", build_info()},
              {"outputs", files_},
              {"timestamp", utc_now()}};
    m["seed"] = seed ? json(*seed) : json(nullptr);
    io::write_file((fs::path(dir_) / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  std::string dir_;
  std::string command_;
  json resolved_;
  std::vector<std::string> argv_;
  json files_ = json::array();
};

std::optional<std::uint64_t> seed_of(const json& resolved) {
  if (!resolved.contains("seed")) return std::nullopt;
  return resolved["seed"].get<std::uint64_t>();
}

Mode mode_of(const Common& c, Mode fallback) { return c.mode ? parse_mode(*c.mode) : fallback; }

int run_exact(const Common& c, const GraphOptions& o, double x, const std::vector<std::string>& argv) {
  auto inst = make_instance(c, o);
  const Mode mode = mode_of(c, Mode::poly);
  inst.resolved["mode"] = mode_name(mode);
  inst.resolved["x"] = x;
  Output out(c.out, "exact", inst.resolved, argv);
  out.write("weights.json", io::weights_to_json(inst.graph, inst.weights).dump(2) + "\n");
  json result;
  if (mode == Mode::poly) {
    const auto p = partition_polynomial(inst.graph, inst.weights);
    const auto k = cumulants_U(p, x, 2);
    result = {{"log_z", log_Z(p, x)}, {"mean_U", k[0]}, {"var_U", k[1]}};
    const auto pj = io::polynomial_to_json(p);
    std::cout << "log Z = " << io::format_double(log_Z(p, x)) << "\n" << pj.dump() << "\n";
    out.write("polynomial.json", pj.dump(2) + "\n");
  } else {
    const auto m = count_moments(inst.graph, inst.weights, CountingMask::all(inst.graph), x);
    result = {{"log_z", m.log_z}, {"mean_U", m.mean}, {"var_U", m.var}};
    std::cout << "log Z = " << io::format_double(m.log_z) << "\n" << result.dump() << "\n";
  }
  out.write("result.json", result.dump(2) + "\n");
  out.finish(inst.resolved.dump(), seed_of(inst.resolved));
  return 0;
}

int run_spectrum(const Common& c, const GraphOptions& o, bool fast, const std::vector<std::string>& argv) {
  auto inst = make_instance(c, o);
  inst.resolved["method"] = fast ? "companion" : "exact";
  Output out(c.out, "spectrum", inst.resolved, argv);
  const auto s = fast ? spectrum(gauge_polynomial(inst.graph, inst.weights), inst.graph.layers())
                      : spectrum_exact(inst.graph, inst.weights);
  const auto loc = localization_check(inst.graph, inst.weights, s);
  const auto d = density_functionals(s, 0.0);
  const json sj = io::spectrum_to_json(s);
  std::cout << sj.dump() << "\n";
  std::cout << "max lambda = " << io::format_double(s.max_lambda()) << ", bound = " << io::format_double(loc.bound)
            << ", u_n = " << io::format_double(d.u_n) << ", varQ_n = " << io::format_double(d.varQ_n) << "\n";
  out.write("spectrum.json", sj.dump(2) + "\n");
  out.write("localization.json", json{{"max_lambda", loc.max_lambda},
                                      {"bound", loc.bound},
                                      {"ok", loc.ok},
                                      {"tree_bound", loc.tree_bound},
                                      {"tree_ok", loc.tree_ok},
                                      {"u_n", d.u_n},
                                      {"varQ_n", d.varQ_n}}
                                          .dump(2) +
                                     "\n");
  out.finish(inst.resolved.dump(), seed_of(inst.resolved));
  return 0;
}

int run_sample(const Common& c, const GraphOptions& o, int count, int increments, std::optional<double> u_opt,
               const std::vector<std::string>& argv) {
  auto inst = make_instance(c, o);
  const auto& g = inst.graph;
  const int n = g.layers();
  const double u = u_opt ? *u_opt : count_moments(g, inst.weights, CountingMask::all(g)).mean / n;
  const std::uint64_t seed = base_config(c).seed;
  inst.resolved.update({{"count", count}, {"increments", increments}, {"u", u}, {"sample_seed", seed}});
  Output out(c.out, "sample", inst.resolved, argv);
  const auto draws = exact_sample(g, inst.weights, {seed, o.stream}, count);
  const auto grid = uniform_t_grid(increments);
  std::vector<HeightSeries> series;
  std::string matchings;
  for (const auto& m : draws) {
    series.push_back(observables(g, m, grid, u).height);
    matchings += to_json(m) + "\n";
  }
  std::cout << "drew " << count << " matchings, log Z = " << io::format_double(ExactSampler(g, inst.weights).log_z())
            << "\n";
  if (!out.enabled()) std::cout << matchings;
  out.write("matchings.jsonl", matchings);
  out.write("heights.csv", heights_csv(series));
  out.finish(inst.resolved.dump(), seed);
  return 0;
}

int run_ground(const Common& c, const GraphOptions& o, const std::vector<double>& betas,
               const std::vector<std::string>& argv) {
  auto inst = make_instance(c, o);
  const auto& g = inst.graph;
  inst.resolved["betas"] = betas;
  Output out(c.out, "ground", inst.resolved, argv);
  const auto gs = max_weight(g, inst.weights);
  json cuts = json::array();
  for (int k = 1; k < g.layers(); ++k) {
    cuts.push_back({{"k", k},
                    {"remainder", gse_remainder(g, inst.weights, k)},
                    {"bound", gse_remainder_bound(g, inst.weights, k)}});
  }
  json ladder = json::array();
  for (const auto& p : zero_temperature_ladder(g, inst.weights, betas)) {
    ladder.push_back(
        {{"beta", p.beta}, {"free_energy", p.free_energy}, {"gap", p.gap}, {"gap_bound", p.gap_bound}});
  }
  const json r = {{"M", gs.M}, {"argmax", json::parse(to_json(gs.argmax))}, {"cuts", cuts}, {"temperature", ladder}};
  std::cout << "M = " << io::format_double(gs.M) << "\n" << r.dump() << "\n";
  out.write("ground.json", r.dump(2) + "\n");
  out.finish(inst.resolved.dump(), seed_of(inst.resolved));
  return 0;
}

int run_jacobi(const Common& c, const GraphOptions& o, const std::vector<double>& x_grid,
               const std::vector<std::string>& argv) {
  auto inst = make_instance(c, o);
  if (inst.graph.fiber().size() != 1) throw UsageError("jacobi needs h = 1");
  inst.resolved["x_grid"] = x_grid;
  Output out(c.out, "jacobi", inst.resolved, argv);
  const auto r = jacobi_report(inst.graph, inst.weights, x_grid);
  const auto a = JacobiMatrix::from(inst.graph, inst.weights);
  const auto d = det_abs(a);
  const json j = {{"n", r.n},
                  {"log_abs_det", d.log_abs},
                  {"phase", d.phase},
                  {"det_residual", r.det_residual},
                  {"phase_ok", r.phase_ok},
                  {"gauge_residual", r.gauge_residual},
                  {"eigen_residual", r.eigen_residual},
                  {"resolvent_residual", r.resolvent_residual}};
  std::cout << j.dump() << "\n";
  out.write("jacobi.json", j.dump(2) + "\n");
  out.finish(inst.resolved.dump(), seed_of(inst.resolved));
  return 0;
}

int run_experiment_cmd(const Common& c, const std::vector<std::string>& argv) {
  const auto cfg = base_config(c);
  const auto ini = config_to_ini(cfg);
  Output out(c.out, "experiment", json{{"name", cfg.name}}, argv);
  const auto res = run_experiment(cfg);
  out.write("config.ini", ini);
  out.write("replicas.csv", replicas_csv(res.table));
  out.write("summary.json", summary_json(res.limits).dump(2) + "\n");
  const auto report = report_json(res);
  out.write("report.json", report.dump(2) + "\n");
  out.finish(ini, cfg.seed);
  for (const auto& ch : res.checks) {
    std::cout << (ch.skipped ? "SKIP " : ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.verdict << "\n";
  }
  if (!out.enabled()) std::cout << report.dump(2) << "\n";
  return res.all_passed() ? 0 : 1;
}

int run_plot(const Common& c, const std::string& csv, const std::string& kind, const std::string& x,
             const std::string& y, const std::string& group, int bins, const std::vector<std::string>& argv) {
  if (!fs::exists(csv)) throw UsageError("CSV file not found: " + csv);
  const auto table = plot::read_csv(io::read_file(csv));
  std::string svg;
  try {
    if (kind == "hist") {
      svg = plot::histogram_svg(y + " histogram", y, table.numbers(table.column(y)), bins);
    } else if (kind == "mean") {
      svg = plot::line_svg(plot::mean_by(table, x, y));
    } else if (kind == "variance") {
      svg = plot::line_svg(plot::variance_by(table, x, y));
    } else {
      svg = plot::line_svg(plot::lines_from(table, x, y, group));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const json resolved = {{"csv", csv}, {"kind", kind}, {"x", x}, {"y", y}, {"group", group}, {"bins", bins}};
  if (c.out.empty()) {
    std::cout << svg;
    return 0;
  }
  Output out(c.out, "plot", resolved, argv);
  out.write(fs::path(csv).stem().string() + "-" + kind + "-" + y + ".svg", svg);
  out.finish(resolved.dump(), std::nullopt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monomer-dimer models on cylinder graphs: exact transfer, Lee-Yang zeroes and experiments"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  const std::vector<std::string> args(argv, argv + argc);

  Common common;
  GraphOptions graph;
  double x = 0.0;
  bool fast = false;
  int count = 1, increments = 16, bins = 30;
  std::optional<double> u;
  std::vector<double> betas{1, 2, 4, 8, 16}, x_grid{-1, 0, 1};
  std::string csv, kind = "line", px = "t", py = "theta_hat", group;

  auto* exact = app.add_subcommand("exact", "Partition polynomial or scalar log Z of one instance");
  add_common(exact, common);
  add_graph(exact, graph);
  exact->add_option("--x", x, "Tilt on the monomer count");

  auto* spec = app.add_subcommand("spectrum", "Lee-Yang zeroes of one instance");
  add_common(spec, common);
  add_graph(spec, graph);
  spec->add_flag("--fast", fast, "Companion-matrix roots in double precision instead of the certified route");

  auto* sample = app.add_subcommand("sample", "Exact Gibbs samples and height functions");
  add_common(sample, common);
  add_graph(sample, graph);
  sample->add_option("--count", count, "Number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--increments", increments, "Height grid t = 0, 1/m, ..., 1")->check(CLI::PositiveNumber);
  sample->add_option("--u", u, "Centering per layer (default: the instance's own mean)");

  auto* ground = app.add_subcommand("ground", "Maximum-weight matching and cut remainders");
  add_common(ground, common);
  add_graph(ground, graph);
  ground->add_option("--beta", betas, "Inverse temperatures for the zero-temperature ladder");

  auto* jac = app.add_subcommand("jacobi", "Tridiagonal identities for h = 1");
  add_common(jac, common);
  add_graph(jac, graph);
  jac->add_option("--x-grid", x_grid, "Tilts for the resolvent check");

  auto* exp = app.add_subcommand("experiment", "Replica campaign with acceptance checks");
  add_common(exp, common, true);

  auto* plt = app.add_subcommand("plot", "SVG chart from a CSV output");
  add_common(plt, common);
  plt->add_option("--csv", csv, "Input CSV")->required();
  plt->add_option("--kind", kind, "line, mean, variance or hist")
      ->check(CLI::IsMember({"line", "mean", "variance", "hist"}));
  plt->add_option("--x", px, "Column on the horizontal axis");
  plt->add_option("--y", py, "Column on the vertical axis");
  plt->add_option("--group", group, "Column splitting lines into series");
  plt->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (common.threads && *common.threads < 1) throw UsageError("--threads must be positive");
    if (*exact) return run_exact(common, graph, x, args);
    if (*spec) return run_spectrum(common, graph, fast, args);
    if (*sample) return run_sample(common, graph, count, increments, u, args);
    if (*ground) return run_ground(common, graph, betas, args);
    if (*jac) return run_jacobi(common, graph, x_grid, args);
    if (*exp) return run_experiment_cmd(common, args);
    if (*plt) return run_plot(common, csv, kind, px, py, group, bins, args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
