// SPDX-License-Identifier: Apache-2.0
// stabkit: samplers, statistics, cost operators, diagnostics and rate experiments.

#include "stabkit/bounds.hpp"
#include "stabkit/clt.hpp"
#include "stabkit/cost_operators.hpp"
#include "stabkit/diagnostics.hpp"
#include "stabkit/entropy.hpp"
#include "stabkit/error.hpp"
#include "stabkit/knn.hpp"
#include "stabkit/manifest.hpp"
#include "stabkit/mst.hpp"
#include "stabkit/process.hpp"
#include "stabkit/statistic.hpp"
#include "stabkit/topology.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace stabkit;
using nlohmann::json;

struct Common {
  std::string config_path;
  std::string out;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  bool timing = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

// Accepts an inline JSON document or a path to one.
json json_argument(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(text);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_list(const std::string& text) {
  const Point p = parse_point(text);
  return {p.data(), p.data() + p.size()};
}

// "lo1,lo2..hi1,hi2"
Box parse_box(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) throw InvalidInput("box must be written lo..hi, e.g. 0,0..1,1");
  return Box(parse_point(text.substr(0, sep)), parse_point(text.substr(sep + 2)));
}

class Runner {
 public:
  explicit Runner(std::vector<std::string> argv) : argv_(std::move(argv)) {}

  json config() const { return common.config_path.empty() ? json::object() : read_json_file(common.config_path); }

  ProcessConfig process(const json& cfg, CLI::Option* seed_opt) const {
    ProcessConfig p = ProcessConfig::from_json(cfg);
    if (seed_opt != nullptr && seed_opt->count() > 0) p.seed = common.seed;
    return p;
  }

  void finish(json doc, const json& cfg, std::uint64_t seed) const {
    RunManifest m = RunManifest::make(argv_, cfg, seed);
    if (common.timing) {
      m.timing_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    doc["manifest"] = m.to_json();
    emit(common.out, doc.dump(2) + "\n");
  }

  Common common;

 private:
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void add_common(CLI::App* app, Common& c, bool with_config, bool with_seed, CLI::Option** seed_opt) {
  if (with_config) app->add_option("--config", c.config_path, "JSON configuration (density, process, seed, statistic)");
  app->add_option("--out", c.out, "Output file (default: standard output)");
  app->add_option("--workers", c.workers, "Worker threads; never changes results")->check(CLI::PositiveNumber);
  app->add_flag("--timing", c.timing, "Record wall time in the manifest");
  if (with_seed) *seed_opt = app->add_option("--seed", c.seed, "Overrides the configured seed");
}

// Statistic parameters from the config's "statistic" object; explicit flags win.
struct StatFlags {
  int k = 1;
  double theta = 1.0;
  double r = 1.0;
  std::string kind = "vr";
  double scale_n = 1.0;
  double max_time = 2.0;
  std::string weights = "kl";
  std::string box;
  std::vector<CLI::Option*> opts;

  void add(CLI::App* app) {
    opts = {app->add_option("--k", k, "Neighbour count"),
            app->add_option("--theta", theta, "Edge-length exponent"),
            app->add_option("--r", r, "Filtration time"),
            app->add_option("--kind", kind, "Complex kind")->check(CLI::IsMember({"vr", "cech"})),
            app->add_option("--scale-n", scale_n, "Distances are multiplied by scale_n^(1/d)"),
            app->add_option("--max-time", max_time, "Largest admissible filtration time"),
            app->add_option("--weights", weights, "kl, auto or a weight JSON file"),
            app->add_option("--box", box, "Restriction box lo..hi")};
  }

  StatisticParams resolve(const json& cfg) const {
    StatisticParams p = StatisticParams::from_json(cfg.value("statistic", json::object()));
    if (opts[0]->count()) p.k = k;
    if (opts[1]->count()) p.theta = theta;
    if (opts[2]->count()) p.r = r;
    if (opts[3]->count()) p.complex = complex_kind_from_string(kind);
    if (opts[4]->count()) p.scale_n = scale_n;
    if (opts[5]->count()) p.max_time = max_time;
    if (opts[6]->count()) p.weights = weights;
    if (opts[7]->count()) p.box = parse_box(box);
    return p;
  }
};

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (!args.empty()) args[0] = "stabkit";
  Runner runner(args);
  Common& c = runner.common;

  CLI::App app{"stabkit: stabilizing statistics, cost operators and normal-approximation diagnostics", "stabkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  // sample
  auto* sample = app.add_subcommand("sample", "Draw one configuration from a point process");
  CLI::Option* sample_seed = nullptr;
  std::uint64_t offset = 0;
  add_common(sample, c, true, true, &sample_seed);
  sample->get_option("--config")->required();
  sample->add_option("--offset", offset, "Replication offset");

  // stat
  auto* stat = app.add_subcommand("stat", "Evaluate a statistic on a CSV cloud");
  stat->require_subcommand(1);
  std::string in_path;
  StatFlags sflags;
  std::string graph_out, window_x;
  double window_alpha = 0.0;
  std::uint64_t budget = kDefaultSimplexBudget;
  std::map<std::string, CLI::App*> stat_cmds;
  for (const char* name : {"knn", "entropy", "euler", "mst", "cardinality"}) {
    auto* sub = stat->add_subcommand(name, std::string("Evaluate the ") + name + " statistic");
    sub->add_option("--in", in_path, "Input cloud CSV")->required();
    add_common(sub, c, false, false, nullptr);
    stat_cmds[name] = sub;
  }
  {
    auto* knn = stat_cmds["knn"];
    sflags.opts.clear();
    knn->add_option("--k", sflags.k, "Neighbour count")->check(CLI::PositiveNumber);
    knn->add_option("--theta", sflags.theta, "Edge-length exponent");
    knn->add_option("--scale-n", sflags.scale_n, "Distances are multiplied by scale_n^(1/d)");
    knn->add_option("--graph-out", graph_out, "Write the k-NN graph as CSV");
    auto* ent = stat_cmds["entropy"];
    ent->add_option("--k", sflags.k, "Neighbour count")->check(CLI::PositiveNumber);
    ent->add_option("--weights", sflags.weights, "kl, auto or a weight JSON file");
    auto* eul = stat_cmds["euler"];
    eul->add_option("--r", sflags.r, "Filtration time")->required();
    eul->add_option("--kind", sflags.kind, "Complex kind")->check(CLI::IsMember({"vr", "cech"}));
    eul->add_option("--scale-n", sflags.scale_n, "Scale coordinates by scale_n^(1/d) (default: the cloud size)");
    eul->add_option("--max-time", sflags.max_time, "Largest admissible filtration time");
    eul->add_option("--budget", budget, "Maximum number of simplices");
    auto* mst = stat_cmds["mst"];
    mst->add_option("--box", sflags.box, "Restrict to the box lo..hi (B_n for the window cost)");
    mst->add_option("--window-alpha", window_alpha, "Window exponent alpha in (0,1)");
    mst->add_option("--window-x", window_x, "Point x for the window cost, e.g. \"0.5,0.5\"");
  }

  // costs
  auto* costs = app.add_subcommand("costs", "Evaluate a cost operator");
  CLI::Option* costs_seed = nullptr;
  add_common(costs, c, true, true, &costs_seed);
  costs->get_option("--config")->required();
  std::string stat_name, op = "add", x_text, y_text, x2_text, window_text;
  StatFlags cflags;
  costs->add_option("--stat", stat_name, "Statistic name")->required();
  costs->add_option("--op", op, "Operator")->check(CLI::IsMember({"add", "marked", "second", "flex"}));
  costs->add_option("--x", x_text, "Inserted point x")->required();
  costs->add_option("--y", y_text, "Mark y (marked)");
  costs->add_option("--x2", x2_text, "Second point (second)");
  costs->add_option("--window", window_text, "Window JSON (inline or file) for flex");
  costs->add_option("--in", in_path, "Cloud CSV (default: one draw from the configured process)");
  costs->add_option("--offset", offset, "Replication offset of the drawn cloud");
  cflags.add(costs);

  // radius
  auto* radius = app.add_subcommand("radius", "Empirical stabilisation diagnostics");
  CLI::Option* radius_seed = nullptr;
  add_common(radius, c, true, true, &radius_seed);
  radius->get_option("--config")->required();
  std::string assumption = "radius_decay", radii_text = "0.05,0.1,0.2,0.3", region_text = "full";
  std::size_t reps = 200, probes = 8;
  double moment_p = 5.0;
  StatFlags rflags;
  std::vector<std::string> x_grid_text;
  radius->add_option("--stat", stat_name, "Statistic name")->required();
  radius->add_option("--assumption", assumption, "Which assumption to probe")
      ->check(CLI::IsMember({"radius_decay", "k_exponential", "moment"}));
  radius->add_option("--x", x_text, "Point x (radius_decay)");
  radius->add_option("--radii", radii_text, "Radii (radius_decay) or distances to K (k_exponential)");
  radius->add_option("--region", region_text, "K: full or half:<axis>:<threshold>");
  radius->add_option("--grid-point", x_grid_text, "Grid point for the moment estimate (repeatable)");
  radius->add_option("--p", moment_p, "Moment order p > 4");
  radius->add_option("--reps", reps, "Replications");
  radius->add_option("--probes", probes, "Outside configurations per replication");
  rflags.add(radius);

  // weights
  auto* weights = app.add_subcommand("weights", "Minimum-norm entropy weights");
  int wk = 1, wd = 1;
  add_common(weights, c, false, false, nullptr);
  weights->add_option("--k", wk, "Neighbour count")->required();
  weights->add_option("--d", wd, "Dimension")->required();

  // clt
  auto* clt = app.add_subcommand("clt", "Monte Carlo rate experiment");
  CLI::Option* clt_seed = nullptr;
  add_common(clt, c, true, true, &clt_seed);
  clt->get_option("--config")->required();
  std::string grid_text = "100,200,400,800,1600", csv_out;
  std::size_t clt_reps = 2000;
  bool no_samples = false;
  StatFlags tflags;
  clt->add_option("--stat", stat_name, "Statistic name")->required();
  clt->add_option("--grid", grid_text, "Size parameters");
  clt->add_option("--reps", clt_reps, "Replications per size");
  clt->add_option("--csv-out", csv_out, "Per-size rows as CSV");
  clt->add_flag("--no-samples", no_samples, "Omit standardized samples from the report");
  tflags.add(clt);

  // bound
  auto* bound = app.add_subcommand("bound", "Constant-free normal-approximation bounds");
  CLI::Option* bound_seed = nullptr;
  add_common(bound, c, true, true, &bound_seed);
  bound->get_option("--config")->required();
  std::string bound_kind = "theorem31";
  std::size_t anchors = 32, partners = 8, bound_reps = 500;
  double c2 = 1.0, c3 = 1.0, window_radius = 0.0;
  StatFlags bflags;
  bound->add_option("--mode", bound_kind, "theorem31 or theta")->check(CLI::IsMember({"theorem31", "theta"}));
  bound->add_option("--stat", stat_name, "Statistic name (theorem31)");
  bound->add_option("--reps", bound_reps, "Replications");
  bound->add_option("--anchors", anchors, "Anchor points");
  bound->add_option("--partners", partners, "Partner points per anchor");
  bound->add_option("--window-radius", window_radius, "A_x = ball of this radius (default: whole space)");
  bound->add_option("--region", region_text, "K: full or half:<axis>:<threshold>");
  bound->add_option("--c2", c2, "Decay constant c2");
  bound->add_option("--c3", c3, "Decay constant c3");
  bound->add_option("--p", moment_p, "Moment order p > 4");
  bflags.add(bound);

  // report
  auto* report = app.add_subcommand("report", "Summarise an output file and check its manifest");
  std::string report_config;
  report->add_option("--in", in_path, "Output JSON of another subcommand")->required();
  report->add_option("--config", report_config, "Config to compare against the manifest digest");
  report->add_option("--out", c.out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return 2;
  }

  auto parse_region = [](const std::string& text) {
    if (text == "full") return Region::full();
    int axis = 0;
    double t = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "half:%d:%lf%c", &axis, &t, &tail) == 2) return Region::half_space(axis, t);
    throw InvalidInput("region must be 'full' or 'half:<axis>:<threshold>'");
  };

  if (sample->parsed()) {
    const json cfg = runner.config();
    const ProcessConfig p = runner.process(cfg, sample_seed);
    const PointCloud cloud = sample_process(p, offset);
    std::ostringstream os;
    const RunManifest m = RunManifest::make(args, cfg, p.seed);
    os << "# manifest " << m.to_json().dump() << '\n';
    write_csv(os, cloud);
    emit(c.out, os.str());
    return 0;
  }

  if (stat->parsed()) {
    const PointCloud cloud = read_csv_file(in_path);
    json doc;
    json cfg = {{"in", in_path}};
    if (stat_cmds["knn"]->parsed()) {
      const double scale = std::pow(sflags.scale_n, 1.0 / std::max(cloud.dim(), 1));
      doc = {{"statistic", "knn"}, {"k", sflags.k}, {"theta", sflags.theta}, {"n", cloud.size()},
             {"value", total_edge_length(cloud, sflags.k, sflags.theta, scale)}};
      if (!graph_out.empty()) {
        std::ostringstream os;
        write_graph_csv(os, build_knn_graph(cloud, sflags.k));
        emit(graph_out, os.str());
      }
    } else if (stat_cmds["entropy"]->parsed()) {
      const WeightVector w = sflags.weights == "kl"     ? WeightVector::indicator(sflags.k, cloud.dim())
                             : sflags.weights == "auto" ? solve_weights(sflags.k, cloud.dim())
                                                        : WeightVector::from_json(read_json_file(sflags.weights));
      const EntropyEstimate e = sflags.weights == "kl" ? kl_entropy(cloud, sflags.k) : weighted_entropy(cloud, sflags.k, w);
      doc = {{"statistic", "entropy"}, {"k", e.k}, {"n", e.n}, {"value", e.value}, {"weights", w.to_json()}};
    } else if (stat_cmds["euler"]->parsed()) {
      const ComplexKind kind = complex_kind_from_string(sflags.kind);
      const double n = stat_cmds["euler"]->get_option("--scale-n")->count() ? sflags.scale_n
                                                                              : static_cast<double>(std::max<Index>(cloud.size(), 1));
      if (!(sflags.r > 0.0) || sflags.r > sflags.max_time) throw InvalidInput("filtration time must lie in (0, T]");
      const SimplexCounts counts = simplex_counts(cloud, sflags.r, std::pow(n, 1.0 / std::max(cloud.dim(), 1)), kind, budget);
      doc = {{"statistic", "euler"}, {"n", cloud.size()}, {"value", euler_characteristic(counts)}, {"counts", counts.to_json()}};
    } else if (stat_cmds["mst"]->parsed()) {
      const bool boxed = !sflags.box.empty();
      const MstResult r = boxed ? mst_restricted(cloud, parse_box(sflags.box)) : euclidean_mst(cloud);
      doc = {{"statistic", "mst"}, {"n", cloud.size()}, {"value", r.total_length}, {"mst", r.to_json()}};
      if (!window_x.empty()) {
        if (!boxed) throw InvalidInput("--window-x needs --box for B_n");
        const WindowCost wc = mst_window_cost(cloud, parse_point(window_x), parse_box(sflags.box), window_alpha);
        doc["window_cost"] = {{"alpha", window_alpha}, {"flexible", wc.flexible}, {"full", wc.full}, {"gap", wc.gap}};
      }
    } else {
      doc = {{"statistic", "cardinality"}, {"n", cloud.size()}, {"value", cloud.size()}};
    }
    runner.finish(std::move(doc), cfg, 0);
    return 0;
  }

  if (costs->parsed()) {
    const json cfg = runner.config();
    const ProcessConfig p = runner.process(cfg, costs_seed);
    const StatisticDescriptor f = make_statistic(stat_name, cflags.resolve(cfg));
    const PointCloud cloud = in_path.empty() ? sample_process(p, offset) : read_csv_file(in_path);
    const Point x = parse_point(x_text);
    json doc = {{"statistic", stat_name}, {"op", op}, {"n", cloud.size()}};
    if (op == "add") {
      doc["value"] = add_one_cost(f, cloud, x);
    } else if (op == "marked") {
      doc["value"] = add_one_cost_marked(f, cloud, x, y_text.empty() ? std::nullopt : std::optional<Point>(parse_point(y_text)));
    } else if (op == "second") {
      if (x2_text.empty()) throw InvalidInput("--op second needs --x2");
      const Point x2 = parse_point(x2_text);
      const IdentityCheck chk = check_second_order_identity(f, cloud, x, x2);
      doc["value"] = chk.lhs;
      doc["identity"] = {{"marked_minus_plain", chk.rhs}, {"residual", chk.residual}, {"pass", chk.pass}};
    } else {
      const Window w = window_text.empty() ? Window::all() : Window::from_json(json_argument(window_text));
      doc["value"] = flexible_cost(f, cloud, x, w);
      doc["window"] = w.to_json();
    }
    runner.finish(std::move(doc), cfg, p.seed);
    return 0;
  }

  if (radius->parsed()) {
    const json cfg = runner.config();
    const ProcessConfig p = runner.process(cfg, radius_seed);
    const StatisticDescriptor f = make_statistic(stat_name, rflags.resolve(cfg));
    AssumptionReport rep;
    if (assumption == "radius_decay") {
      if (x_text.empty()) throw InvalidInput("radius_decay needs --x");
      rep = estimate_radius_tail(f, p, parse_point(x_text), parse_list(radii_text), {reps, probes, c.workers});
    } else if (assumption == "k_exponential") {
      rep = estimate_kexp(f, p, parse_region(region_text), parse_list(radii_text), {reps, c.workers});
    } else {
      std::vector<Point> grid;
      for (const auto& t : x_grid_text) grid.push_back(parse_point(t));
      rep = estimate_moment_sup(f, p, moment_p, grid, {reps, c.workers});
    }
    runner.finish(rep.to_json(), cfg, p.seed);
    return 0;
  }

  if (weights->parsed()) {
    runner.finish(solve_weights(wk, wd).to_json(), json{{"k", wk}, {"d", wd}}, 0);
    return 0;
  }

  if (clt->parsed()) {
    const json cfg = runner.config();
    ExperimentSpec spec;
    spec.statistic = stat_name;
    spec.process = runner.process(cfg, clt_seed);
    spec.params = tflags.resolve(cfg);
    spec.grid = parse_list(grid_text);
    spec.replications = clt_reps;
    spec.seed = spec.process.seed;
    spec.workers = c.workers;
    const MonteCarloReport rep = run_experiment(spec);
    if (!csv_out.empty()) {
      std::ostringstream os;
      rep.write_csv(os);
      emit(csv_out, os.str());
    }
    runner.finish(rep.to_json(!no_samples), cfg, spec.seed);
    return 0;
  }

  if (bound->parsed()) {
    const json cfg = runner.config();
    const ProcessConfig p = runner.process(cfg, bound_seed);
    const Region k = parse_region(region_text);
    if (bound_kind == "theta") {
      const Estimate t = theta_bound(p.density, k, {c2, c3}, moment_p, p.size_parameter(), {10'000, 10, p.seed});
      runner.finish({{"theta", t.value}, {"standard_error", t.standard_error}, {"region", k.to_json()}}, cfg, p.seed);
      return 0;
    }
    if (stat_name.empty()) throw InvalidInput("--mode theorem31 needs --stat");
    const StatisticDescriptor f = make_statistic(stat_name, bflags.resolve(cfg));
    Theorem31Options opt;
    opt.replications = bound_reps;
    opt.anchors = anchors;
    opt.partners = partners;
    opt.workers = c.workers;
    opt.k = k;
    opt.decay = {c2, c3};
    opt.p = moment_p;
    std::function<Window(const Point&)> windows;
    if (window_radius > 0.0) windows = [window_radius](const Point& x) { return Window::ball(x, window_radius); };
    runner.finish(theorem31_bound(f, p, windows, opt).to_json(), cfg, p.seed);
    return 0;
  }

  if (report->parsed()) {
    const json doc = read_json_file(in_path);
    if (!doc.contains("manifest")) throw InvalidInput("'" + in_path + "' carries no manifest");
    json out = {{"file", in_path}, {"manifest", doc.at("manifest")}};
    if (!report_config.empty()) {
      const RunManifest m = RunManifest::make({}, read_json_file(report_config), 0);
      out["digest_matches"] = m.config_digest == doc.at("manifest").value("config_digest", "");
    }
    if (doc.contains("records")) {
      json rows = json::array();
      for (const auto& r : doc.at("records")) {
        rows.push_back({{"n", r.at("n")}, {"mean", r.at("mean")}, {"var", r.at("variance")}, {"d_K", r.at("d_k")},
                        {"dkw_radius", r.at("dkw_radius")}});
      }
      out["rows"] = rows;
      out["fit"] = doc.at("fit");
      out["variance_verdict"] = doc.at("variance_verdict");
    }
    emit(c.out, out.dump(2) + "\n");
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const stabkit::Error& e) {
    std::cerr << "stabkit: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "stabkit: " << e.what() << '\n';
    return 1;
  }
}
