#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srcloc/epidemic.hpp"
#include "srcloc/estimation.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/harness.hpp"
#include "srcloc/parallel.hpp"
#include "srcloc/placement.hpp"
#include "srcloc/resolution.hpp"

using namespace srcloc;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

Graph load_graph(const std::string& path) {
  LoadedGraph loaded = load_edge_list_file(path);
  if (!loaded.non_integer_weight_lines.empty())
    std::cerr << "note: " << loaded.non_integer_weight_lines.size() << " edge(s) with non-integer weight\n";
  return std::move(loaded.graph);
}

std::string join_labels(const Graph& g, const std::vector<NodeId>& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out += (i ? "," : "") + g.label(nodes[i]);
  return out;
}

void write_placement(std::ostream& out, const Graph& g, const PlacementResult& r) {
  out << "algorithm = " << r.algorithm << '\n';
  out << "k = " << r.k << '\n';
  if (r.length_constraint) out << "L = " << format_double(*r.length_constraint) << '\n';
  if (r.start) out << "start = " << g.label(*r.start) << '\n';
  out << "starts_tried = " << r.starts_tried << '\n';
  out << "success_probability = " << format_double(r.metrics.success_probability) << '\n';
  out << "expected_distance_weighted = " << format_double(r.metrics.expected_distance_weighted) << '\n';
  out << "expected_distance_hops = " << format_double(r.metrics.expected_distance_hops) << '\n';
  out << "entropy = " << format_double(r.metrics.entropy) << '\n';
  if (r.metrics.covered) out << "covered = " << *r.metrics.covered << '\n';
  out << "objective_trace = ";
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) out << (i ? "," : "") << format_double(r.objective_trace[i]);
  out << '\n';
  out << "observers = " << join_labels(g, r.observers.nodes()) << '\n';
}

StartSet read_starts(const std::string& path, const Graph& g) {
  if (path.empty()) return {};
  std::ifstream in = open_input(path);
  return read_observer_file(in, g).nodes();
}

// `label time` or `label,time` lines; `#` comments and a non-numeric header are skipped.
std::vector<double> read_times(const std::string& path, const Graph& g) {
  std::ifstream in = open_input(path);
  std::vector<double> times(g.node_count(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream words(line);
    std::string label, value;
    if (!(words >> label >> value)) continue;
    double t;
    try {
      t = parse_double(value);
    } catch (const std::invalid_argument&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    times[g.find(label)] = t;
  }
  return times;
}

int cmd_place(const std::string& graph_path, const std::string& algo, std::size_t k, std::optional<double> L,
              const std::vector<double>& grid, const std::string& seeds_path, const std::string& out_path) {
  const Graph g = load_graph(graph_path);
  const StartSet starts = read_starts(seeds_path, g);
  PlacementResult r;
  if (algo == "lv") r = lv_obs(g, k, starts);
  else if (algo == "entropy") r = entropy_greedy_placement(g, k, starts);
  else if (algo == "edist") r = expected_distance_greedy_placement(g, k, DistanceMode::weighted, starts);
  else if (algo == "bc") r = betweenness_placement(g, k);
  else if (algo == "coverage") r = coverage_rate_placement(g, k);
  else if (algo == "kmedian") r = k_median_placement(g, k);
  else if (algo == "exhaustive") r = exhaustive_optimal_placement(g, k, ExhaustiveObjective::success_probability);
  else if (algo == "hv") {
    double length = g.weighted_diameter();
    if (L) length = *L;
    else if (!grid.empty()) {
      const LengthSelection sel = select_length_constraint(g, k, grid, starts);
      if (sel.fallback) std::cerr << "note: no grid value qualified; using the smallest\n";
      length = sel.L;
    }
    r = hv_obs(g, k, length, starts);
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  write_placement(out, g, r);
  return 0;
}

int cmd_simulate(const std::string& graph_path, const std::string& source, const std::string& model,
                 std::uint64_t seed, const std::string& out_path) {
  const Graph g = load_graph(graph_path);
  const EpidemicTrace trace = simulate(g, TransmissionModel::parse(model), g.find(source), seed);
  if (out_path.empty() || out_path == "-") {
    write_trace_csv(std::cout, g, trace);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    write_trace_csv(out, g, trace);
  }
  return 0;
}

int cmd_estimate(const std::string& graph_path, const std::string& observers_path, const std::string& times_path,
                 double sigma, std::optional<std::size_t> limit, const std::string& mode, std::uint64_t seed) {
  const Graph g = load_graph(graph_path);
  std::ifstream oin = open_input(observers_path);
  const ObserverSet observers = read_observer_file(oin, g);
  EpidemicTrace trace;
  trace.infection_time = read_times(times_path, g);
  for (NodeId o : observers)
    if (std::isnan(trace.infection_time[o])) throw std::invalid_argument("no time for observer " + g.label(o));
  const Observation obs = observe(trace, observers, limit);
  Rng rng(seed);
  const bool zero = mode == "zero" || sigma == 0.0;
  const EstimateResult r = zero ? zero_variance_estimate(g, obs, Prior::uniform(g.node_count()), rng)
                                : gaussian_ml_estimate(g, obs, sigma, rng);
  std::cout << "estimate = " << g.label(r.estimate) << '\n';
  std::cout << "mode = " << (r.mode == EstimatorMode::zero_variance ? "zero" : "ml") << '\n';
  if (r.no_exact_match) std::cout << "note = no exact match; nearest distance vector used\n";
  std::cout << "ties = " << join_labels(g, r.ties) << '\n';
  std::cout << "rank,node,score\n";
  const auto top = r.top(10);
  for (std::size_t i = 0; i < top.size(); ++i)
    std::cout << i + 1 << ',' << g.label(top[i].node) << ',' << format_double(top[i].score) << '\n';
  return 0;
}

int cmd_experiment(const std::string& config_path, std::optional<std::size_t> threads, const std::string& plotdata,
                   const std::string& out_path) {
  const ExperimentConfig cfg = load_config(config_path);
  set_thread_count(threads ? *threads : cfg.threads);
  const auto rows = run_experiment(cfg, std::filesystem::path(config_path).parent_path());
  if (out_path.empty() || out_path == "-") emit_csv(rows, std::cout);
  else emit_csv(rows, std::filesystem::path(out_path));
  if (!plotdata.empty()) emit_plotdata(rows, plotdata);
  return 0;
}

int cmd_compare(const std::string& family, const std::vector<std::size_t>& ks, std::size_t trials,
                const ComparisonSetup& setup) {
  GraphFamily f;
  if (family == "rgg") f = GraphFamily::random_geometric;
  else if (family == "ba") f = GraphFamily::barabasi_albert;
  else throw std::invalid_argument("family must be rgg or ba");
  const auto rows = compare_objectives(f, ks, trials, setup);
  emit_comparison(rows, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observer placement and epidemic source localization"};
  app.require_subcommand(1);

  std::string graph_path, out_path;

  auto* place = app.add_subcommand("place", "Place k observers");
  std::string algo;
  std::size_t k = 0;
  std::optional<double> L;
  std::vector<double> L_grid;
  std::string seeds_path;
  place->add_option("--graph", graph_path, "Edge list file")->required();
  place->add_option("--algo", algo, "Placement algorithm")
      ->required()
      ->check(CLI::IsMember({"lv", "hv", "bc", "coverage", "kmedian", "entropy", "edist", "exhaustive"}));
  place->add_option("--k", k, "Observer budget")->required()->check(CLI::PositiveNumber);
  auto* l_opt = place->add_option("--L", L, "Length constraint for hv");
  place->add_option("--L-grid", L_grid, "Candidate length constraints for hv")->delimiter(',')->excludes(l_opt);
  place->add_option("--seeds", seeds_path, "File restricting the greedy start vertices");
  place->add_option("--out", out_path, "Output record")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate one epidemic");
  std::string source, model = "deterministic";
  std::uint64_t seed = 1;
  sim->add_option("--graph", graph_path, "Edge list file")->required();
  sim->add_option("--source", source, "Source node label")->required();
  sim->add_option("--model", model, "deterministic, gaussian:SIGMA or uniform:EPS")->capture_default_str();
  sim->add_option("--seed", seed, "Random seed")->capture_default_str();
  sim->add_option("--out", out_path, "Trace CSV (default stdout)");

  auto* est = app.add_subcommand("estimate", "Estimate the source from observer times");
  std::string observers_path, times_path, mode = "ml";
  double sigma = 0.0;
  std::optional<std::size_t> limit;
  est->add_option("--graph", graph_path, "Edge list file")->required();
  est->add_option("--observers", observers_path, "Observer list or placement record")->required();
  est->add_option("--times", times_path, "Infection times (trace CSV or `node time` lines)")->required();
  est->add_option("--sigma", sigma, "Relative delay standard deviation")->required()->check(CLI::NonNegativeNumber);
  est->add_option("--limit", limit, "Keep only the earliest m observers");
  est->add_option("--mode", mode, "zero or ml")->check(CLI::IsMember({"zero", "ml"}))->capture_default_str();
  est->add_option("--seed", seed, "Seed for the within-class draw")->capture_default_str();

  auto* exp = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  std::string config_path, plotdata;
  std::optional<std::size_t> threads;
  exp->add_option("--config", config_path, "Config file")->required();
  exp->add_option("--threads", threads, "Worker threads (0 = all cores, 1 = serial)");
  exp->add_option("--plotdata", plotdata, "Directory for per-placement `sigma ps` files");
  exp->add_option("--out", out_path, "CSV output (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Compare lv-Obs with the entropy and distance greedies");
  std::string family;
  std::vector<std::size_t> ks{2, 4, 8};
  std::size_t trials = 30;
  ComparisonSetup setup;
  cmp->add_option("--family", family, "rgg or ba")->required()->check(CLI::IsMember({"rgg", "ba"}));
  cmp->add_option("--k", ks, "Budgets")->delimiter(',');
  cmp->add_option("--trials", trials, "Independent graphs")->capture_default_str();
  cmp->add_option("--n", setup.n, "Nodes per graph")->capture_default_str();
  cmp->add_option("--seed", setup.seed, "Master seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*place) return cmd_place(graph_path, algo, k, L, L_grid, seeds_path, out_path);
    if (*sim) return cmd_simulate(graph_path, source, model, seed, out_path);
    if (*est) return cmd_estimate(graph_path, observers_path, times_path, sigma, limit, mode, seed);
    if (*exp) return cmd_experiment(config_path, threads, plotdata, out_path);
    if (*cmp) return cmd_compare(family, ks, trials, setup);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
