#include "srcloc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "srcloc/estimation.hpp"
#include "srcloc/generators.hpp"
#include "srcloc/parallel.hpp"
#include "srcloc/rng.hpp"

namespace srcloc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t x = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("bad " + what + " '" + text + "'");
  return x;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ','))
    if (!item.empty()) out.push_back(parse_double(item));
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw std::invalid_argument("bad number '" + text + "'");
  return x;
}

PlacementSpec PlacementSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.empty()) throw std::invalid_argument("empty placement line");
  PlacementSpec spec;
  spec.algorithm = words[0];
  static const std::vector<std::string> known{"lv",      "hv",      "bc",   "coverage",   "kmedian",
                                              "entropy", "edist",   "edist-hops", "exhaustive", "file"};
  if (std::find(known.begin(), known.end(), spec.algorithm) == known.end())
    throw std::invalid_argument("unknown placement algorithm '" + spec.algorithm + "'");
  if (spec.algorithm == "file") {
    if (words.size() != 2) throw std::invalid_argument("placement 'file' takes one path");
    spec.observers_file = words[1];
    return spec;
  }
  if (words.size() < 2) throw std::invalid_argument("placement '" + text + "' needs a budget");
  spec.k = parse_count(words[1], "budget");
  if (spec.k < 2) throw std::invalid_argument("placement budget must be at least 2");
  for (std::size_t i = 2; i < words.size(); ++i) {
    const std::string& w = words[i];
    if (w.rfind("L=", 0) == 0) spec.L = parse_double(w.substr(2));
    else if (w.rfind("Lgrid=", 0) == 0) spec.L_grid = parse_double_list(w.substr(6));
    else throw std::invalid_argument("unknown placement option '" + w + "'");
  }
  if (spec.algorithm == "hv" && !spec.L && spec.L_grid.empty())
    throw std::invalid_argument("placement 'hv' needs L= or Lgrid=");
  if (spec.algorithm != "hv" && (spec.L || !spec.L_grid.empty()))
    throw std::invalid_argument("only 'hv' takes a length constraint");
  return spec;
}

void ExperimentConfig::validate() const {
  if (graph_path.empty()) throw std::invalid_argument("config: graph is required");
  if (placements.empty()) throw std::invalid_argument("config: at least one placement is required");
  if (levels.empty()) throw std::invalid_argument("config: levels must not be empty");
  for (double l : levels) {
    if (!(l >= 0.0)) throw std::invalid_argument("config: levels must be nonnegative");
    if (model_family == TransmissionModel::Kind::uniform_factor && !(l < 1.0))
      throw std::invalid_argument("config: uniform levels must lie in [0, 1)");
  }
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw std::invalid_argument("config: levels must be ascending");
  if (runs_per_source == 0) throw std::invalid_argument("config: runs must be positive");
  if (observation_limit && *observation_limit < 2) throw std::invalid_argument("config: limit must be at least 2");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "graph") cfg.graph_path = resolve(base_dir, value).string();
      else if (key == "placement") cfg.placements.push_back(PlacementSpec::parse(value));
      else if (key == "model") {
        if (value == "gaussian") cfg.model_family = TransmissionModel::Kind::truncated_gaussian;
        else if (value == "uniform") cfg.model_family = TransmissionModel::Kind::uniform_factor;
        else throw std::invalid_argument("model must be gaussian or uniform");
      } else if (key == "levels") cfg.levels = parse_double_list(value);
      else if (key == "runs") cfg.runs_per_source = parse_count(value, "runs");
      else if (key == "limit") cfg.observation_limit = parse_count(value, "limit");
      else if (key == "seed") cfg.master_seed = parse_count(value, "seed");
      else if (key == "prior") cfg.prior_path = resolve(base_dir, value).string();
      else if (key == "threads") cfg.threads = parse_count(value, "threads");
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

ObserverSet read_observer_file(std::istream& in, const Graph& g) {
  std::vector<NodeId> nodes;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      if (trim(line.substr(0, eq)) != "observers") continue;
      line = line.substr(eq + 1);
      std::replace(line.begin(), line.end(), ',', ' ');
    }
    std::istringstream words(line);
    for (std::string w; words >> w;) nodes.push_back(g.find(w));
  }
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw std::invalid_argument("observer file lists a node twice");
  return ObserverSet(std::move(nodes));
}

LabelledPlacement compute_placement(const Graph& g, const PlacementSpec& spec, const std::filesystem::path& base_dir) {
  if (spec.algorithm == "file") {
    const std::filesystem::path path = resolve(base_dir, spec.observers_file);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open observer file '" + path.string() + "'");
    return {"file-" + path.stem().string(), read_observer_file(in, g)};
  }
  if (spec.k > g.node_count()) throw std::invalid_argument("placement budget exceeds the node count");
  const std::string k = "-k" + std::to_string(spec.k);
  const std::string& a = spec.algorithm;
  if (a == "lv") return {"lv" + k, lv_obs(g, spec.k).observers};
  if (a == "entropy") return {"entropy" + k, entropy_greedy_placement(g, spec.k).observers};
  if (a == "edist")
    return {"edist" + k, expected_distance_greedy_placement(g, spec.k, DistanceMode::weighted).observers};
  if (a == "edist-hops")
    return {"edist-hops" + k, expected_distance_greedy_placement(g, spec.k, DistanceMode::hops).observers};
  if (a == "bc") return {"bc" + k, betweenness_placement(g, spec.k).observers};
  if (a == "coverage") return {"coverage" + k, coverage_rate_placement(g, spec.k).observers};
  if (a == "kmedian") return {"kmedian" + k, k_median_placement(g, spec.k).observers};
  if (a == "exhaustive")
    return {"exhaustive" + k,
            exhaustive_optimal_placement(g, spec.k, ExhaustiveObjective::success_probability).observers};
  if (a == "hv") {
    const double L = spec.L ? *spec.L : select_length_constraint(g, spec.k, spec.L_grid).L;
    return {"hv" + k + "-L" + format_double(L), hv_obs(g, spec.k, L).observers};
  }
  throw std::invalid_argument("unknown placement algorithm '" + a + "'");
}

std::uint64_t run_seed(std::uint64_t master, NodeId source, std::size_t level_index, std::size_t run) {
  return derive_seed({master, source, level_index, run});
}

std::vector<MetricsRow> run_experiment(const Graph& g, std::span<const LabelledPlacement> placements,
                                       const SimulationPlan& plan, const Prior& prior) {
  if (prior.size() != g.node_count()) throw std::invalid_argument("prior size does not match the graph");
  if (plan.runs_per_source == 0) throw std::invalid_argument("runs per source must be positive");
  for (const LabelledPlacement& p : placements) {
    p.observers.check_against(g);
    if (p.observers.size() < 2) throw std::invalid_argument("placement '" + p.tag + "' has fewer than 2 observers");
  }
  const std::size_t n = g.node_count();
  std::vector<TransmissionModel> models;
  for (double level : plan.levels)
    models.push_back(plan.model_family == TransmissionModel::Kind::uniform_factor
                         ? TransmissionModel::uniform_factor(level)
                         : TransmissionModel::truncated_gaussian(level));

  struct Partial {
    std::uint64_t hits = 0;
    double hops = 0.0;
    double weighted = 0.0;
  };
  const std::size_t P = placements.size(), Lv = models.size();
  // partial[s][p * Lv + l]; the reduction below walks sources in order.
  std::vector<std::vector<Partial>> partial(n, std::vector<Partial>(P * Lv));

  parallel_for(n, [&](std::size_t si) {
    const auto s = static_cast<NodeId>(si);
    for (std::size_t l = 0; l < Lv; ++l) {
      const double sd = models[l].relative_sd();
      for (std::size_t r = 0; r < plan.runs_per_source; ++r) {
        const std::uint64_t seed = run_seed(plan.master_seed, s, l, r);
        const EpidemicTrace trace = simulate(g, models[l], s, seed);
        for (std::size_t p = 0; p < P; ++p) {
          const Observation obs = observe(trace, placements[p].observers, plan.observation_limit);
          Rng rng(derive_seed({seed, p, 1}));
          const NodeId est = sd == 0.0 ? zero_variance_estimate(g, obs, prior, rng).estimate
                                       : gaussian_ml_estimate(g, obs, sd, rng).estimate;
          Partial& acc = partial[si][p * Lv + l];
          if (est == s) ++acc.hits;
          acc.hops += static_cast<double>(g.hops(est, s));
          acc.weighted += g.d(est, s);
        }
      }
    }
  });

  std::vector<MetricsRow> rows;
  const double total = static_cast<double>(n * plan.runs_per_source);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t l = 0; l < Lv; ++l) {
      Partial sum;
      for (std::size_t s = 0; s < n; ++s) {
        const Partial& x = partial[s][p * Lv + l];
        sum.hits += x.hits;
        sum.hops += x.hops;
        sum.weighted += x.weighted;
      }
      MetricsRow row;
      row.placement = placements[p].tag;
      row.level = plan.levels[l];
      row.runs = n * plan.runs_per_source;
      row.ps = static_cast<double>(sum.hits) / total;
      row.ps_se = std::sqrt(row.ps * (1.0 - row.ps) / total);
      row.ed_hops = sum.hops / total;
      row.ed_weighted = sum.weighted / total;
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
    return a.placement != b.placement ? a.placement < b.placement : a.level < b.level;
  });
  return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
  cfg.validate();
  const LoadedGraph loaded = load_edge_list_file(cfg.graph_path);
  const Graph& g = loaded.graph;
  Prior prior = Prior::uniform(g.node_count());
  if (!cfg.prior_path.empty()) {
    std::ifstream in(cfg.prior_path);
    if (!in) throw std::runtime_error("cannot open prior '" + cfg.prior_path + "'");
    prior = load_prior(in, g);
  }
  std::vector<LabelledPlacement> placements;
  for (const PlacementSpec& spec : cfg.placements) placements.push_back(compute_placement(g, spec, base_dir));
  SimulationPlan plan{cfg.model_family, cfg.levels, cfg.runs_per_source, cfg.observation_limit, cfg.master_seed};
  return run_experiment(g, placements, plan, prior);
}

void emit_csv(std::span<const MetricsRow> rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("no rows to write");
  out << kCsvHeader << '\n';
  for (const MetricsRow& r : rows)
    out << r.placement << ',' << format_double(r.level) << ',' << format_double(r.ps) << ','
        << format_double(r.ps_se) << ',' << format_double(r.ed_hops) << ',' << format_double(r.ed_weighted) << ','
        << r.runs << '\n';
}

void emit_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  emit_csv(rows, out);
}

std::vector<MetricsRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw std::invalid_argument("csv: missing header");
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 7 || f[0].empty())
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 7 fields");
    MetricsRow r;
    r.placement = f[0];
    r.level = parse_double(f[1]);
    r.ps = parse_double(f[2]);
    r.ps_se = parse_double(f[3]);
    r.ed_hops = parse_double(f[4]);
    r.ed_weighted = parse_double(f[5]);
    r.runs = parse_count(f[6], "run count");
    rows.push_back(r);
  }
  if (rows.empty()) throw std::invalid_argument("csv: no rows");
  return rows;
}

void emit_plotdata(std::span<const MetricsRow> rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const MetricsRow*>> by_tag;
  for (const MetricsRow& r : rows) by_tag[r.placement].push_back(&r);
  for (const auto& [tag, list] : by_tag) {
    std::ofstream out(dir / (tag + ".dat"));
    if (!out) throw std::runtime_error("cannot write plot data for '" + tag + "'");
    out << "# sigma ps\n";
    for (const MetricsRow* r : list) out << format_double(r->level) << ' ' << format_double(r->ps) << '\n';
  }
}

std::vector<ComparisonRow> compare_objectives(GraphFamily family, std::span<const std::size_t> k_list,
                                              std::size_t trials, const ComparisonSetup& setup) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  for (std::size_t k : k_list)
    if (k < 1 || k > setup.n) throw std::invalid_argument("budget outside [1, n]");
  const std::size_t K = k_list.size();
  std::vector<std::vector<double>> ps_dist(K), ed_dist(K), ps_ent(K);
  for (auto* v : {&ps_dist, &ed_dist, &ps_ent})
    for (auto& x : *v) x.resize(trials);

  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed({setup.seed, t});
    const GeneratedGraph gen = family == GraphFamily::random_geometric
                                   ? make_random_geometric(setup.n, setup.radius, seed)
                                   : make_barabasi_albert(setup.n, setup.attach, seed);
    const Graph& g = gen.graph;
    const auto lv = partition_greedy_for_budgets(g, PartitionObjective::class_count, k_list);
    const auto ed = partition_greedy_for_budgets(g, PartitionObjective::expected_distance_weighted, k_list);
    const auto en = partition_greedy_for_budgets(g, PartitionObjective::entropy, k_list);
    for (std::size_t i = 0; i < K; ++i) {
      const PlacementMetrics& a = lv[i].metrics;
      const PlacementMetrics& b = ed[i].metrics;
      const PlacementMetrics& c = en[i].metrics;
      ps_dist[i][t] = (b.success_probability - a.success_probability) / a.success_probability;
      ed_dist[i][t] = (b.expected_distance_weighted - a.expected_distance_weighted) /
                      (b.expected_distance_weighted + 1.0);
      ps_ent[i][t] = (c.success_probability - a.success_probability) / a.success_probability;
    }
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < K; ++i)
    rows.push_back({family, k_list[i], trials, mean_of(ps_dist[i]), standard_error(ps_dist[i]),
                    mean_of(ed_dist[i]), standard_error(ed_dist[i]), mean_of(ps_ent[i]),
                    standard_error(ps_ent[i])});
  return rows;
}

void emit_comparison(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "family,k,trials,ps_dist_mean,ps_dist_se,ed_dist_mean,ed_dist_se,ps_ent_mean,ps_ent_se\n";
  for (const ComparisonRow& r : rows)
    out << (r.family == GraphFamily::random_geometric ? "rgg" : "ba") << ',' << r.k << ',' << r.trials << ','
        << format_double(r.ps_dist_mean) << ',' << format_double(r.ps_dist_se) << ','
        << format_double(r.ed_dist_mean) << ',' << format_double(r.ed_dist_se) << ','
        << format_double(r.ps_ent_mean) << ',' << format_double(r.ps_ent_se) << '\n';
}

}  // namespace srcloc
