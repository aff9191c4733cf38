#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "srcloc/epidemic.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/placement.hpp"
#include "srcloc/resolution.hpp"

namespace srcloc {

/// One placement line of an experiment config, e.g. `lv 5`, `hv 5 L=3.5`,
/// `hv 5 Lgrid=1,2,4` or `file observers.txt`.
struct PlacementSpec {
  std::string algorithm;  // lv hv bc coverage kmedian entropy edist edist-hops exhaustive file
  std::size_t k = 0;
  std::optional<double> L;
  std::vector<double> L_grid;
  std::string observers_file;

  static PlacementSpec parse(const std::string& text);
};

struct ExperimentConfig {
  std::string graph_path;
  std::vector<PlacementSpec> placements;
  TransmissionModel::Kind model_family = TransmissionModel::Kind::truncated_gaussian;
  std::vector<double> levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t runs_per_source = 5;
  std::optional<std::size_t> observation_limit;
  std::uint64_t master_seed = 1;
  std::string prior_path;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Flat `key = value` format; `placement` may repeat. Relative paths are
/// resolved against base_dir.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path);

struct LabelledPlacement {
  std::string tag;
  ObserverSet observers;
};

/// Observer list file: labels separated by whitespace, one or more per line,
/// or the record written by `place` (its `observers = a,b,c` line is used).
ObserverSet read_observer_file(std::istream& in, const Graph& g);

LabelledPlacement compute_placement(const Graph& g, const PlacementSpec& spec,
                                    const std::filesystem::path& base_dir = {});

struct MetricsRow {
  std::string placement;
  double level = 0.0;  // sigma, or epsilon for the uniform model
  double ps = 0.0;
  double ps_se = 0.0;
  double ed_hops = 0.0;
  double ed_weighted = 0.0;
  std::uint64_t runs = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct SimulationPlan {
  TransmissionModel::Kind model_family = TransmissionModel::Kind::truncated_gaussian;
  std::vector<double> levels;
  std::size_t runs_per_source = 1;
  std::optional<std::size_t> observation_limit;
  std::uint64_t master_seed = 1;
};

/// Every node in turn is the source, runs_per_source epidemics per level.
/// Level 0 uses the zero-variance estimator, other levels the Gaussian ML
/// estimator with the model's relative standard deviation. Rows are sorted by
/// (placement tag, level).
std::vector<MetricsRow> run_experiment(const Graph& g, std::span<const LabelledPlacement> placements,
                                       const SimulationPlan& plan, const Prior& prior);

/// Loads the graph, computes the placements and runs the plan.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& base_dir = {});

/// Per-run seed: a pure function of (master seed, source, level index, run).
std::uint64_t run_seed(std::uint64_t master, NodeId source, std::size_t level_index, std::size_t run);

inline constexpr const char* kCsvHeader = "placement,sigma,ps,ps_se,ed_hops,ed_weighted,runs";

void emit_csv(std::span<const MetricsRow> rows, std::ostream& out);
void emit_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);
std::vector<MetricsRow> parse_csv(std::istream& in);

/// One `<tag>.dat` file per placement with `sigma ps` lines.
void emit_plotdata(std::span<const MetricsRow> rows, const std::filesystem::path& dir);

enum class GraphFamily { random_geometric, barabasi_albert };

struct ComparisonRow {
  GraphFamily family;
  std::size_t k;
  std::size_t trials;
  double ps_dist_mean, ps_dist_se;  // (P_s(edist) - P_s(lv)) / P_s(lv)
  double ed_dist_mean, ed_dist_se;  // (E_d(edist) - E_d(lv)) / (E_d(edist) + 1)
  double ps_ent_mean, ps_ent_se;    // (P_s(entropy) - P_s(lv)) / P_s(lv)
};

struct ComparisonSetup {
  std::size_t n = 100;
  double radius = 0.2;       // random geometric
  std::size_t attach = 3;    // Barabasi-Albert m
  std::uint64_t seed = 1;
};

/// Compares lv_obs against the expected-distance and entropy greedy loops on
/// `trials` independently generated graphs of one family.
std::vector<ComparisonRow> compare_objectives(GraphFamily family, std::span<const std::size_t> k_list,
                                              std::size_t trials, const ComparisonSetup& setup = {});

void emit_comparison(std::span<const ComparisonRow> rows, std::ostream& out);

std::string format_double(double x);  // shortest round-trip representation
double parse_double(const std::string& text);

}  // namespace srcloc
