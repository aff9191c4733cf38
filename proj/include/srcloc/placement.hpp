#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srcloc/graph.hpp"
#include "srcloc/resolution.hpp"

namespace srcloc {

struct PlacementMetrics {
  double success_probability = 0.0;  // uniform prior, zero variance
  double expected_distance_weighted = 0.0;
  double expected_distance_hops = 0.0;
  double entropy = 0.0;
  std::optional<std::size_t> covered;  // |P_L(O)| when a length constraint applies
};

struct PlacementResult {
  std::string algorithm;
  ObserverSet observers;
  std::vector<double> objective_trace;  // objective after each pick, starting at |O| = 1
  PlacementMetrics metrics;
  std::size_t k = 0;
  std::optional<double> length_constraint;
  std::optional<NodeId> start;     // winning start vertex for seeded greedy loops
  std::size_t starts_tried = 0;    // number of start vertices examined
};

/// Analytic metrics of an observer set under the uniform prior. A single
/// observer yields one class (P_s = 1/n).
PlacementMetrics placement_metrics(const Graph& g, const ObserverSet& observers,
                                   std::optional<double> length_constraint = std::nullopt);

/// Restricts the start vertices of the seeded greedy loops. Empty = all nodes.
using StartSet = std::vector<NodeId>;

/// Greedy maximisation of the class count from every start vertex.
PlacementResult lv_obs(const Graph& g, std::size_t k, const StartSet& starts = {});

/// Greedy minimisation of the class-size entropy log2(prod |c|!).
PlacementResult entropy_greedy_placement(const Graph& g, std::size_t k, const StartSet& starts = {});

/// Greedy minimisation of the expected error distance (uniform prior).
PlacementResult expected_distance_greedy_placement(const Graph& g, std::size_t k, DistanceMode mode,
                                                   const StartSet& starts = {});

enum class PartitionObjective { class_count, entropy, expected_distance_weighted, expected_distance_hops };

/// Runs one of the partition-based greedy loops once and reports the result
/// for every requested budget. Trajectories from a start vertex do not depend
/// on the budget, so this equals calling the single-budget function per k.
std::vector<PlacementResult> partition_greedy_for_budgets(const Graph& g, PartitionObjective objective,
                                                          std::span<const std::size_t> budgets,
                                                          const StartSet& starts = {});

/// Nodes on the canonical shortest path of every observer pair at weighted
/// distance <= L, plus the observers themselves. Sorted ascending.
std::vector<NodeId> p_l_nodes(const Graph& g, std::span<const NodeId> observers, double L);

/// Greedy maximisation of |P_L(O)|.
PlacementResult hv_obs(const Graph& g, std::size_t k, double L, const StartSet& starts = {});

struct LengthSelection {
  double L;
  bool fallback;                    // no grid value qualified; smallest returned
  std::size_t reference_coverage;   // |P_Delta(lv_obs)|
  std::vector<std::size_t> coverage;  // |P_L(hv_obs(L))| per grid value
};

/// Largest grid value whose hv_obs coverage does not exceed the lv_obs
/// reference coverage at L = weighted diameter.
LengthSelection select_length_constraint(const Graph& g, std::size_t k, std::span<const double> grid,
                                         const StartSet& starts = {});

/// Betweenness centrality over unordered pairs, counting every weighted
/// shortest path.
std::vector<double> betweenness_centrality(const Graph& g);

PlacementResult betweenness_placement(const Graph& g, std::size_t k);
PlacementResult coverage_rate_placement(const Graph& g, std::size_t k);
PlacementResult k_median_placement(const Graph& g, std::size_t k);

enum class ExhaustiveObjective { success_probability, expected_distance };

struct ExhaustiveLimits {
  std::uint64_t max_subsets = 2'000'000;
};

/// True optimum over all k-subsets (first in lexicographic order on ties).
/// Throws std::length_error when C(n, k) exceeds the cap.
PlacementResult exhaustive_optimal_placement(const Graph& g, std::size_t k, ExhaustiveObjective objective,
                                             ExhaustiveLimits limits = {});

enum class DrsMethod { lv_obs, exhaustive };

/// Smallest budget for which the method reaches P_s = 1 (exact minimum DRS
/// size for the exhaustive method, an upper bound for lv_obs).
std::size_t min_drs_budget(const Graph& g, DrsMethod method, ExhaustiveLimits limits = {});

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);  // saturates at UINT64_MAX

}  // namespace srcloc
