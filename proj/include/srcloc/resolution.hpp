#pragma once

#include <istream>
#include <span>
#include <vector>

#include "srcloc/graph.hpp"

namespace srcloc {

/// Distinct observers kept sorted ascending; the first one is the reference.
class ObserverSet {
 public:
  ObserverSet() = default;
  explicit ObserverSet(std::vector<NodeId> nodes);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  NodeId reference() const { return nodes_.front(); }
  NodeId operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  bool contains(NodeId v) const;
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  /// Throws std::invalid_argument unless every observer is a node of g.
  void check_against(const Graph& g) const;

  friend bool operator==(const ObserverSet&, const ObserverSet&) = default;

 private:
  std::vector<NodeId> nodes_;
};

using DistanceVector = std::vector<double>;

/// Classes are listed in order of their smallest member and each class is
/// sorted ascending, so two partitions of the same node set compare equal
/// exactly when they group nodes identically.
struct EquivalencePartition {
  std::vector<std::vector<NodeId>> classes;
  std::vector<std::uint32_t> class_of;

  std::size_t class_count() const { return classes.size(); }
  std::size_t node_count() const { return class_of.size(); }

  /// Builds the canonical form from arbitrary per-node labels.
  static EquivalencePartition from_labels(std::span<const std::uint32_t> labels);
  /// Everything in one class (the zero-information partition).
  static EquivalencePartition single_class(std::size_t n);

  friend bool operator==(const EquivalencePartition&, const EquivalencePartition&) = default;
};

class Prior {
 public:
  static Prior uniform(std::size_t n);
  /// Validates nonnegativity and that the total is 1 within 1e-12.
  explicit Prior(std::vector<double> probabilities);

  double operator()(NodeId v) const { return p_[v]; }
  std::size_t size() const { return p_.size(); }
  const std::vector<double>& values() const { return p_; }
  bool is_uniform() const { return uniform_; }

 private:
  Prior() = default;
  std::vector<double> p_;
  bool uniform_ = false;
};

/// Reads `node probability` lines; omitted nodes get probability 0.
Prior load_prior(std::istream& in, const Graph& g);

enum class DistanceMode { weighted, hops };

/// Entries d(s, o_j) - d(s, o_ref) for every observer j != ref, in observer
/// order. ref_index selects the reference (0 = smallest id).
DistanceVector distance_vector(const Graph& g, const ObserverSet& observers, NodeId s,
                               std::size_t ref_index = 0);

EquivalencePartition partition(const Graph& g, const ObserverSet& observers,
                               std::size_t ref_index = 0);

/// Splits every class of `labels` by `values` (nodes in the same class with
/// equal values stay together, under the graph's length tolerance). Returns
/// labels numbered by first appearance in node order and the class count.
struct Refinement {
  std::vector<std::uint32_t> labels;
  std::size_t classes = 0;
};
Refinement refine(const Graph& g, std::span<const std::uint32_t> labels,
                  std::span<const double> values);

double success_probability(const EquivalencePartition& p, const Prior& prior);

double expected_distance(const Graph& g, const EquivalencePartition& p, const Prior& prior,
                         DistanceMode mode);

struct WorstCaseMetrics {
  double min_success;
  double max_distance;
  double expected_max_distance;
};
WorstCaseMetrics worst_case_metrics(const Graph& g, const EquivalencePartition& p,
                                    const Prior& prior);

/// log2 of the product of class-size factorials.
double entropy(const EquivalencePartition& p);

bool is_drs(const EquivalencePartition& p);

struct ResolutionGap {
  double delta;                  // min inf-norm gap between distinct distance vectors
  std::uint32_t max_hops;        // D: longest canonical node-to-observer path, in edges
  double epsilon0_lower_bound;   // delta / (2 D)
};
/// Throws std::domain_error when every node shares one distance vector.
ResolutionGap resolution_gap(const Graph& g, const ObserverSet& observers);

}  // namespace srcloc
