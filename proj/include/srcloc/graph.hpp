#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srcloc {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;
  double w;
};

struct Neighbor {
  NodeId node;
  double w;
  std::uint32_t edge;  // index into Graph::edges()
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All-pairs weighted distances plus hop counts of the canonical paths.
///
/// hops(u, v) is the edge count of canonical_shortest_path(min(u,v), max(u,v)),
/// which keeps the matrix symmetric even when shortest paths of different hop
/// lengths exist.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<double> dist,
                 std::vector<std::uint32_t> hops)
      : n_(n), dist_(std::move(dist)), hops_(std::move(hops)) {}

  std::size_t size() const { return n_; }
  double d(NodeId u, NodeId v) const { return dist_[u * n_ + v]; }
  std::uint32_t hops(NodeId u, NodeId v) const { return hops_[u * n_ + v]; }
  std::span<const double> row(NodeId u) const {
    return {dist_.data() + u * n_, n_};
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<std::uint32_t> hops_;
};

struct CanonicalPath {
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> edges;
  double total_weight = 0.0;
};

struct ShortestPathTree {
  NodeId root = 0;
  std::vector<NodeId> parent;        // parent[root] == root
  std::vector<double> parent_weight; // weight of the edge to the parent, 0 at root
  std::vector<std::uint32_t> parent_edge;
  std::vector<double> depth;         // weighted distance from root
};

/// Immutable connected undirected weighted graph.
///
/// Construction validates the invariants (no self loops, no parallel edges,
/// positive weights, connected) and computes the all-pairs distance matrix
/// and the canonical next-hop table once. Shortest-path ties are always
/// broken towards the lexicographically smallest node sequence.
class Graph {
 public:
  Graph(std::size_t node_count, std::vector<Edge> edges,
        std::vector<std::string> labels = {});

  std::size_t node_count() const { return n_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(NodeId u) const { return adj_[u]; }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }

  const std::string& label(NodeId u) const { return labels_[u]; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Throws GraphError when the label is unknown.
  NodeId find(const std::string& label) const;

  bool integer_weights() const { return integer_weights_; }
  double weight(NodeId u, NodeId v) const;  // throws if not adjacent

  const DistanceMatrix& distances() const { return *dist_; }
  double d(NodeId u, NodeId v) const { return dist_->d(u, v); }
  std::uint32_t hops(NodeId u, NodeId v) const { return dist_->hops(u, v); }

  /// First step of the canonical path u -> v (u itself when u == v).
  NodeId next_hop(NodeId u, NodeId v) const { return next_[u * n_ + v]; }

  double weighted_diameter() const { return diameter_; }

  /// Relative tolerance used when comparing real-valued path lengths.
  double tolerance() const { return tol_; }
  bool same_length(double a, double b) const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<std::string> labels_;
  bool integer_weights_ = true;
  double tol_ = 0.0;
  double diameter_ = 0.0;
  std::shared_ptr<const DistanceMatrix> dist_;
  std::vector<NodeId> next_;
};

struct LoadedGraph {
  Graph graph;
  /// Line numbers of edges with non-integer weights (informational only).
  std::vector<std::size_t> non_integer_weight_lines;
};

/// Parses the `u v w` edge-list format. Node ids are arbitrary tokens mapped
/// to dense ids in first-seen order. '#' starts a comment.
LoadedGraph load_edge_list(std::istream& in);
LoadedGraph load_edge_list_file(const std::string& path);

/// Runs single-source shortest paths from every node. The Graph constructor
/// already does this; exposed for callers that want a fresh matrix.
DistanceMatrix all_pairs_shortest_paths(const Graph& g);

/// Single-source Dijkstra over arbitrary nonnegative per-edge weights
/// (indexed like Graph::edges()).
std::vector<double> single_source_distances(const Graph& g, NodeId source,
                                            std::span<const double> edge_weights);

CanonicalPath canonical_shortest_path(const Graph& g, NodeId u, NodeId v);

ShortestPathTree shortest_path_tree(const Graph& g, NodeId root);

}  // namespace srcloc
