#pragma once

#include <cstdint>

#include "srcloc/graph.hpp"

namespace srcloc {

// Deterministic topologies. Nodes are numbered 0..n-1 along the structure.

/// Path 0 - 1 - ... - (n-1).
Graph make_path(std::size_t n, double w = 1.0);
/// Cycle on n >= 3 nodes.
Graph make_cycle(std::size_t n, double w = 1.0);
/// Star with center 0 and `leaves` leaves 1..leaves (K_{1,leaves}).
Graph make_star(std::size_t leaves, double w = 1.0);
/// Cycle 0..n-1 plus a leaf (node n) attached to node 0.
Graph make_cycle_with_leaf(std::size_t n, double w = 1.0);
/// rows x cols grid with unit spacing; node id = r * cols + c.
Graph make_grid(std::size_t rows, std::size_t cols, double w = 1.0);

struct GeneratedGraph {
  Graph graph;
  std::uint64_t seed_used;  // differs from the requested seed if regenerated
};

/// Points uniform in the unit square, unit-weight edge when the Euclidean
/// distance is at most `radius`. Disconnected draws are retried with seed+1,
/// seed+2, ... up to `max_attempts`.
GeneratedGraph make_random_geometric(std::size_t n, double radius, std::uint64_t seed,
                                     std::size_t max_attempts = 1000);

/// Preferential attachment. Starts from a clique on m+1 nodes; every later
/// node attaches to m distinct existing nodes chosen with probability
/// proportional to degree. Edge count: m(m+1)/2 + (n-m-1)m. Unit weights.
GeneratedGraph make_barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

/// Uniform random labelled tree (random Pruefer sequence) with integer
/// weights drawn uniformly from [min_w, max_w].
GeneratedGraph make_random_tree(std::size_t n, std::uint64_t seed, int min_w = 1,
                                int max_w = 1);

/// Random spanning tree plus `extra_edges` additional distinct edges, integer
/// weights uniform in [min_w, max_w]. Always connected.
GeneratedGraph make_random_connected(std::size_t n, std::size_t extra_edges,
                                     std::uint64_t seed, int min_w = 1, int max_w = 1);

}  // namespace srcloc
