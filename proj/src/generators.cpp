#include "srcloc/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "srcloc/rng.hpp"

namespace srcloc {

namespace {

bool connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const Edge& e : edges) {
    NodeId a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

void require(bool ok, const char* what) {
  if (!ok) throw GraphError(what);
}

}  // namespace

Graph make_path(std::size_t n, double w) {
  require(n >= 2, "path needs at least 2 nodes");
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return Graph(n, std::move(edges));
}

Graph make_cycle(std::size_t n, double w) {
  require(n >= 3, "cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % n), w});
  return Graph(n, std::move(edges));
}

Graph make_star(std::size_t leaves, double w) {
  require(leaves >= 1, "star needs at least one leaf");
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.push_back({0, i, w});
  return Graph(leaves + 1, std::move(edges));
}

Graph make_cycle_with_leaf(std::size_t n, double w) {
  require(n >= 3, "cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % n), w});
  edges.push_back({0, static_cast<NodeId>(n), w});
  return Graph(n + 1, std::move(edges));
}

Graph make_grid(std::size_t rows, std::size_t cols, double w) {
  require(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid needs at least 2 nodes");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<NodeId>(r * cols + c);
      if (c + 1 < cols) edges.push_back({id, id + 1, w});
      if (r + 1 < rows) edges.push_back({id, static_cast<NodeId>(id + cols), w});
    }
  return Graph(rows * cols, std::move(edges));
}

GeneratedGraph make_random_geometric(std::size_t n, double radius, std::uint64_t seed,
                                     std::size_t max_attempts) {
  require(n >= 2, "random geometric graph needs at least 2 nodes");
  require(radius > 0.0, "radius must be positive");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = seed + attempt;
    Rng rng(s);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = uniform01(rng);
      y[i] = uniform01(rng);
    }
    std::vector<Edge> edges;
    const double r2 = radius * radius;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) {
        const double dx = x[i] - x[j], dy = y[i] - y[j];
        if (dx * dx + dy * dy <= r2) edges.push_back({i, j, 1.0});
      }
    if (connected(n, edges)) return {Graph(n, std::move(edges)), s};
  }
  throw GraphError("no connected random geometric graph within the attempt budget");
}

GeneratedGraph make_barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  require(m >= 1, "m must be at least 1");
  require(m < n, "m must be smaller than n");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node appears once per incident edge
  const std::size_t core = m + 1;
  for (NodeId i = 0; i < core; ++i)
    for (NodeId j = i + 1; j < core; ++j) {
      edges.push_back({i, j, 1.0});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  for (NodeId v = static_cast<NodeId>(core); v < n; ++v) {
    std::set<NodeId> targets;
    while (targets.size() < m) targets.insert(endpoints[uniform_below(rng, endpoints.size())]);
    for (NodeId t : targets) {
      edges.push_back({t, v, 1.0});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return {Graph(n, std::move(edges)), seed};
}

GeneratedGraph make_random_tree(std::size_t n, std::uint64_t seed, int min_w, int max_w) {
  require(n >= 2, "tree needs at least 2 nodes");
  require(min_w >= 1 && max_w >= min_w, "bad weight range");
  Rng rng(seed);
  std::vector<Edge> edges;
  if (n == 2) {
    edges.push_back({0, 1, static_cast<double>(uniform_int(rng, min_w, max_w))});
    return {Graph(n, std::move(edges)), seed};
  }
  std::vector<NodeId> pruefer(n - 2);
  for (auto& p : pruefer) p = static_cast<NodeId>(uniform_below(rng, n));
  std::vector<std::size_t> degree(n, 1);
  for (NodeId p : pruefer) ++degree[p];
  std::set<NodeId> leaves;
  for (NodeId i = 0; i < n; ++i)
    if (degree[i] == 1) leaves.insert(i);
  for (NodeId p : pruefer) {
    const NodeId leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.push_back({leaf, p, 0.0});
    if (--degree[p] == 1) leaves.insert(p);
  }
  const NodeId a = *leaves.begin();
  const NodeId b = *std::next(leaves.begin());
  edges.push_back({a, b, 0.0});
  for (Edge& e : edges) e.w = uniform_int(rng, min_w, max_w);
  return {Graph(n, std::move(edges)), seed};
}

GeneratedGraph make_random_connected(std::size_t n, std::size_t extra_edges,
                                     std::uint64_t seed, int min_w, int max_w) {
  GeneratedGraph tree = make_random_tree(n, seed, min_w, max_w);
  std::vector<Edge> edges(tree.graph.edges().begin(), tree.graph.edges().end());
  std::set<std::pair<NodeId, NodeId>> present;
  for (const Edge& e : edges) present.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  const std::size_t max_edges = n * (n - 1) / 2;
  const std::size_t target = std::min(max_edges, edges.size() + extra_edges);
  Rng rng(mix64(seed ^ 0x5bd1e995ULL));
  while (edges.size() < target) {
    auto a = static_cast<NodeId>(uniform_below(rng, n));
    auto b = static_cast<NodeId>(uniform_below(rng, n));
    if (a == b) continue;
    if (!present.insert({std::min(a, b), std::max(a, b)}).second) continue;
    edges.push_back({a, b, static_cast<double>(uniform_int(rng, min_w, max_w))});
  }
  return {Graph(n, std::move(edges)), seed};
}

}  // namespace srcloc
