#include "srcloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "srcloc/parallel.hpp"

namespace srcloc {

namespace {

constexpr double kRealTolerance = 1e-9;

bool is_integral(double w) { return std::floor(w) == w; }

}  // namespace

Graph::Graph(std::size_t node_count, std::vector<Edge> edges,
             std::vector<std::string> labels)
    : n_(node_count), edges_(std::move(edges)), adj_(node_count), labels_(std::move(labels)) {
  if (n_ == 0) throw GraphError("graph has no nodes");
  if (labels_.empty()) {
    labels_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != n_) throw GraphError("label count does not match node count");

  for (std::uint32_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.u >= n_ || edge.v >= n_) throw GraphError("edge endpoint out of range");
    if (edge.u == edge.v) throw GraphError("self-loop on node " + labels_[edge.u]);
    if (!(edge.w > 0.0) || !std::isfinite(edge.w))
      throw GraphError("nonpositive weight on edge " + labels_[edge.u] + " " + labels_[edge.v]);
    if (!is_integral(edge.w)) integer_weights_ = false;
    adj_[edge.u].push_back({edge.v, edge.w, e});
    adj_[edge.v].push_back({edge.u, edge.w, e});
  }
  for (auto& list : adj_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i].node == list[i - 1].node) throw GraphError("parallel edge detected");
  }
  tol_ = integer_weights_ ? 0.0 : kRealTolerance;

  // connectivity
  std::vector<char> seen(n_, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : adj_[u])
      if (!seen[nb.node]) {
        seen[nb.node] = 1;
        ++reached;
        stack.push_back(nb.node);
      }
  }
  if (reached != n_) throw GraphError("graph is disconnected");

  // Distances first, then the canonical next-hop table derived from them.
  std::vector<double> dist(n_ * n_);
  parallel_for(n_, [&](std::size_t s) {
    std::vector<double> w(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) w[e] = edges_[e].w;
    auto row = single_source_distances(*this, static_cast<NodeId>(s), w);
    std::copy(row.begin(), row.end(), dist.begin() + s * n_);
  });
  // Symmetrize exactly; both directions must agree bit-for-bit.
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v) dist[v * n_ + u] = dist[u * n_ + v];
  diameter_ = *std::max_element(dist.begin(), dist.end());

  next_.assign(n_ * n_, 0);
  std::vector<std::uint32_t> directed_hops(n_ * n_, 0);
  parallel_for(n_, [&](std::size_t target) {
    const NodeId v = static_cast<NodeId>(target);
    std::vector<NodeId> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      return dist[a * n_ + v] < dist[b * n_ + v];
    });
    for (NodeId u : order) {
      if (u == v) {
        next_[u * n_ + v] = v;
        continue;
      }
      const double duv = dist[u * n_ + v];
      NodeId chosen = u;
      for (const Neighbor& nb : adj_[u]) {
        if (same_length(nb.w + dist[nb.node * n_ + v], duv) && dist[nb.node * n_ + v] < duv) {
          chosen = nb.node;
          break;
        }
      }
      next_[u * n_ + v] = chosen;
      directed_hops[u * n_ + v] = 1 + directed_hops[chosen * n_ + v];
    }
  });
  std::vector<std::uint32_t> hops(n_ * n_, 0);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v) {
      hops[u * n_ + v] = directed_hops[u * n_ + v];
      hops[v * n_ + u] = directed_hops[u * n_ + v];
    }
  dist_ = std::make_shared<const DistanceMatrix>(n_, std::move(dist), std::move(hops));
}

bool Graph::same_length(double a, double b) const {
  if (tol_ == 0.0) return a == b;
  return std::abs(a - b) <= tol_ * std::max({1.0, std::abs(a), std::abs(b)});
}

NodeId Graph::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw GraphError("unknown node '" + label + "'");
  return static_cast<NodeId>(it - labels_.begin());
}

double Graph::weight(NodeId u, NodeId v) const {
  const auto& list = adj_.at(u);
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Neighbor& nb, NodeId x) { return nb.node < x; });
  if (it == list.end() || it->node != v)
    throw GraphError("nodes " + labels_[u] + " and " + labels_[v] + " are not adjacent");
  return it->w;
}

std::vector<double> single_source_distances(const Graph& g, NodeId source,
                                            std::span<const double> edge_weights) {
  const std::size_t n = g.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (const Neighbor& nb : g.neighbors(u)) {
      const double cand = du + edge_weights[nb.edge];
      if (cand < dist[nb.node]) {
        dist[nb.node] = cand;
        pq.push({cand, nb.node});
      }
    }
  }
  return dist;
}

DistanceMatrix all_pairs_shortest_paths(const Graph& g) { return g.distances(); }

CanonicalPath canonical_shortest_path(const Graph& g, NodeId u, NodeId v) {
  CanonicalPath path;
  path.nodes.push_back(u);
  NodeId cur = u;
  while (cur != v) {
    const NodeId nxt = g.next_hop(cur, v);
    for (const Neighbor& nb : g.neighbors(cur))
      if (nb.node == nxt) {
        path.edges.push_back(nb.edge);
        path.total_weight += nb.w;
        break;
      }
    path.nodes.push_back(nxt);
    cur = nxt;
  }
  path.total_weight = g.d(u, v);
  return path;
}

ShortestPathTree shortest_path_tree(const Graph& g, NodeId root) {
  const std::size_t n = g.node_count();
  ShortestPathTree tree;
  tree.root = root;
  tree.parent.assign(n, root);
  tree.parent_weight.assign(n, 0.0);
  tree.parent_edge.assign(n, 0);
  tree.depth.assign(n, 0.0);

  // Lexicographically minimal shortest paths are prefix-closed, so the
  // canonical path root -> v ends with the tree edge (parent(v), v). Walking
  // the next-hop table marks every node on a path; nodes already settled are
  // skipped so the total work stays O(n * depth) in the worst case only.
  std::vector<char> settled(n, 0);
  settled[root] = 1;
  for (NodeId v = 0; v < n; ++v) {
    if (settled[v]) continue;
    NodeId prev = root;
    NodeId cur = g.next_hop(root, v);
    for (;;) {
      if (!settled[cur]) {
        settled[cur] = 1;
        tree.parent[cur] = prev;
      }
      if (cur == v) break;
      prev = cur;
      cur = g.next_hop(cur, v);
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (v == root) continue;
    for (const Neighbor& nb : g.neighbors(v))
      if (nb.node == tree.parent[v]) {
        tree.parent_weight[v] = nb.w;
        tree.parent_edge[v] = nb.edge;
        break;
      }
    tree.depth[v] = g.d(root, v);
  }
  return tree;
}

LoadedGraph load_edge_list(std::istream& in) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::vector<std::size_t> non_integer;
  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.try_emplace(token, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, w_text, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b >> w_text) || (fields >> extra))
      throw GraphError("line " + std::to_string(line_no) + ": expected 'u v w'");
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(w_text, &used);
      if (used != w_text.size()) throw std::invalid_argument(w_text);
    } catch (const std::exception&) {
      throw GraphError("line " + std::to_string(line_no) + ": bad weight '" + w_text + "'");
    }
    if (!(w > 0.0) || !std::isfinite(w))
      throw GraphError("line " + std::to_string(line_no) + ": nonpositive weight");
    if (a == b) throw GraphError("line " + std::to_string(line_no) + ": self-loop");
    if (!is_integral(w)) non_integer.push_back(line_no);
    edges.push_back({intern(a), intern(b), w});
  }
  if (labels.empty()) throw GraphError("edge list is empty");

  // Report duplicates with a line number before the Graph constructor sees them.
  std::vector<std::pair<std::uint64_t, std::size_t>> keys;
  keys.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto lo = std::min(edges[i].u, edges[i].v), hi = std::max(edges[i].u, edges[i].v);
    keys.push_back({(std::uint64_t{lo} << 32) | hi, i});
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (keys[i].first == keys[i - 1].first)
      throw GraphError("duplicate edge " + labels[edges[keys[i].second].u] + " " +
                       labels[edges[keys[i].second].v]);

  const std::size_t n = labels.size();
  return {Graph(n, std::move(edges), std::move(labels)), std::move(non_integer)};
}

LoadedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path);
  return load_edge_list(in);
}

}  // namespace srcloc
