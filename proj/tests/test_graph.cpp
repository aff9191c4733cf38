#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "srcloc/generators.hpp"
#include "srcloc/graph.hpp"

using namespace srcloc;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in).graph;
}

std::vector<Graph> small_suite() {
  std::vector<Graph> gs;
  gs.push_back(make_cycle(4));
  gs.push_back(make_cycle(7));
  gs.push_back(make_grid(3, 3));
  gs.push_back(make_cycle_with_leaf(5));
  for (std::uint64_t s = 0; s < 6; ++s) gs.push_back(make_random_connected(8, 5, s, 1, 4).graph);
  for (std::uint64_t s = 0; s < 3; ++s) gs.push_back(make_random_tree(9, s, 1, 5).graph);
  gs.push_back(parse("a b 0.5\nb c 1.25\na c 1.75\nc d 0.3\nb d 1.55\n"));
  return gs;
}

}  // namespace

TEST_CASE("load_edge_list builds a path with first-seen ids") {
  const Graph g = parse("0 1 1\n1 2 1");
  CHECK(g.node_count() == 3);
  CHECK(g.edges().size() == 2);
  CHECK(g.label(0) == "0");
  CHECK(g.find("2") == 2);
  CHECK(g.d(0, 2) == 2.0);
}

TEST_CASE("load_edge_list maps arbitrary tokens and skips comments") {
  const Graph g = parse("# header\nx y 2 # trailing\n\ny z 3\n");
  CHECK(g.node_count() == 3);
  CHECK(g.find("x") == 0);
  CHECK(g.find("z") == 2);
  CHECK(g.d(0, 2) == 5.0);
  CHECK(g.integer_weights());
}

TEST_CASE("load_edge_list rejects invalid input") {
  CHECK_THROWS_AS(parse("0 1 4\n1 0 4"), GraphError);
  CHECK_THROWS_AS(parse("0 1 1\n2 3 1"), GraphError);
  CHECK_THROWS_AS(parse("0 1 0"), GraphError);
  CHECK_THROWS_AS(parse("0 1 -2"), GraphError);
  CHECK_THROWS_AS(parse("0 0 1"), GraphError);
  CHECK_THROWS_AS(parse(""), GraphError);
  try {
    parse("0 1 1\n1 2\n");
    FAIL("expected a parse error");
  } catch (const GraphError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_edge_list flags non-integer weights") {
  std::istringstream in("a b 1\nb c 2.5\n");
  const LoadedGraph lg = load_edge_list(in);
  CHECK(lg.non_integer_weight_lines == std::vector<std::size_t>{2});
  CHECK_FALSE(lg.graph.integer_weights());
}

TEST_CASE("Graph constructor enforces invariants") {
  CHECK_THROWS_AS(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 1.0}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 0, 1.0}}), GraphError);
  CHECK_THROWS_AS(Graph(3, {{0, 1, 1.0}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 0.0}}), GraphError);
}

TEST_CASE("distances on small fixed graphs") {
  const Graph p = make_path(3);
  CHECK(p.d(0, 2) == 2.0);
  CHECK(p.hops(0, 2) == 2);
  const Graph c5 = make_cycle(5);
  CHECK(c5.d(0, 2) == 2.0);
  CHECK(c5.d(0, 3) == 2.0);
  const Graph tri(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
  CHECK(tri.d(0, 2) == 2.0);
  CHECK(tri.hops(0, 2) == 2);
  const auto oracle_paths = oracle::shortest_paths(tri, 0, 2);
  REQUIRE(oracle_paths.size() == 1);
  CHECK(oracle::path_weight(tri, oracle_paths[0]) == 2.0);
}

TEST_CASE("distance matrix agrees with the Floyd-Warshall oracle and is a metric") {
  for (const Graph& g : small_suite()) {
    const auto d = oracle::distances(g);
    const std::size_t n = g.node_count();
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v) {
        CHECK(g.d(u, v) == doctest::Approx(d[u][v]).epsilon(1e-12));
        CHECK(g.d(u, v) == g.d(v, u));
        CHECK(g.hops(u, v) == g.hops(v, u));
        for (NodeId x = 0; x < n; ++x) CHECK(g.d(u, v) <= g.d(u, x) + g.d(x, v) + 1e-12);
      }
    const DistanceMatrix fresh = all_pairs_shortest_paths(g);
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v) {
        CHECK(fresh.d(u, v) == g.d(u, v));
        CHECK(fresh.hops(u, v) == g.hops(u, v));
      }
  }
}

TEST_CASE("canonical path is the lexicographically smallest shortest path") {
  const Graph p = make_path(3);
  CHECK(canonical_shortest_path(p, 0, 2).nodes == std::vector<NodeId>{0, 1, 2});
  const Graph c4 = make_cycle(4);
  CHECK(canonical_shortest_path(c4, 0, 2).nodes == std::vector<NodeId>{0, 1, 2});
  const CanonicalPath self = canonical_shortest_path(c4, 3, 3);
  CHECK(self.nodes == std::vector<NodeId>{3});
  CHECK(self.total_weight == 0.0);
  CHECK(self.edges.empty());

  for (const Graph& g : small_suite()) {
    const std::size_t n = g.node_count();
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v) {
        auto paths = oracle::shortest_paths(g, u, v);
        const auto best = *std::min_element(paths.begin(), paths.end());
        const CanonicalPath cp = canonical_shortest_path(g, u, v);
        CHECK(cp.nodes == best);
        CHECK(cp.total_weight == doctest::Approx(g.d(u, v)).epsilon(1e-12));
        CHECK(cp.edges.size() + 1 == cp.nodes.size());
        for (std::size_t i = 0; i < cp.edges.size(); ++i) {
          const Edge& e = g.edges()[cp.edges[i]];
          const bool joins = (e.u == cp.nodes[i] && e.v == cp.nodes[i + 1]) ||
                             (e.v == cp.nodes[i] && e.u == cp.nodes[i + 1]);
          CHECK(joins);
        }
        CHECK(canonical_shortest_path(g, u, v).nodes == cp.nodes);
        const NodeId lo = std::min(u, v), hi = std::max(u, v);
        CHECK(g.hops(u, v) == canonical_shortest_path(g, lo, hi).edges.size());
      }
  }
}

TEST_CASE("shortest path tree follows canonical paths") {
  const Graph star = make_star(3);
  const ShortestPathTree ts = shortest_path_tree(star, 0);
  for (NodeId leaf = 1; leaf <= 3; ++leaf) CHECK(ts.parent[leaf] == 0);
  CHECK(ts.parent[0] == 0);

  const Graph p = make_path(3);
  const ShortestPathTree tp = shortest_path_tree(p, 0);
  CHECK(tp.parent[2] == 1);
  CHECK(tp.parent[1] == 0);

  const Graph c4 = make_cycle(4);
  CHECK(shortest_path_tree(c4, 0).parent[2] == 1);

  for (const Graph& g : small_suite()) {
    for (NodeId r = 0; r < g.node_count(); ++r) {
      const ShortestPathTree t = shortest_path_tree(g, r);
      CHECK(t.root == r);
      for (NodeId v = 0; v < g.node_count(); ++v) {
        CHECK(t.depth[v] == doctest::Approx(g.d(r, v)).epsilon(1e-12));
        double walked = 0.0;
        NodeId x = v;
        while (x != r) {
          CHECK(t.parent_weight[x] == g.weight(x, t.parent[x]));
          walked += t.parent_weight[x];
          x = t.parent[x];
        }
        CHECK(walked == doctest::Approx(g.d(r, v)).epsilon(1e-12));
        // Tree path to v is the reversed canonical path v <- r.
        const CanonicalPath cp = canonical_shortest_path(g, r, v);
        if (cp.nodes.size() >= 2) CHECK(t.parent[v] == cp.nodes[cp.nodes.size() - 2]);
      }
    }
  }
}

TEST_CASE("fixed generators") {
  const Graph c5 = make_cycle(5);
  CHECK(c5.node_count() == 5);
  CHECK(c5.edges().size() == 5);

  const Graph cl = make_cycle_with_leaf(5);
  CHECK(cl.node_count() == 6);
  CHECK(cl.edges().size() == 6);
  std::size_t leaves = 0;
  for (NodeId v = 0; v < 6; ++v) leaves += cl.degree(v) == 1;
  CHECK(leaves == 1);
  CHECK(cl.degree(5) == 1);
  CHECK(cl.neighbors(5)[0].node == 0);

  const Graph s = make_star(3);
  CHECK(s.node_count() == 4);
  CHECK(s.degree(0) == 3);

  const Graph grid = make_grid(3, 4);
  CHECK(grid.node_count() == 12);
  CHECK(grid.edges().size() == 17);
  CHECK(grid.d(0, 11) == 5.0);

  CHECK_THROWS_AS(make_cycle(2), GraphError);
  CHECK_THROWS_AS(make_path(1), GraphError);
}

TEST_CASE("Barabasi-Albert generator") {
  const GeneratedGraph ba = make_barabasi_albert(100, 3, 11);
  CHECK(ba.graph.node_count() == 100);
  CHECK(ba.graph.edges().size() == 294);
  for (NodeId v = 4; v < 100; ++v) CHECK(ba.graph.degree(v) >= 3);
  const GeneratedGraph again = make_barabasi_albert(100, 3, 11);
  REQUIRE(again.graph.edges().size() == ba.graph.edges().size());
  for (std::size_t i = 0; i < ba.graph.edges().size(); ++i) {
    CHECK(again.graph.edges()[i].u == ba.graph.edges()[i].u);
    CHECK(again.graph.edges()[i].v == ba.graph.edges()[i].v);
  }
  CHECK_THROWS_AS(make_barabasi_albert(3, 3, 1), GraphError);
}

TEST_CASE("random geometric generator is connected and deterministic") {
  const GeneratedGraph a = make_random_geometric(100, 0.2, 5);
  const GeneratedGraph b = make_random_geometric(100, 0.2, 5);
  CHECK(a.graph.node_count() == 100);
  CHECK(a.seed_used == b.seed_used);
  CHECK(a.seed_used >= 5);
  REQUIRE(a.graph.edges().size() == b.graph.edges().size());
  for (std::size_t i = 0; i < a.graph.edges().size(); ++i) {
    CHECK(a.graph.edges()[i].u == b.graph.edges()[i].u);
    CHECK(a.graph.edges()[i].v == b.graph.edges()[i].v);
  }
  // A small radius may need regeneration; the result is still connected.
  const GeneratedGraph sparse = make_random_geometric(12, 0.45, 3);
  CHECK(sparse.graph.node_count() == 12);
}

TEST_CASE("random trees and connected graphs") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph t = make_random_tree(12, s, 1, 9).graph;
    CHECK(t.edges().size() == 11);
    for (const Edge& e : t.edges()) {
      CHECK(e.w >= 1.0);
      CHECK(e.w <= 9.0);
    }
    const Graph c = make_random_connected(12, 6, s, 2, 3).graph;
    CHECK(c.edges().size() == 17);
  }
}
