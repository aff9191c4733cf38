#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "srcloc/counters.hpp"
#include "srcloc/generators.hpp"
#include "srcloc/resolution.hpp"
#include "srcloc/rng.hpp"

using namespace srcloc;

namespace {

using Classes = std::vector<std::vector<NodeId>>;

ObserverSet random_observers(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + uniform_below(rng, n - i)]);
  all.resize(k);
  return ObserverSet(all);
}

}  // namespace

TEST_CASE("ObserverSet sorts and rejects duplicates") {
  const ObserverSet o({4, 1, 3});
  CHECK(o.nodes() == std::vector<NodeId>{1, 3, 4});
  CHECK(o.reference() == 1);
  CHECK(o.contains(3));
  CHECK_FALSE(o.contains(2));
  CHECK_THROWS_AS(ObserverSet({1, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(ObserverSet({0, 9}).check_against(make_path(3)), std::invalid_argument);
}

TEST_CASE("distance_vector on a path") {
  const Graph g = make_path(3);
  const ObserverSet o({0, 2});
  CHECK(distance_vector(g, o, 1) == DistanceVector{0.0});
  CHECK(distance_vector(g, o, 0) == DistanceVector{2.0});
  CHECK(distance_vector(g, o, 2) == DistanceVector{-2.0});
  CHECK_THROWS_AS(distance_vector(g, ObserverSet({1}), 0), std::invalid_argument);
}

TEST_CASE("distance_vector with the source as reference equals the distances") {
  const Graph g = make_random_connected(10, 6, 3, 1, 5).graph;
  for (NodeId s = 0; s < 10; ++s)
    for (NodeId x = 0; x < 10; ++x) {
      if (x == s) continue;
      const ObserverSet o({s, x});
      const std::size_t ref = o[0] == s ? 0 : 1;
      CHECK(distance_vector(g, o, s, ref)[0] == g.d(s, x));
    }
}

TEST_CASE("distance vector entries are bounded by observer distances") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Graph g = make_random_connected(12, 8, static_cast<std::uint64_t>(t), 1, 6).graph;
    const ObserverSet o = random_observers(12, 4, rng);
    for (NodeId s = 0; s < 12; ++s) {
      const DistanceVector dv = distance_vector(g, o, s);
      for (std::size_t i = 0; i < dv.size(); ++i) CHECK(std::abs(dv[i]) <= g.d(o[0], o[i + 1]));
    }
  }
}

TEST_CASE("partition examples") {
  const Graph star = make_star(3);
  const EquivalencePartition ps = partition(star, ObserverSet({1, 2}));
  CHECK(ps.classes == Classes{{0, 3}, {1}, {2}});
  CHECK(ps.class_count() == 3);
  CHECK(ps.class_of[0] == ps.class_of[3]);

  const Graph c5 = make_cycle(5);
  CHECK(partition(c5, ObserverSet({0, 2})).class_count() == 5);
  CHECK(partition(c5, ObserverSet({0, 1})).classes == Classes{{0, 4}, {1, 2}, {3}});

  const Graph g = make_random_connected(9, 4, 8, 1, 3).graph;
  CHECK(is_drs(partition(g, ObserverSet({0, 1, 2, 3, 4, 5, 6, 7, 8}))));
}

TEST_CASE("partition matches the pairwise oracle") {
  Rng rng(17);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 5 + uniform_below(rng, 12);
    const Graph g = t % 3 == 0   ? make_random_tree(n, rng(), 1, 4).graph
                    : t % 3 == 1 ? make_random_connected(n, n / 2, rng(), 1, 3).graph
                                 : make_random_connected(n, n, rng(), 1, 1).graph;
    const std::size_t k = 2 + uniform_below(rng, std::min<std::size_t>(4, n - 1));
    const ObserverSet o = random_observers(n, k, rng);
    CHECK(partition(g, o).classes == oracle::classes(g, o.nodes()));
  }
}

TEST_CASE("partition on real weights uses the length tolerance") {
  // d(2,0) = 0.1 + 0.2 and d(3,0) = 0.3 differ in the last bit only.
  const Graph g(5, {{0, 1, 0.1}, {1, 2, 0.2}, {0, 3, 0.3}, {2, 4, 1.0}, {3, 4, 1.0}});
  REQUIRE(g.d(2, 0) != g.d(3, 0));
  const EquivalencePartition p = partition(g, ObserverSet({0, 4}));
  CHECK(p.class_of[2] == p.class_of[3]);
  CHECK(p.classes == oracle::classes(g, {0, 4}));
}

TEST_CASE("partition is invariant under the choice of reference") {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + uniform_below(rng, 20);
    const Graph g = make_random_connected(n, uniform_below(rng, n), rng(), 1, 5).graph;
    const ObserverSet o = random_observers(n, 2 + uniform_below(rng, std::min<std::size_t>(5, n - 1)), rng);
    const EquivalencePartition base = partition(g, o);
    for (std::size_t r = 1; r < o.size(); ++r) CHECK(partition(g, o, r) == base);
  }
}

TEST_CASE("success probability examples") {
  const Graph c5 = make_cycle(5);
  const Prior u5 = Prior::uniform(5);
  CHECK(success_probability(partition(c5, ObserverSet({0, 2})), u5) == 1.0);
  CHECK(success_probability(partition(c5, ObserverSet({0, 1})), u5) == doctest::Approx(0.6));
  const Graph star = make_star(3);
  CHECK(success_probability(partition(star, ObserverSet({1, 2})), Prior::uniform(4)) == 0.75);
}

TEST_CASE("success probability with a general prior follows the class formula") {
  const Graph c5 = make_cycle(5);
  const EquivalencePartition p = partition(c5, ObserverSet({0, 1}));  // {0,4},{1,2},{3}
  const Prior q({0.1, 0.2, 0.3, 0.15, 0.25});
  const double expected = (0.01 + 0.0625) / 0.35 + (0.04 + 0.09) / 0.5 + 0.15;
  CHECK(success_probability(p, q) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_FALSE(q.is_uniform());
}

TEST_CASE("expected distance examples") {
  const Graph c5 = make_cycle(5);
  const EquivalencePartition p = partition(c5, ObserverSet({0, 1}));
  CHECK(expected_distance(c5, p, Prior::uniform(5), DistanceMode::hops) == doctest::Approx(0.4));
  CHECK(expected_distance(c5, partition(c5, ObserverSet({0, 2})), Prior::uniform(5), DistanceMode::weighted) == 0.0);
  const Graph c3 = make_cycle(3);
  CHECK(expected_distance(c3, EquivalencePartition::single_class(3), Prior::uniform(3), DistanceMode::weighted) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("expected distance matches a direct double sum") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Graph g = make_random_connected(10, 5, rng(), 1, 7).graph;
    const ObserverSet o = random_observers(10, 2, rng);
    const EquivalencePartition p = partition(g, o);
    std::vector<double> q(10);
    double total = 0.0;
    for (double& x : q) total += (x = 0.05 + uniform01(rng));
    for (double& x : q) x /= total;
    double sum_check = 0.0;
    for (double x : q) sum_check += x;
    q[0] += 1.0 - sum_check;
    const Prior prior(q);
    for (DistanceMode mode : {DistanceMode::weighted, DistanceMode::hops}) {
      double brute = 0.0;
      for (NodeId s = 0; s < 10; ++s) {
        double mass = 0.0;
        for (NodeId u : p.classes[p.class_of[s]]) mass += q[u];
        for (NodeId u : p.classes[p.class_of[s]]) {
          const double dist = mode == DistanceMode::weighted ? g.d(s, u) : g.hops(s, u);
          brute += q[s] * q[u] / mass * dist;
        }
      }
      CHECK(expected_distance(g, p, prior, mode) == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("worst-case metrics") {
  const Graph c5 = make_cycle(5);
  const WorstCaseMetrics all = worst_case_metrics(c5, partition(c5, ObserverSet({0, 2})), Prior::uniform(5));
  CHECK(all.min_success == 1.0);
  CHECK(all.max_distance == 0.0);
  CHECK(all.expected_max_distance == 0.0);
  const WorstCaseMetrics m = worst_case_metrics(c5, partition(c5, ObserverSet({0, 1})), Prior::uniform(5));
  CHECK(m.min_success == 0.5);
  CHECK(m.max_distance == 1.0);
  CHECK(m.expected_max_distance == doctest::Approx(0.8));
}

TEST_CASE("entropy") {
  CHECK(entropy(EquivalencePartition::from_labels(std::vector<std::uint32_t>{0, 1, 2, 3})) == 0.0);
  CHECK(entropy(EquivalencePartition::from_labels(std::vector<std::uint32_t>{0, 0, 1, 1, 2})) ==
        doctest::Approx(2.0));
  CHECK(entropy(EquivalencePartition::single_class(4)) == doctest::Approx(std::log2(24.0)));
}

TEST_CASE("is_drs") {
  CHECK(is_drs(partition(make_cycle(5), ObserverSet({0, 2}))));
  CHECK_FALSE(is_drs(partition(make_star(3), ObserverSet({1, 2}))));
  CHECK(is_drs(partition(make_star(3), ObserverSet({0, 1, 2, 3}))));
}

TEST_CASE("entropy zero, DRS and unit success probability coincide") {
  Rng rng(31);
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 4 + uniform_below(rng, 10);
    const Graph g = make_random_connected(n, uniform_below(rng, n), rng(), 1, 3).graph;
    const ObserverSet o = random_observers(n, 2 + uniform_below(rng, n - 1), rng);
    const EquivalencePartition p = partition(g, o);
    const bool drs = is_drs(p);
    CHECK(drs == (entropy(p) == 0.0));
    CHECK(drs == (success_probability(p, Prior::uniform(n)) == 1.0));
  }
}

TEST_CASE("adding observers refines the partition") {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 6 + uniform_below(rng, 14);
    const Graph g = make_random_connected(n, uniform_below(rng, n), rng(), 1, 4).graph;
    const ObserverSet big = random_observers(n, 4, rng);
    const ObserverSet small({big[0], big[2]});
    const EquivalencePartition a = partition(g, small), b = partition(g, big);
    CHECK(b.class_count() >= a.class_count());
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v)
        if (b.class_of[u] == b.class_of[v]) CHECK(a.class_of[u] == a.class_of[v]);
    CHECK(success_probability(b, Prior::uniform(n)) >= success_probability(a, Prior::uniform(n)));
  }
}

TEST_CASE("uniform success probability is exactly q/n") {
  const Graph g = make_random_connected(13, 9, 2, 1, 3).graph;
  const EquivalencePartition p = partition(g, ObserverSet({1, 5, 9}));
  CHECK(success_probability(p, Prior::uniform(13)) == static_cast<double>(p.class_count()) / 13.0);
}

TEST_CASE("resolution gap examples") {
  const ResolutionGap c5 = resolution_gap(make_cycle(5), ObserverSet({0, 2}));
  CHECK(c5.delta == 1.0);
  CHECK(c5.max_hops == 2);
  CHECK(c5.epsilon0_lower_bound == 0.25);
  const ResolutionGap path = resolution_gap(make_path(3), ObserverSet({0, 2}));
  CHECK(path.delta == 2.0);
  CHECK(path.max_hops == 2);
  CHECK(path.epsilon0_lower_bound == 0.5);
  // Integer-weighted trees separate distinct vectors by at least 2.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Graph t = make_random_tree(10, s, 1, 4).graph;
    const ResolutionGap gap = resolution_gap(t, ObserverSet({0, 4, 7}));
    CHECK(gap.delta >= 2.0);
    CHECK(gap.epsilon0_lower_bound >= 1.0 / gap.max_hops);
  }
}

TEST_CASE("resolution gap needs two distinct distance vectors") {
  // Two distinct observers always separate themselves, so only a lone observer leaves one class,
  // and that is rejected before any gap is computed.
  const Graph g = make_star(2);
  CHECK_THROWS_AS(resolution_gap(g, ObserverSet({1})), std::invalid_argument);
}

TEST_CASE("Prior validation and file loading") {
  CHECK_THROWS_AS(Prior({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(Prior({1.5, -0.5}), std::invalid_argument);
  CHECK(Prior::uniform(4)(2) == 0.25);
  CHECK(Prior::uniform(4).is_uniform());
  const Graph g = make_path(3);
  std::istringstream in("# prior\n0 0.25\n2 0.75\n");
  const Prior p = load_prior(in, g);
  CHECK(p(0) == 0.25);
  CHECK(p(1) == 0.0);
  CHECK(p(2) == 0.75);
  std::istringstream bad("0 0.5\n");
  CHECK_THROWS_AS(load_prior(bad, g), std::invalid_argument);
  std::istringstream twice("0 0.5\n0 0.5\n");
  CHECK_THROWS_AS(load_prior(twice, g), std::invalid_argument);
}

TEST_CASE("partition reads each distance a bounded number of times") {
  const Graph g = make_random_connected(60, 40, 9, 1, 3).graph;
  const ObserverSet o({0, 7, 19, 33, 58});
  op_counters().reset();
  partition(g, o);
  CHECK(op_counters().distance_lookups.load() <= 60 * 5);
}
