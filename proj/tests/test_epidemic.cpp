#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "srcloc/epidemic.hpp"
#include "srcloc/generators.hpp"

using namespace srcloc;

TEST_CASE("transmission model parameters") {
  CHECK_THROWS_AS(TransmissionModel::truncated_gaussian(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(TransmissionModel::uniform_factor(1.0), std::invalid_argument);
  CHECK_THROWS_AS(TransmissionModel::uniform_factor(-0.1), std::invalid_argument);
  CHECK(TransmissionModel::uniform_factor(0.3).relative_sd() == doctest::Approx(0.3 / std::sqrt(3.0)));
  for (const TransmissionModel& m : {TransmissionModel::deterministic(), TransmissionModel::truncated_gaussian(0.25),
                                     TransmissionModel::uniform_factor(0.4)}) {
    const TransmissionModel back = TransmissionModel::parse(m.describe());
    CHECK(back.kind == m.kind);
    CHECK(back.parameter == m.parameter);
  }
  CHECK_THROWS_AS(TransmissionModel::parse("poisson:1"), std::invalid_argument);
}

TEST_CASE("zero-noise delays are exact") {
  Rng rng(1);
  CHECK(sample_delay(TransmissionModel::truncated_gaussian(0.0), 5.0, rng) == 5.0);
  CHECK(sample_delay(TransmissionModel::uniform_factor(0.0), 5.0, rng) == 5.0);
  CHECK(sample_delay(TransmissionModel::deterministic(), 5.0, rng) == 5.0);
}

TEST_CASE("truncated Gaussian delays stay in their support and centre on w") {
  Rng rng(2);
  double sum = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_delay(TransmissionModel::truncated_gaussian(0.5), 2.0, rng);
    REQUIRE(x >= 1.0);
    REQUIRE(x <= 3.0);
    sum += x;
  }
  CHECK(sum / draws == doctest::Approx(2.0).epsilon(0.005));
  for (double sigma : {0.05, 1.0, 5.0, 50.0})
    for (int i = 0; i < 10000; ++i) {
      const double x = sample_delay(TransmissionModel::truncated_gaussian(sigma), 3.0, rng);
      REQUIRE(x >= 1.5);
      REQUIRE(x <= 4.5);
    }
}

TEST_CASE("truncated Gaussian matches its closed-form CDF") {
  Rng rng(3);
  std::vector<double> xs(100000);
  for (double& x : xs) x = sample_delay(TransmissionModel::truncated_gaussian(0.2), 1.0, rng);
  const double ks = oracle::ks_statistic(xs, [](double x) { return oracle::truncated_normal_cdf(x, 1.0, 0.2); });
  CHECK(ks < 0.01);
}

TEST_CASE("uniform factor delays match their moments") {
  Rng rng(4);
  double sum = 0.0, lo = 1e9, hi = -1e9;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_delay(TransmissionModel::uniform_factor(0.1), 10.0, rng);
    REQUIRE(x >= 9.0);
    REQUIRE(x <= 11.0);
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(sum / draws == doctest::Approx(10.0).epsilon(0.001));
  CHECK(lo == doctest::Approx(9.0).epsilon(0.001));
  CHECK(hi == doctest::Approx(11.0).epsilon(0.001));
}

TEST_CASE("deterministic simulation reproduces distances") {
  const Graph g = make_random_connected(15, 10, 3, 1, 6).graph;
  for (NodeId s = 0; s < 15; ++s) {
    const EpidemicTrace t = simulate(g, TransmissionModel::deterministic(), s, 99);
    for (NodeId v = 0; v < 15; ++v) CHECK(t.infection_time[v] == g.d(s, v));
    CHECK(t.infection_time[s] == t.start_time);
  }
}

TEST_CASE("path arrival time lies in the summed support") {
  const Graph g(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const EpidemicTrace t = simulate(g, TransmissionModel::truncated_gaussian(0.4), 0, seed);
    CHECK(t.infection_time[2] >= 2.5);
    CHECK(t.infection_time[2] <= 7.5);
  }
}

TEST_CASE("first passage on C4 equals the best enumerated path") {
  const Graph c4 = make_cycle(4);
  const TransmissionModel m = TransmissionModel::uniform_factor(0.4);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const EpidemicTrace t = simulate(c4, m, 0, seed);
    Rng rng(seed);
    const std::vector<double> x = sample_edge_delays(c4, m, rng);
    auto delay = [&](NodeId a, NodeId b) {
      for (std::size_t e = 0; e < c4.edges().size(); ++e) {
        const Edge& ed = c4.edges()[e];
        if ((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)) return x[e];
      }
      return 1e18;
    };
    CHECK(t.infection_time[2] == std::min(delay(0, 1) + delay(1, 2), delay(0, 3) + delay(3, 2)));
  }
}

TEST_CASE("every infection is explained by a neighbour") {
  const Graph g = make_random_connected(20, 15, 6, 1, 4).graph;
  const TransmissionModel m = TransmissionModel::truncated_gaussian(0.3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const EpidemicTrace t = simulate(g, m, 4, seed);
    Rng rng(seed);
    const std::vector<double> x = sample_edge_delays(g, m, rng);
    for (NodeId v = 0; v < 20; ++v) {
      if (v == 4) continue;
      CHECK(t.infection_time[v] > t.start_time);
      bool explained = false;
      for (const Neighbor& nb : g.neighbors(v))
        if (std::abs(t.infection_time[nb.node] + x[nb.edge] - t.infection_time[v]) < 1e-12) explained = true;
      CHECK(explained);
    }
  }
}

TEST_CASE("simulation is reproducible") {
  const Graph g = make_barabasi_albert(50, 2, 3).graph;
  const TransmissionModel m = TransmissionModel::truncated_gaussian(0.3);
  const EpidemicTrace a = simulate(g, m, 7, 1234), b = simulate(g, m, 7, 1234), c = simulate(g, m, 7, 1235);
  CHECK(a.infection_time == b.infection_time);
  CHECK(a.infection_time != c.infection_time);
  CHECK(a.rng_seed == 1234);
}

TEST_CASE("observe without noise returns the distance vector") {
  const Graph g = make_random_connected(12, 7, 2, 1, 5).graph;
  const ObserverSet o({1, 4, 8, 10});
  for (NodeId s = 0; s < 12; ++s) {
    const EpidemicTrace t = simulate(g, TransmissionModel::deterministic(), s, 0);
    const Observation obs = observe(t, o);
    CHECK(obs.tau == distance_vector(g, o, s));
    CHECK(obs.observers == o);
    CHECK(observe(t, o, 4).tau == obs.tau);
    CHECK(observe(t, o, 9).tau == obs.tau);
  }
}

TEST_CASE("observation limit keeps the earliest observers") {
  const Graph c5 = make_cycle(5);
  const EpidemicTrace t = simulate(c5, TransmissionModel::deterministic(), 4, 0);
  const Observation obs = observe(t, ObserverSet({0, 1, 2, 3}), 2);
  CHECK(obs.observers.nodes() == std::vector<NodeId>{0, 3});
  CHECK(obs.times == std::vector<double>{1.0, 1.0});
  CHECK(obs.tau == std::vector<double>{0.0});
  CHECK_THROWS_AS(observe(t, ObserverSet({0, 1}), 1), std::invalid_argument);
  CHECK_THROWS_AS(observe(t, ObserverSet({0}), std::nullopt), std::invalid_argument);
}

TEST_CASE("observation limit breaks time ties by node id") {
  const Graph s = make_star(4);
  const EpidemicTrace t = simulate(s, TransmissionModel::deterministic(), 0, 0);
  const Observation obs = observe(t, ObserverSet({1, 2, 3, 4}), 3);
  CHECK(obs.observers.nodes() == std::vector<NodeId>{1, 2, 3});
}

TEST_CASE("make_observation sorts and derives tau") {
  const Observation obs = make_observation({5, 2, 9}, {3.0, 1.5, 4.0});
  CHECK(obs.observers.nodes() == std::vector<NodeId>{2, 5, 9});
  CHECK(obs.times == std::vector<double>{1.5, 3.0, 4.0});
  CHECK(obs.tau == std::vector<double>{1.5, 2.5});
  CHECK_THROWS_AS(make_observation({1, 2}, {1.0}), std::invalid_argument);
}

TEST_CASE("trace CSV round-trips") {
  const Graph g = make_random_connected(10, 4, 7, 1, 3).graph;
  const EpidemicTrace t = simulate(g, TransmissionModel::uniform_factor(0.35), 3, 77);
  std::stringstream buf;
  write_trace_csv(buf, g, t);
  const std::string text = buf.str();
  CHECK(text.rfind("# source=3\n# seed=77\n# model=uniform:0.35\nnode,infection_time\n", 0) == 0);
  const EpidemicTrace back = read_trace_csv(buf, g);
  CHECK(back.source == 3);
  CHECK(back.rng_seed == 77);
  CHECK(back.model.kind == TransmissionModel::Kind::uniform_factor);
  CHECK(back.infection_time == t.infection_time);
}

TEST_CASE("end-to-end delay on a long path is close to normal") {
  const TransmissionModel m = TransmissionModel::truncated_gaussian(0.3);
  Rng rng(10);
  std::vector<double> xs(100000);
  double sum = 0.0, sq = 0.0;
  for (double& x : xs) {
    x = 0.0;
    for (int e = 0; e < 30; ++e) x += sample_delay(m, 1.0, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / xs.size(), sd = std::sqrt(sq / xs.size() - mean * mean);
  const double ks = oracle::ks_statistic(xs, [&](double x) { return oracle::normal_cdf((x - mean) / sd); });
  CHECK(ks < 0.02);
}
