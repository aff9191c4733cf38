#include "srcloc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "srcloc/counters.hpp"
#include "srcloc/parallel.hpp"

namespace srcloc {

namespace {

void check_greedy_budget(const Graph& g, std::size_t k) {
  if (k < 2) throw std::invalid_argument("budget k must be at least 2");
  if (k > g.node_count()) throw std::invalid_argument("budget k exceeds the node count");
}

void check_benchmark_budget(const Graph& g, std::size_t k) {
  if (k < 1) throw std::invalid_argument("budget k must be at least 1");
  if (k > g.node_count()) throw std::invalid_argument("budget k exceeds the node count");
}

StartSet resolve_starts(const Graph& g, const StartSet& starts) {
  StartSet out = starts;
  if (out.empty()) {
    out.resize(g.node_count());
    std::iota(out.begin(), out.end(), 0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (NodeId v : out)
    if (v >= g.node_count()) throw std::invalid_argument("start vertex outside the graph");
  return out;
}

bool within_length(const Graph& g, double d, double L) { return d <= L || g.same_length(d, L); }

// Relative slack for comparing objective values accumulated in different
// orders; exact integer objectives are unaffected.
bool strictly_less(double a, double b) { return a < b - 1e-12 * std::max(1.0, std::abs(b)); }

struct Trajectory {
  NodeId start = 0;
  std::vector<NodeId> picks;    // excludes the start vertex
  std::vector<double> trace;    // trace[i] = objective with i + 1 observers
};

bool maximizes(PartitionObjective objective) { return objective == PartitionObjective::class_count; }

const char* objective_tag(PartitionObjective objective) {
  switch (objective) {
    case PartitionObjective::class_count: return "lv";
    case PartitionObjective::entropy: return "entropy";
    case PartitionObjective::expected_distance_weighted: return "edist";
    case PartitionObjective::expected_distance_hops: return "edist-hops";
  }
  return "?";
}

class PartitionEvaluator {
 public:
  PartitionEvaluator(const Graph& g, PartitionObjective objective)
      : g_(g), objective_(objective), n_(g.node_count()), log2_factorial_(n_ + 1, 0.0) {
    for (std::size_t m = 2; m <= n_; ++m)
      log2_factorial_[m] = log2_factorial_[m - 1] + std::log2(static_cast<double>(m));
    sizes_.resize(n_);
    histogram_.resize(n_ + 1);
    offsets_.resize(n_ + 1);
    members_.resize(n_);
  }

  double operator()(std::span<const std::uint32_t> labels, std::size_t classes) {
    switch (objective_) {
      case PartitionObjective::class_count:
        return static_cast<double>(classes) / static_cast<double>(n_);
      case PartitionObjective::entropy: {
        std::fill_n(sizes_.begin(), classes, 0);
        for (std::uint32_t l : labels) ++sizes_[l];
        std::fill(histogram_.begin(), histogram_.end(), 0);
        for (std::size_t c = 0; c < classes; ++c) ++histogram_[sizes_[c]];
        double h = 0.0;
        for (std::size_t m = 2; m <= n_; ++m)
          if (histogram_[m]) h += static_cast<double>(histogram_[m]) * log2_factorial_[m];
        return h;
      }
      case PartitionObjective::expected_distance_weighted:
      case PartitionObjective::expected_distance_hops: {
        // Bucket nodes by class, then sum pairwise distances per class.
        std::fill_n(offsets_.begin(), classes + 1, 0);
        for (std::uint32_t l : labels) ++offsets_[l + 1];
        for (std::size_t c = 0; c < classes; ++c) offsets_[c + 1] += offsets_[c];
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.begin() + classes);
        for (NodeId v = 0; v < n_; ++v) members_[fill[labels[v]]++] = v;
        const bool weighted = objective_ == PartitionObjective::expected_distance_weighted;
        double total = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
          const std::size_t lo = offsets_[c], hi = offsets_[c + 1];
          if (hi - lo < 2) continue;
          double pair_sum = 0.0;
          for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = i + 1; j < hi; ++j)
              pair_sum += weighted ? g_.d(members_[i], members_[j])
                                   : static_cast<double>(g_.hops(members_[i], members_[j]));
          total += 2.0 * pair_sum / static_cast<double>(hi - lo);
        }
        return total / static_cast<double>(n_);
      }
    }
    return 0.0;
  }

 private:
  const Graph& g_;
  PartitionObjective objective_;
  std::size_t n_;
  std::vector<double> log2_factorial_;
  std::vector<std::size_t> sizes_, histogram_, offsets_;
  std::vector<NodeId> members_;
};

Trajectory run_partition_greedy(const Graph& g, PartitionObjective objective, NodeId start,
                                std::size_t max_observers) {
  const std::size_t n = g.node_count();
  PartitionEvaluator evaluate(g, objective);
  const bool maximize = maximizes(objective);

  Trajectory t;
  t.start = start;
  std::vector<std::uint32_t> labels(n, 0);
  std::size_t classes = 1;
  std::vector<char> chosen(n, 0);
  chosen[start] = 1;
  t.trace.push_back(evaluate(labels, classes));

  std::vector<double> values(n);
  std::size_t size = 1;
  while (classes != n && size < max_observers) {
    std::optional<NodeId> best;
    double best_value = 0.0;
    Refinement best_refinement;
    for (NodeId z = 0; z < n; ++z) {
      if (chosen[z]) continue;
      for (NodeId s = 0; s < n; ++s) values[s] = g.d(s, z) - g.d(s, start);
      Refinement r = refine(g, labels, values);
      const double value = evaluate(r.labels, r.classes);
      op_counters().candidate_evaluations.fetch_add(1, std::memory_order_relaxed);
      op_counters().node_visits.fetch_add(n, std::memory_order_relaxed);
      const bool better = !best || (maximize ? value > best_value : strictly_less(value, best_value));
      if (better) {
        best = z;
        best_value = value;
        best_refinement = std::move(r);
      }
    }
    chosen[*best] = 1;
    t.picks.push_back(*best);
    labels = std::move(best_refinement.labels);
    classes = best_refinement.classes;
    t.trace.push_back(best_value);
    ++size;
  }
  return t;
}

std::vector<NodeId> path_nodes(const Graph& g, NodeId a, NodeId b) {
  const NodeId from = std::min(a, b), to = std::max(a, b);
  std::vector<NodeId> nodes{from};
  for (NodeId cur = from; cur != to;) {
    cur = g.next_hop(cur, to);
    nodes.push_back(cur);
  }
  return nodes;
}

Trajectory run_hv_greedy(const Graph& g, double L, NodeId start, std::size_t max_observers) {
  const std::size_t n = g.node_count();
  Trajectory t;
  t.start = start;
  std::vector<char> covered(n, 0), chosen(n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t generation = 0;
  std::vector<NodeId> observers{start};
  covered[start] = chosen[start] = 1;
  std::size_t count = 1;
  t.trace.push_back(1.0);

  auto gain_of = [&](NodeId z, std::vector<NodeId>* added) {
    ++generation;
    std::size_t gain = 0;
    auto visit = [&](NodeId v) {
      if (!covered[v] && stamp[v] != generation) {
        stamp[v] = generation;
        ++gain;
        if (added) added->push_back(v);
      }
    };
    visit(z);
    for (NodeId o : observers) {
      op_counters().pair_paths.fetch_add(1, std::memory_order_relaxed);
      if (!within_length(g, g.d(z, o), L)) continue;
      const NodeId from = std::min(z, o), to = std::max(z, o);
      visit(from);
      for (NodeId cur = from; cur != to;) {
        cur = g.next_hop(cur, to);
        visit(cur);
      }
    }
    return gain;
  };

  while (count != n && observers.size() < max_observers) {
    std::optional<NodeId> best;
    std::size_t best_gain = 0;
    for (NodeId z = 0; z < n; ++z) {
      if (chosen[z]) continue;
      const std::size_t gain = gain_of(z, nullptr);
      op_counters().candidate_evaluations.fetch_add(1, std::memory_order_relaxed);
      if (!best || gain > best_gain) {
        best = z;
        best_gain = gain;
      }
    }
    std::vector<NodeId> added;
    gain_of(*best, &added);
    for (NodeId v : added) covered[v] = 1;
    count += added.size();
    chosen[*best] = 1;
    observers.push_back(*best);
    t.picks.push_back(*best);
    t.trace.push_back(static_cast<double>(count));
  }
  return t;
}

// Picks the winning trajectory prefix for one budget. Start vertices are
// scanned ascending; only a strict improvement replaces the incumbent.
PlacementResult best_prefix(const Graph& g, const std::vector<Trajectory>& trajectories, std::size_t k,
                            bool maximize, const std::string& tag) {
  const Trajectory* winner = nullptr;
  std::size_t winner_len = 0;
  for (const Trajectory& t : trajectories) {
    const std::size_t len = std::min(k, t.trace.size());
    const double value = t.trace[len - 1];
    if (!winner) {
      winner = &t;
      winner_len = len;
      continue;
    }
    const double incumbent = winner->trace[winner_len - 1];
    if (maximize ? value > incumbent : strictly_less(value, incumbent)) {
      winner = &t;
      winner_len = len;
    }
  }
  PlacementResult result;
  result.algorithm = tag;
  result.k = k;
  std::vector<NodeId> nodes{winner->start};
  nodes.insert(nodes.end(), winner->picks.begin(), winner->picks.begin() + (winner_len - 1));
  result.observers = ObserverSet(std::move(nodes));
  result.objective_trace.assign(winner->trace.begin(), winner->trace.begin() + winner_len);
  result.start = winner->start;
  result.starts_tried = trajectories.size();
  result.metrics = placement_metrics(g, result.observers);
  return result;
}

}  // namespace

PlacementMetrics placement_metrics(const Graph& g, const ObserverSet& observers,
                                   std::optional<double> length_constraint) {
  const std::size_t n = g.node_count();
  const Prior prior = Prior::uniform(n);
  const EquivalencePartition p =
      observers.size() >= 2 ? partition(g, observers) : EquivalencePartition::single_class(n);
  PlacementMetrics m;
  m.success_probability = success_probability(p, prior);
  m.expected_distance_weighted = expected_distance(g, p, prior, DistanceMode::weighted);
  m.expected_distance_hops = expected_distance(g, p, prior, DistanceMode::hops);
  m.entropy = entropy(p);
  if (length_constraint) m.covered = p_l_nodes(g, observers.nodes(), *length_constraint).size();
  return m;
}

std::vector<PlacementResult> partition_greedy_for_budgets(const Graph& g, PartitionObjective objective,
                                                          std::span<const std::size_t> budgets,
                                                          const StartSet& starts) {
  if (budgets.empty()) return {};
  for (std::size_t k : budgets) check_greedy_budget(g, k);
  const std::size_t k_max = *std::max_element(budgets.begin(), budgets.end());
  const StartSet s = resolve_starts(g, starts);
  std::vector<Trajectory> trajectories(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    trajectories[i] = run_partition_greedy(g, objective, s[i], k_max);
  });
  std::vector<PlacementResult> out;
  out.reserve(budgets.size());
  for (std::size_t k : budgets) out.push_back(best_prefix(g, trajectories, k, maximizes(objective), objective_tag(objective)));
  return out;
}

PlacementResult lv_obs(const Graph& g, std::size_t k, const StartSet& starts) {
  const std::size_t budget[] = {k};
  return partition_greedy_for_budgets(g, PartitionObjective::class_count, budget, starts).front();
}

PlacementResult entropy_greedy_placement(const Graph& g, std::size_t k, const StartSet& starts) {
  const std::size_t budget[] = {k};
  return partition_greedy_for_budgets(g, PartitionObjective::entropy, budget, starts).front();
}

PlacementResult expected_distance_greedy_placement(const Graph& g, std::size_t k, DistanceMode mode,
                                                   const StartSet& starts) {
  const std::size_t budget[] = {k};
  const auto objective = mode == DistanceMode::weighted ? PartitionObjective::expected_distance_weighted
                                                        : PartitionObjective::expected_distance_hops;
  return partition_greedy_for_budgets(g, objective, budget, starts).front();
}

std::vector<NodeId> p_l_nodes(const Graph& g, std::span<const NodeId> observers, double L) {
  std::vector<char> in(g.node_count(), 0);
  for (NodeId o : observers) in.at(o) = 1;
  for (std::size_t i = 0; i < observers.size(); ++i)
    for (std::size_t j = i + 1; j < observers.size(); ++j) {
      if (!within_length(g, g.d(observers[i], observers[j]), L)) continue;
      for (NodeId v : path_nodes(g, observers[i], observers[j])) in[v] = 1;
    }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

PlacementResult hv_obs(const Graph& g, std::size_t k, double L, const StartSet& starts) {
  check_greedy_budget(g, k);
  if (!(L > 0.0)) throw std::invalid_argument("length constraint must be positive");
  const StartSet s = resolve_starts(g, starts);
  std::vector<Trajectory> trajectories(s.size());
  parallel_for(s.size(), [&](std::size_t i) { trajectories[i] = run_hv_greedy(g, L, s[i], k); });
  PlacementResult result = best_prefix(g, trajectories, k, true, "hv");
  result.length_constraint = L;
  result.metrics.covered = static_cast<std::size_t>(result.objective_trace.back());
  return result;
}

LengthSelection select_length_constraint(const Graph& g, std::size_t k, std::span<const double> grid,
                                         const StartSet& starts) {
  if (grid.empty()) throw std::invalid_argument("length grid is empty");
  const double diameter = g.weighted_diameter();
  for (double L : grid)
    if (!(L > 0.0) || !within_length(g, L, diameter))
      throw std::invalid_argument("length grid values must lie in (0, diameter]");

  const PlacementResult reference = lv_obs(g, k, starts);
  LengthSelection sel;
  sel.reference_coverage = p_l_nodes(g, reference.observers.nodes(), diameter).size();
  std::optional<double> best;
  for (double L : grid) {
    const std::size_t c = *hv_obs(g, k, L, starts).metrics.covered;
    sel.coverage.push_back(c);
    if (c <= sel.reference_coverage && (!best || L > *best)) best = L;
  }
  sel.fallback = !best;
  sel.L = best ? *best : *std::min_element(grid.begin(), grid.end());
  return sel;
}

std::vector<double> betweenness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<NodeId> order(n);
  std::vector<double> sigma(n), delta(n);
  for (NodeId s = 0; s < n; ++s) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.d(s, a) < g.d(s, b); });
    auto is_pred = [&](NodeId u, NodeId v, double w) {
      return g.d(s, u) < g.d(s, v) && g.same_length(g.d(s, u) + w, g.d(s, v));
    };
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    sigma[s] = 1.0;
    for (NodeId v : order) {
      if (v == s) continue;
      for (const Neighbor& nb : g.neighbors(v))
        if (is_pred(nb.node, v, nb.w)) sigma[v] += sigma[nb.node];
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId v = *it;
      if (v == s) continue;
      for (const Neighbor& nb : g.neighbors(v))
        if (is_pred(nb.node, v, nb.w)) delta[nb.node] += sigma[nb.node] / sigma[v] * (1.0 + delta[v]);
      bc[v] += delta[v];
    }
  }
  for (double& b : bc) b /= 2.0;  // each unordered pair was counted from both ends
  return bc;
}

PlacementResult betweenness_placement(const Graph& g, std::size_t k) {
  check_benchmark_budget(g, k);
  const std::vector<double> bc = betweenness_centrality(g);
  std::vector<char> taken(g.node_count(), 0);
  PlacementResult result;
  result.algorithm = "bc";
  result.k = k;
  std::vector<NodeId> nodes;
  for (std::size_t step = 0; step < k; ++step) {
    std::optional<NodeId> best;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (taken[v]) continue;
      if (!best || bc[v] > bc[*best] + 1e-12 * std::max(1.0, bc[*best])) best = v;
    }
    taken[*best] = 1;
    nodes.push_back(*best);
    result.objective_trace.push_back(bc[*best]);
  }
  result.observers = ObserverSet(std::move(nodes));
  result.metrics = placement_metrics(g, result.observers);
  return result;
}

PlacementResult coverage_rate_placement(const Graph& g, std::size_t k) {
  check_benchmark_budget(g, k);
  const std::size_t n = g.node_count();
  std::vector<char> covered(n, 0), taken(n, 0);
  std::size_t count = 0;
  PlacementResult result;
  result.algorithm = "coverage";
  result.k = k;
  std::vector<NodeId> nodes;
  for (std::size_t step = 0; step < k; ++step) {
    std::optional<NodeId> best;
    std::size_t best_gain = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (taken[v]) continue;
      std::size_t gain = 0;
      for (const Neighbor& nb : g.neighbors(v)) gain += !covered[nb.node];
      if (!best || gain > best_gain) {
        best = v;
        best_gain = gain;
      }
    }
    taken[*best] = 1;
    for (const Neighbor& nb : g.neighbors(*best)) covered[nb.node] = 1;
    count += best_gain;
    nodes.push_back(*best);
    result.objective_trace.push_back(static_cast<double>(count) / static_cast<double>(n));
  }
  result.observers = ObserverSet(std::move(nodes));
  result.metrics = placement_metrics(g, result.observers);
  return result;
}

PlacementResult k_median_placement(const Graph& g, std::size_t k) {
  check_benchmark_budget(g, k);
  const std::size_t n = g.node_count();
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  PlacementResult result;
  result.algorithm = "kmedian";
  result.k = k;
  std::vector<NodeId> nodes;
  for (std::size_t step = 0; step < k; ++step) {
    std::optional<NodeId> best;
    double best_cost = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (taken[v]) continue;
      double cost = 0.0;
      for (NodeId s = 0; s < n; ++s) cost += std::min(nearest[s], g.d(s, v));
      if (!best || strictly_less(cost, best_cost)) {
        best = v;
        best_cost = cost;
      }
    }
    taken[*best] = 1;
    for (NodeId s = 0; s < n; ++s) nearest[s] = std::min(nearest[s], g.d(s, *best));
    nodes.push_back(*best);
    result.objective_trace.push_back(best_cost);
  }
  result.observers = ObserverSet(std::move(nodes));
  result.metrics = placement_metrics(g, result.observers);
  return result;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

PlacementResult exhaustive_optimal_placement(const Graph& g, std::size_t k, ExhaustiveObjective objective,
                                             ExhaustiveLimits limits) {
  check_benchmark_budget(g, k);
  const std::size_t n = g.node_count();
  if (binomial(n, k) > limits.max_subsets)
    throw std::length_error("C(n, k) exceeds the exhaustive search cap");
  const Prior prior = Prior::uniform(n);
  auto score = [&](const ObserverSet& o) {
    const EquivalencePartition p = o.size() >= 2 ? partition(g, o) : EquivalencePartition::single_class(n);
    return objective == ExhaustiveObjective::success_probability
               ? success_probability(p, prior)
               : expected_distance(g, p, prior, DistanceMode::weighted);
  };
  const bool maximize = objective == ExhaustiveObjective::success_probability;

  std::vector<NodeId> combo(k);
  std::iota(combo.begin(), combo.end(), 0);
  std::optional<ObserverSet> best;
  double best_value = 0.0;
  for (;;) {
    ObserverSet candidate(combo);
    const double value = score(candidate);
    if (!best || (maximize ? value > best_value : strictly_less(value, best_value))) {
      best = candidate;
      best_value = value;
    }
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  PlacementResult result;
  result.algorithm = maximize ? "exhaustive" : "exhaustive-edist";
  result.k = k;
  result.observers = *best;
  result.objective_trace = {best_value};
  result.metrics = placement_metrics(g, result.observers);
  return result;
}

std::size_t min_drs_budget(const Graph& g, DrsMethod method, ExhaustiveLimits limits) {
  const std::size_t n = g.node_count();
  if (n == 1) return 1;
  for (std::size_t k = 2; k <= n; ++k) {
    const PlacementResult r = method == DrsMethod::lv_obs
                                  ? lv_obs(g, k)
                                  : exhaustive_optimal_placement(g, k, ExhaustiveObjective::success_probability, limits);
    if (r.metrics.success_probability == 1.0) return k;
  }
  return n;  // unreachable: the full node set always resolves
}

}  // namespace srcloc
