#include "srcloc/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "srcloc/counters.hpp"

namespace srcloc {

OpCounters& op_counters() {
  static OpCounters counters;
  return counters;
}

ObserverSet::ObserverSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
    throw std::invalid_argument("observer set contains duplicates");
}

bool ObserverSet::contains(NodeId v) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

void ObserverSet::check_against(const Graph& g) const {
  for (NodeId o : nodes_)
    if (o >= g.node_count()) throw std::invalid_argument("observer outside the graph");
}

EquivalencePartition EquivalencePartition::from_labels(std::span<const std::uint32_t> labels) {
  EquivalencePartition p;
  p.class_of.assign(labels.size(), 0);
  std::vector<std::uint32_t> remap;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const std::uint32_t l = labels[v];
    if (l >= remap.size()) remap.resize(l + 1, UINT32_MAX);
    if (remap[l] == UINT32_MAX) {
      remap[l] = static_cast<std::uint32_t>(p.classes.size());
      p.classes.emplace_back();
    }
    p.class_of[v] = remap[l];
    p.classes[remap[l]].push_back(static_cast<NodeId>(v));
  }
  return p;
}

EquivalencePartition EquivalencePartition::single_class(std::size_t n) {
  std::vector<std::uint32_t> zeros(n, 0);
  return from_labels(zeros);
}

Prior Prior::uniform(std::size_t n) {
  Prior prior;
  prior.p_.assign(n, 1.0 / static_cast<double>(n));
  prior.uniform_ = true;
  return prior;
}

Prior::Prior(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw std::invalid_argument("prior is empty");
  double total = 0.0;
  for (double q : p_) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("prior has a negative entry");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("prior sums to " + std::to_string(total) + ", not 1");
  uniform_ = std::all_of(p_.begin(), p_.end(), [&](double q) { return q == p_.front(); });
}

Prior load_prior(std::istream& in, const Graph& g) {
  std::vector<double> p(g.node_count(), 0.0);
  std::vector<char> seen(g.node_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string node;
    double q = 0.0;
    if (!(fields >> node)) continue;
    if (!(fields >> q)) throw std::invalid_argument("prior line " + std::to_string(line_no) + ": expected 'node probability'");
    const NodeId v = g.find(node);
    if (seen[v]) throw std::invalid_argument("prior line " + std::to_string(line_no) + ": node listed twice");
    seen[v] = 1;
    p[v] = q;
  }
  return Prior(std::move(p));
}

DistanceVector distance_vector(const Graph& g, const ObserverSet& observers, NodeId s,
                               std::size_t ref_index) {
  if (observers.size() < 2) throw std::invalid_argument("distance vector needs at least 2 observers");
  if (ref_index >= observers.size()) throw std::out_of_range("reference index");
  const double base = g.d(s, observers[ref_index]);
  DistanceVector out;
  out.reserve(observers.size() - 1);
  for (std::size_t j = 0; j < observers.size(); ++j)
    if (j != ref_index) out.push_back(g.d(s, observers[j]) - base);
  return out;
}

Refinement refine(const Graph& g, std::span<const std::uint32_t> labels,
                  std::span<const double> values) {
  const std::size_t n = labels.size();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (labels[a] != labels[b]) return labels[a] < labels[b];
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<std::uint32_t> raw(n);
  std::uint32_t current = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const NodeId a = order[i - 1], b = order[i];
      if (labels[a] != labels[b] || !g.same_length(values[a], values[b])) ++current;
    }
    raw[order[i]] = current;
  }
  // Renumber by first appearance in node order.
  Refinement out;
  out.labels.assign(n, 0);
  std::vector<std::uint32_t> remap(n == 0 ? 0 : current + 1, UINT32_MAX);
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (remap[raw[v]] == UINT32_MAX) remap[raw[v]] = next++;
    out.labels[v] = remap[raw[v]];
  }
  out.classes = next;
  return out;
}

EquivalencePartition partition(const Graph& g, const ObserverSet& observers, std::size_t ref_index) {
  if (observers.size() < 2) throw std::invalid_argument("partition needs at least 2 observers");
  if (ref_index >= observers.size()) throw std::out_of_range("reference index");
  observers.check_against(g);
  const std::size_t n = g.node_count();
  const NodeId ref = observers[ref_index];
  std::vector<std::uint32_t> labels(n, 0);
  std::vector<double> values(n);
  for (std::size_t j = 0; j < observers.size(); ++j) {
    if (j == ref_index) continue;
    const NodeId o = observers[j];
    for (NodeId s = 0; s < n; ++s) values[s] = g.d(s, o) - g.d(s, ref);
    labels = refine(g, labels, values).labels;
  }
  op_counters().distance_lookups.fetch_add(n * observers.size(), std::memory_order_relaxed);
  return EquivalencePartition::from_labels(labels);
}

double success_probability(const EquivalencePartition& p, const Prior& prior) {
  const std::size_t n = p.node_count();
  if (prior.size() != n) throw std::invalid_argument("prior size does not match partition");
  if (prior.is_uniform()) return static_cast<double>(p.class_count()) / static_cast<double>(n);
  double total = 0.0;
  for (const auto& cls : p.classes) {
    double mass = 0.0, sq = 0.0;
    for (NodeId v : cls) {
      mass += prior(v);
      sq += prior(v) * prior(v);
    }
    if (mass > 0.0) total += sq / mass;
  }
  return total;
}

double expected_distance(const Graph& g, const EquivalencePartition& p, const Prior& prior,
                         DistanceMode mode) {
  if (prior.size() != p.node_count()) throw std::invalid_argument("prior size does not match partition");
  double total = 0.0;
  for (const auto& cls : p.classes) {
    if (cls.size() < 2) continue;
    double mass = 0.0;
    for (NodeId v : cls) mass += prior(v);
    if (mass <= 0.0) continue;
    double inner = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j) {
        const double dist = mode == DistanceMode::weighted ? g.d(cls[i], cls[j])
                                                           : static_cast<double>(g.hops(cls[i], cls[j]));
        inner += 2.0 * prior(cls[i]) * prior(cls[j]) * dist;
      }
    total += inner / mass;
  }
  return total;
}

WorstCaseMetrics worst_case_metrics(const Graph& g, const EquivalencePartition& p,
                                    const Prior& prior) {
  WorstCaseMetrics m{1.0, 0.0, 0.0};
  for (const auto& cls : p.classes) {
    m.min_success = std::min(m.min_success, 1.0 / static_cast<double>(cls.size()));
    double diameter = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      mass += prior(cls[i]);
      for (std::size_t j = i + 1; j < cls.size(); ++j) diameter = std::max(diameter, g.d(cls[i], cls[j]));
    }
    m.max_distance = std::max(m.max_distance, diameter);
    m.expected_max_distance += mass * diameter;
  }
  return m;
}

double entropy(const EquivalencePartition& p) {
  double h = 0.0;
  for (const auto& cls : p.classes)
    for (std::size_t j = 2; j <= cls.size(); ++j) h += std::log2(static_cast<double>(j));
  return h;
}

bool is_drs(const EquivalencePartition& p) { return p.class_count() == p.node_count(); }

ResolutionGap resolution_gap(const Graph& g, const ObserverSet& observers) {
  const EquivalencePartition p = partition(g, observers);
  if (p.class_count() < 2)
    throw std::domain_error("all nodes share one distance vector; the gap is undefined");
  std::vector<DistanceVector> reps;
  reps.reserve(p.class_count());
  for (const auto& cls : p.classes) reps.push_back(distance_vector(g, observers, cls.front()));
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = a + 1; b < reps.size(); ++b) {
      double gap = 0.0;
      for (std::size_t i = 0; i < reps[a].size(); ++i) gap = std::max(gap, std::abs(reps[a][i] - reps[b][i]));
      delta = std::min(delta, gap);
    }
  std::uint32_t max_hops = 0;
  for (NodeId s = 0; s < g.node_count(); ++s)
    for (NodeId o : observers) max_hops = std::max(max_hops, g.hops(s, o));
  return {delta, max_hops, delta / (2.0 * max_hops)};
}

}  // namespace srcloc
