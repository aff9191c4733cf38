#include "srcloc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace srcloc {

namespace {

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> v(g.node_count());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<NodeId> resolve_candidates(const Graph& g, std::span<const NodeId> candidates) {
  std::vector<NodeId> out = candidates.empty() ? all_nodes(g)
                                               : std::vector<NodeId>(candidates.begin(), candidates.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (NodeId v : out)
    if (v >= g.node_count()) throw std::invalid_argument("candidate outside the graph");
  return out;
}

NodeId draw_from_prior(const std::vector<NodeId>& cls, const Prior& prior, Rng& rng) {
  double mass = 0.0;
  for (NodeId v : cls) mass += prior(v);
  const double u = uniform01(rng);
  if (!(mass > 0.0)) return cls[static_cast<std::size_t>(u * static_cast<double>(cls.size()))];
  double target = u * mass, acc = 0.0;
  for (NodeId v : cls) {
    acc += prior(v);
    if (target < acc) return v;
  }
  return cls.back();
}

// Child nodes (edge = child -> parent) on the path from v up to the root.
std::vector<NodeId> root_path(const ShortestPathTree& tree, NodeId v) {
  std::vector<NodeId> path;
  while (v != tree.root) {
    path.push_back(v);
    v = tree.parent[v];
  }
  return path;
}

}  // namespace

std::vector<CandidateScore> EstimateResult::top(std::size_t count) const {
  std::vector<CandidateScore> sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CandidateScore& a, const CandidateScore& b) { return a.score > b.score; });
  if (sorted.size() > count) sorted.resize(count);
  return sorted;
}

EstimateResult zero_variance_estimate(const Graph& g, const Observation& obs, const Prior& prior, Rng& rng) {
  if (obs.observers.size() < 2) throw std::invalid_argument("estimation needs at least 2 observers");
  if (prior.size() != g.node_count()) throw std::invalid_argument("prior size does not match the graph");
  obs.observers.check_against(g);

  double tolerance = 0.0;
  if (!g.integer_weights()) {
    try {
      tolerance = resolution_gap(g, obs.observers).delta / 2.0;
    } catch (const std::domain_error&) {
      tolerance = std::numeric_limits<double>::infinity();
    }
  }

  EstimateResult result;
  result.mode = EstimatorMode::zero_variance;
  const std::size_t n = g.node_count();
  std::vector<double> gap(n);
  std::vector<NodeId> matched;
  for (NodeId s = 0; s < n; ++s) {
    const double base = g.d(s, obs.observers[0]);
    double worst = 0.0;
    for (std::size_t i = 1; i < obs.observers.size(); ++i) {
      const double entry = g.d(s, obs.observers[i]) - base;
      worst = std::max(worst, std::abs(entry - obs.tau[i - 1]));
    }
    gap[s] = worst;
    result.scores.push_back({s, -worst});
    if (worst <= tolerance) matched.push_back(s);
  }
  if (matched.empty()) {
    result.no_exact_match = true;
    const double best = *std::min_element(gap.begin(), gap.end());
    for (NodeId s = 0; s < n; ++s)
      if (g.same_length(gap[s], best) || gap[s] <= best) matched.push_back(s);
  }
  result.ties = matched;
  result.estimate = draw_from_prior(matched, prior, rng);
  return result;
}

CovarianceMatrix covariance_matrix(const Graph& g, const ShortestPathTree& tree, const ObserverSet& observers,
                                   double sigma) {
  if (observers.size() < 2) throw std::invalid_argument("covariance needs at least 2 observers");
  const std::size_t n = g.node_count();
  const std::size_t k = observers.size();

  std::vector<char> on_ref(n, 0);
  for (NodeId v : root_path(tree, observers[0])) on_ref[v] = 1;

  // Tree path o_1 <-> o_j = symmetric difference of the two root paths.
  std::vector<std::vector<NodeId>> paths(k - 1);
  std::vector<char> on_other(n, 0);
  for (std::size_t j = 1; j < k; ++j) {
    const std::vector<NodeId> up = root_path(tree, observers[j]);
    for (NodeId v : up) on_other[v] = 1;
    for (NodeId v : up)
      if (!on_ref[v]) paths[j - 1].push_back(v);
    for (NodeId v : root_path(tree, observers[0]))
      if (!on_other[v]) paths[j - 1].push_back(v);
    for (NodeId v : up) on_other[v] = 0;
  }

  const double var = sigma * sigma;
  CovarianceMatrix cov = CovarianceMatrix::Zero(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k - 1));
  std::vector<std::uint32_t> stamp(n, 0);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (NodeId v : paths[i]) stamp[v] = static_cast<std::uint32_t>(i + 1);
    for (std::size_t j = i; j + 1 < k; ++j) {
      double acc = 0.0;
      for (NodeId v : paths[j])
        if (stamp[v] == i + 1) acc += tree.parent_weight[v] * tree.parent_weight[v];
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = var * acc;
      cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = var * acc;
    }
  }
  return cov;
}

EstimateResult gaussian_ml_estimate(const Graph& g, const Observation& obs, double sigma, Rng& rng,
                                    std::span<const NodeId> candidates) {
  if (obs.observers.size() < 2) throw std::invalid_argument("estimation needs at least 2 observers");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  obs.observers.check_against(g);
  if (sigma == 0.0) return zero_variance_estimate(g, obs, Prior::uniform(g.node_count()), rng);

  const std::vector<NodeId> cands = resolve_candidates(g, candidates);
  const auto dim = static_cast<Eigen::Index>(obs.observers.size() - 1);
  const Eigen::Map<const Eigen::VectorXd> tau(obs.tau.data(), dim);

  EstimateResult result;
  result.mode = EstimatorMode::gaussian_ml;
  double best = -std::numeric_limits<double>::infinity();
  for (NodeId s : cands) {
    const ShortestPathTree tree = shortest_path_tree(g, s);
    Eigen::VectorXd mean(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      mean(i) = tree.depth[obs.observers[static_cast<std::size_t>(i) + 1]] - tree.depth[obs.observers[0]];
    CovarianceMatrix cov = covariance_matrix(g, tree, obs.observers, sigma);
    const double ridge = kCovarianceRidge * cov.diagonal().maxCoeff();
    cov.diagonal().array() += ridge;

    const Eigen::VectorXd r = tau - mean;
    double quad = 0.0, logdet = 0.0;
    Eigen::LLT<CovarianceMatrix> llt(cov);
    if (llt.info() == Eigen::Success) {
      quad = r.dot(llt.solve(r));
      logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    } else {
      Eigen::LDLT<CovarianceMatrix> ldlt(cov);
      quad = r.dot(ldlt.solve(r));
      logdet = ldlt.vectorD().array().abs().log().sum();
    }
    const double score = -0.5 * quad - 0.5 * logdet;
    result.scores.push_back({s, score});
    best = std::max(best, score);
  }
  const double slack = kScoreTieTolerance * std::max(1.0, std::abs(best));
  for (const CandidateScore& c : result.scores)
    if (c.score >= best - slack) result.ties.push_back(c.node);
  result.estimate = result.ties.front();
  return result;
}

}  // namespace srcloc
