#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "srcloc/epidemic.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/resolution.hpp"
#include "srcloc/rng.hpp"

namespace srcloc {

/// (k-1) x (k-1) covariance of the observed delay differences.
using CovarianceMatrix = Eigen::MatrixXd;

enum class EstimatorMode { zero_variance, gaussian_ml };

struct CandidateScore {
  NodeId node;
  double score;
};

struct EstimateResult {
  NodeId estimate = 0;
  std::vector<CandidateScore> scores;  // one per candidate, ascending node id
  EstimatorMode mode = EstimatorMode::zero_variance;
  std::vector<NodeId> ties;            // co-maximal candidates, ascending
  bool no_exact_match = false;         // zero-variance fallback to the nearest vector

  /// Scores sorted best first (ties by node id), truncated to `count`.
  std::vector<CandidateScore> top(std::size_t count) const;
};

/// Matches tau against every candidate's distance vector. Candidates whose
/// vector equals tau (exactly for integer weights, within half the resolution
/// gap otherwise) form the matched class; the estimate is drawn from the
/// prior restricted to that class. Without a match the nearest vector in the
/// infinity norm is used and no_exact_match is set. Score = -||d_s - tau||_inf.
EstimateResult zero_variance_estimate(const Graph& g, const Observation& obs, const Prior& prior, Rng& rng);

/// sigma^2 * sum of w^2 over the (shared) edges of the tree paths
/// o_1 -> o_{i+1}.
CovarianceMatrix covariance_matrix(const Graph& g, const ShortestPathTree& tree, const ObserverSet& observers,
                                   double sigma);

/// Gaussian log-likelihood of tau for every candidate source, with the
/// covariance built on the shortest-path tree rooted at the candidate:
///   -1/2 (tau - d)^T L^-1 (tau - d) - 1/2 log det L,   L = Lambda + ridge I.
/// sigma == 0 delegates to zero_variance_estimate with a uniform prior.
EstimateResult gaussian_ml_estimate(const Graph& g, const Observation& obs, double sigma, Rng& rng,
                                    std::span<const NodeId> candidates = {});

/// Ridge added to every covariance before factorisation: 1e-9 * max diagonal.
inline constexpr double kCovarianceRidge = 1e-9;
/// Scores within this distance of the maximum count as ties.
inline constexpr double kScoreTieTolerance = 1e-9;

}  // namespace srcloc
