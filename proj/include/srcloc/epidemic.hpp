#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "srcloc/graph.hpp"
#include "srcloc/resolution.hpp"
#include "srcloc/rng.hpp"

namespace srcloc {

/// Per-edge delay law. Every variant has mean w_uv.
///  - deterministic:       X = w
///  - truncated_gaussian:  N(w, (sigma w)^2) conditioned on [w/2, 3w/2]
///  - uniform_factor:      Unif[(1 - eps) w, (1 + eps) w]
struct TransmissionModel {
  enum class Kind { deterministic, truncated_gaussian, uniform_factor };

  Kind kind = Kind::deterministic;
  double parameter = 0.0;  // sigma or epsilon

  static TransmissionModel deterministic() { return {}; }
  static TransmissionModel truncated_gaussian(double sigma);
  static TransmissionModel uniform_factor(double epsilon);

  /// Relative standard deviation of the untruncated law; eps / sqrt(3) for
  /// the uniform model.
  double relative_sd() const;
  std::string describe() const;
  static TransmissionModel parse(const std::string& text);  // inverse of describe()
};

double sample_delay(const TransmissionModel& model, double w, Rng& rng);

/// One delay per undirected edge, indexed like Graph::edges().
std::vector<double> sample_edge_delays(const Graph& g, const TransmissionModel& model, Rng& rng);

struct EpidemicTrace {
  NodeId source = 0;
  double start_time = 0.0;
  std::vector<double> infection_time;
  std::uint64_t rng_seed = 0;
  TransmissionModel model;
};

/// SI first-passage simulation: sample every edge delay once, then infection
/// times are shortest-path distances from the source over the sampled delays.
EpidemicTrace simulate(const Graph& g, const TransmissionModel& model, NodeId source,
                       std::uint64_t seed);

struct Observation {
  ObserverSet observers;
  std::vector<double> times;  // aligned with observers
  std::vector<double> tau;    // times[i + 1] - times[0]
};

/// Builds an observation from raw observer times (any order).
Observation make_observation(const std::vector<NodeId>& observers, const std::vector<double>& times);

/// Reads the observer infection times off a trace. With a limit m, only the
/// m earliest observers are kept (ties by node id) and tau is recomputed
/// against the earliest-id survivor.
Observation observe(const EpidemicTrace& trace, const ObserverSet& observers,
                    std::optional<std::size_t> limit = std::nullopt);

/// CSV `node,infection_time` preceded by `# source=`, `# seed=`, `# model=`.
void write_trace_csv(std::ostream& out, const Graph& g, const EpidemicTrace& trace);
EpidemicTrace read_trace_csv(std::istream& in, const Graph& g);

}  // namespace srcloc
