#pragma once

#include <atomic>
#include <cstdint>

namespace srcloc {

/// Operation counters used to check the cost claims of the algorithms.
/// Relaxed atomics; reset before a measured call and read afterwards.
struct OpCounters {
  std::atomic<std::uint64_t> distance_lookups{0};       // d(s, o) reads in partitioning
  std::atomic<std::uint64_t> candidate_evaluations{0};  // objective evaluations in greedy loops
  std::atomic<std::uint64_t> node_visits{0};            // per-node work inside an evaluation
  std::atomic<std::uint64_t> pair_paths{0};             // observer-pair path unions (P_L)

  void reset() {
    distance_lookups = 0;
    candidate_evaluations = 0;
    node_visits = 0;
    pair_paths = 0;
  }
};

OpCounters& op_counters();

}  // namespace srcloc
