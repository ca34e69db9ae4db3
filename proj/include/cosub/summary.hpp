#pragma once

#include <span>
#include <string>
#include <vector>

#include "cosub/gibbs.hpp"

namespace cosub {

struct PartitionEstimate {
  std::vector<int> partition;  // canonical labels, 0-based
  double frequency = 0.0;      // share of sweeps visiting it
  int k_hat = 0;
};

// Streaming tally of canonicalized partitions; ties broken by earliest first
// occurrence in the trace.
class PartitionCounter {
 public:
  void add(std::span<const int> partition);
  PartitionEstimate map_partition() const;
  int sweeps() const { return sweeps_; }

 private:
  struct Entry {
    std::vector<int> partition;
    int count = 0;
    int first_seen = 0;
  };
  std::vector<Entry> entries_;
  int sweeps_ = 0;
};

// Canonical relabeling by first appearance, without touching other fields.
std::vector<int> canonical_partition(std::span<const int> partition);

struct QuantileSummary {
  std::vector<double> mean, q25, q50, q75;
};

struct PosteriorSummary {
  PartitionEstimate map;
  std::vector<int> cluster_sizes;
  std::vector<QuantileSummary> p_hat;      // per cluster, over products
  std::vector<QuantileSummary> pibar_hat;  // per cluster, over product pairs
  // Posterior means kept for the strategy stage.
  std::vector<std::vector<double>> nu_hat;         // K x H
  std::vector<std::vector<double>> pi_components;  // H x L
  // Share of conditional sweeps whose per-sweep best offer agrees with the
  // offer computed from the posterior means.
  std::vector<std::vector<double>> offer_stability;  // K x V
};

// Mixture-averaged co-subscription probabilities pibar_k = sum_h nu_hk pi(h).
std::vector<double> cluster_cosub_probs(std::span<const double> nu_k,
                                        std::span<const std::vector<double>> components);

// Summarize a partition-frozen conditional trace into means and quartiles
// (linear interpolation between order statistics).
PosteriorSummary summarize_conditional(std::span<const ConditionalSample> samples,
                                       const PartitionEstimate& map);

// Align cluster labels across equal-K sweeps by minimizing the total L1
// distance between each sweep's p rows and a running reference; exact
// assignment for K <= 8, greedy beyond. Throws if K varies across sweeps.
void relabel_clusters(std::vector<TraceRecord>& trace);

}  // namespace cosub
