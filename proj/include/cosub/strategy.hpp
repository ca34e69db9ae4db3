#pragma once

#include <span>
#include <vector>

#include "cosub/data.hpp"

namespace cosub {

struct Offer {
  int product = 0;  // best offer u, 1-based, != v
  double prob = 0.0;
};

// Per product v, the u maximizing pibar at pair (v, u); ties go to the
// smallest product index.
std::vector<Offer> best_offer(std::span<const double> pibar, int v_count);

// e_v = p_hat_v * best_prob_v.
std::vector<double> performance_indicators(std::span<const double> p_hat,
                                           std::span<const Offer> offers);

struct MultiOffer {
  std::vector<int> products;  // M products, ascending, 1-based
  double joint_prob = 0.0;
};

// Exhaustive search over M-subsets not containing v, maximizing the joint
// co-subscription probability sum_h nu_h prod_m pi_h[(v, u_m)]; the edges are
// conditionally independent given the component, so the mixture of products
// of pair marginals is exact. Ties go to the lexicographically smallest
// subset. M <= 3 keeps the search exhaustive.
MultiOffer multi_offer(std::span<const double> nu_k,
                       std::span<const std::vector<double>> components, int v, int M);

struct StrategyRow {
  int cluster = 0;  // 1-based
  int cluster_size = 0;
  int product = 0;  // v, 1-based
  int best = 0;     // u_kv
  double best_prob = 0.0;
  double indicator = 0.0;
  double stability = 0.0;
};

struct StrategyTable {
  std::vector<StrategyRow> rows;  // cluster-major, product-minor
};

StrategyTable build_strategy_table(std::span<const std::vector<double>> pibar_hat,
                                   std::span<const std::vector<double>> p_hat,
                                   std::span<const int> cluster_sizes,
                                   std::span<const std::vector<double>> stability);

}  // namespace cosub
