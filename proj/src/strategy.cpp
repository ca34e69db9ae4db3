#include "cosub/strategy.hpp"

#include <algorithm>

namespace cosub {

std::vector<Offer> best_offer(std::span<const double> pibar, int v_count) {
  if (v_count < 2) throw ValidationError("best_offer: need at least two products");
  if (static_cast<int>(pibar.size()) != pair_count(v_count)) {
    throw ValidationError("best_offer: pibar length does not match V");
  }
  std::vector<Offer> offers(v_count);
  for (int v = 1; v <= v_count; ++v) {
    Offer best{0, -1.0};
    for (int u = 1; u <= v_count; ++u) {
      if (u == v) continue;
      const double prob = pibar[u < v ? pair_index(v, u, v_count) : pair_index(u, v, v_count)];
      if (prob > best.prob) best = {u, prob};
    }
    offers[v - 1] = best;
  }
  return offers;
}

std::vector<double> performance_indicators(std::span<const double> p_hat,
                                           std::span<const Offer> offers) {
  if (p_hat.size() != offers.size()) {
    throw ValidationError("performance_indicators: dimension mismatch");
  }
  std::vector<double> e(p_hat.size());
  for (std::size_t v = 0; v < p_hat.size(); ++v) e[v] = p_hat[v] * offers[v].prob;
  return e;
}

MultiOffer multi_offer(std::span<const double> nu_k,
                       std::span<const std::vector<double>> components, int v, int M) {
  if (components.empty()) throw ValidationError("multi_offer: no components");
  const int L = static_cast<int>(components[0].size());
  // L = V(V-1)/2 determines V.
  int v_count = 2;
  while (pair_count(v_count) < L) ++v_count;
  if (pair_count(v_count) != L) throw ValidationError("multi_offer: bad component length");
  if (v < 1 || v > v_count) throw ValidationError("multi_offer: product index out of range");
  if (M < 1 || M > v_count - 1) {
    throw ValidationError("multi_offer: M must satisfy 1 <= M <= V-1");
  }
  if (M > 3) {
    throw ValidationError("multi_offer: M > 3 exceeds the exhaustive-search bound");
  }
  std::vector<int> candidates;
  for (int u = 1; u <= v_count; ++u) {
    if (u != v) candidates.push_back(u);
  }
  auto joint_prob = [&](const std::vector<int>& subset) {
    double total = 0.0;
    for (std::size_t h = 0; h < components.size(); ++h) {
      double prod = nu_k[h];
      for (int u : subset) {
        prod *= components[h][u < v ? pair_index(v, u, v_count) : pair_index(u, v, v_count)];
      }
      total += prod;
    }
    return total;
  };
  MultiOffer best;
  best.joint_prob = -1.0;
  std::vector<int> pick(M);
  // Lexicographic enumeration of ascending M-subsets of the candidates.
  std::vector<int> idx(M);
  for (int m = 0; m < M; ++m) idx[m] = m;
  const int n_cand = static_cast<int>(candidates.size());
  for (;;) {
    for (int m = 0; m < M; ++m) pick[m] = candidates[idx[m]];
    const double prob = joint_prob(pick);
    if (prob > best.joint_prob) best = {pick, prob};
    int m = M - 1;
    while (m >= 0 && idx[m] == n_cand - M + m) --m;
    if (m < 0) break;
    ++idx[m];
    for (int j = m + 1; j < M; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

StrategyTable build_strategy_table(std::span<const std::vector<double>> pibar_hat,
                                   std::span<const std::vector<double>> p_hat,
                                   std::span<const int> cluster_sizes,
                                   std::span<const std::vector<double>> stability) {
  const int K = static_cast<int>(pibar_hat.size());
  if (static_cast<int>(p_hat.size()) != K || static_cast<int>(cluster_sizes.size()) != K) {
    throw ValidationError("build_strategy_table: dimension mismatch");
  }
  StrategyTable table;
  for (int k = 0; k < K; ++k) {
    const int V = static_cast<int>(p_hat[k].size());
    const auto offers = best_offer(pibar_hat[k], V);
    const auto e = performance_indicators(p_hat[k], offers);
    for (int v = 0; v < V; ++v) {
      StrategyRow row;
      row.cluster = k + 1;
      row.cluster_size = cluster_sizes[k];
      row.product = v + 1;
      row.best = offers[v].product;
      row.best_prob = offers[v].prob;
      row.indicator = e[v];
      row.stability = stability.empty() ? 1.0 : stability[k][v];
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace cosub
