#include "cosub/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cosub/strategy.hpp"

namespace cosub {

std::vector<int> canonical_partition(std::span<const int> partition) {
  std::vector<int> out(partition.size());
  std::vector<int> relabel;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const int c = partition[i];
    if (c < 0) throw ValidationError("canonical_partition: negative label");
    if (c >= static_cast<int>(relabel.size())) relabel.resize(c + 1, -1);
    if (relabel[c] < 0) {
      int next = 0;
      for (int r : relabel) next = std::max(next, r + 1);
      relabel[c] = next;
    }
    out[i] = relabel[c];
  }
  return out;
}

void PartitionCounter::add(std::span<const int> partition) {
  const auto canon = canonical_partition(partition);
  ++sweeps_;
  for (auto& entry : entries_) {
    if (entry.partition == canon) {
      ++entry.count;
      return;
    }
  }
  entries_.push_back({canon, 1, sweeps_});
}

PartitionEstimate PartitionCounter::map_partition() const {
  if (entries_.empty()) throw ValidationError("map_partition: empty trace");
  const Entry* best = &entries_.front();
  for (const auto& entry : entries_) {
    if (entry.count > best->count ||
        (entry.count == best->count && entry.first_seen < best->first_seen)) {
      best = &entry;
    }
  }
  PartitionEstimate est;
  est.partition = best->partition;
  est.frequency = static_cast<double>(best->count) / sweeps_;
  est.k_hat = 1 + *std::max_element(est.partition.begin(), est.partition.end());
  return est;
}

std::vector<double> cluster_cosub_probs(std::span<const double> nu_k,
                                        std::span<const std::vector<double>> components) {
  if (nu_k.size() != components.size()) {
    throw NumericError("cluster_cosub_probs: dimension mismatch");
  }
  if (components.empty()) throw NumericError("cluster_cosub_probs: no components");
  std::vector<double> pibar(components[0].size(), 0.0);
  for (std::size_t h = 0; h < components.size(); ++h) {
    if (components[h].size() != pibar.size()) {
      throw NumericError("cluster_cosub_probs: ragged components");
    }
    for (std::size_t l = 0; l < pibar.size(); ++l) pibar[l] += nu_k[h] * components[h][l];
  }
  return pibar;
}

namespace {

// Linear interpolation between order statistics (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw NumericError("quantile of empty sample");
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QuantileSummary summarize_matrix(const std::vector<std::vector<double>>& draws_by_entry) {
  QuantileSummary out;
  for (auto column : draws_by_entry) {
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / column.size();
    std::sort(column.begin(), column.end());
    out.mean.push_back(mean);
    out.q25.push_back(quantile_sorted(column, 0.25));
    out.q50.push_back(quantile_sorted(column, 0.50));
    out.q75.push_back(quantile_sorted(column, 0.75));
  }
  return out;
}

}  // namespace

PosteriorSummary summarize_conditional(std::span<const ConditionalSample> samples,
                                       const PartitionEstimate& map) {
  if (samples.empty()) throw ValidationError("summarize_conditional: empty conditional trace");
  const int K = map.k_hat;
  for (const auto& sample : samples) {
    if (static_cast<int>(sample.p.size()) != K) {
      throw ValidationError("summarize_conditional: trace cluster count differs from the MAP partition");
    }
  }
  const int V = static_cast<int>(samples[0].p[0].size());
  const int H = static_cast<int>(samples[0].nu[0].size());
  const int L = static_cast<int>(samples[0].pi[0].size());
  const int S = static_cast<int>(samples.size());

  PosteriorSummary out;
  out.map = map;
  out.cluster_sizes.assign(K, 0);
  for (int c : map.partition) ++out.cluster_sizes[c];

  out.nu_hat.assign(K, std::vector<double>(H, 0.0));
  out.pi_components.assign(H, std::vector<double>(L, 0.0));

  for (int k = 0; k < K; ++k) {
    std::vector<std::vector<double>> p_draws(V, std::vector<double>(S));
    std::vector<std::vector<double>> pibar_draws(L, std::vector<double>(S));
    for (int s = 0; s < S; ++s) {
      for (int v = 0; v < V; ++v) p_draws[v][s] = samples[s].p[k][v];
      const auto pibar = cluster_cosub_probs(samples[s].nu[k], samples[s].pi);
      for (int l = 0; l < L; ++l) pibar_draws[l][s] = pibar[l];
      for (int h = 0; h < H; ++h) out.nu_hat[k][h] += samples[s].nu[k][h] / S;
    }
    out.p_hat.push_back(summarize_matrix(p_draws));
    out.pibar_hat.push_back(summarize_matrix(pibar_draws));
  }
  for (int s = 0; s < S; ++s) {
    for (int h = 0; h < H; ++h) {
      for (int l = 0; l < L; ++l) out.pi_components[h][l] += samples[s].pi[h][l] / S;
    }
  }

  // Stability: agreement of per-sweep best offers with the mean-based ones.
  out.offer_stability.assign(K, std::vector<double>(V, 0.0));
  for (int k = 0; k < K; ++k) {
    const auto mean_offers = best_offer(out.pibar_hat[k].mean, V);
    for (int s = 0; s < S; ++s) {
      const auto pibar = cluster_cosub_probs(samples[s].nu[k], samples[s].pi);
      const auto sweep_offers = best_offer(pibar, V);
      for (int v = 0; v < V; ++v) {
        if (sweep_offers[v].product == mean_offers[v].product) {
          out.offer_stability[k][v] += 1.0 / S;
        }
      }
    }
  }
  return out;
}

namespace {

double row_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) total += std::fabs(a[j] - b[j]);
  return total;
}

// Minimal-cost assignment of sweep rows to reference rows.
std::vector<int> best_assignment(const std::vector<std::vector<double>>& cost) {
  const int K = static_cast<int>(cost.size());
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  if (K <= 8) {
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (int k = 0; k < K; ++k) total += cost[perm[k]][k];
      if (total < best_cost) {
        best_cost = total;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy: repeatedly take the globally cheapest remaining pair.
  std::vector<int> result(K, -1);
  std::vector<char> row_used(K, 0), col_used(K, 0);
  for (int step = 0; step < K; ++step) {
    double best_cost = std::numeric_limits<double>::infinity();
    int best_row = -1, best_col = -1;
    for (int r = 0; r < K; ++r) {
      if (row_used[r]) continue;
      for (int c = 0; c < K; ++c) {
        if (col_used[c]) continue;
        if (cost[r][c] < best_cost) {
          best_cost = cost[r][c];
          best_row = r;
          best_col = c;
        }
      }
    }
    result[best_col] = best_row;
    row_used[best_row] = 1;
    col_used[best_col] = 1;
  }
  std::vector<int> perm_out(K);
  for (int c = 0; c < K; ++c) perm_out[c] = result[c];
  return perm_out;
}

}  // namespace

void relabel_clusters(std::vector<TraceRecord>& trace) {
  if (trace.empty()) return;
  const int K = static_cast<int>(trace.front().p.size());
  for (const auto& rec : trace) {
    if (static_cast<int>(rec.p.size()) != K) {
      throw ValidationError(
          "relabel_clusters: cluster count varies across sweeps; use partition-based summaries");
    }
  }
  std::vector<std::vector<double>> reference = trace.front().p;
  int aligned = 1;
  for (std::size_t s = 1; s < trace.size(); ++s) {
    auto& rec = trace[s];
    std::vector<std::vector<double>> cost(K, std::vector<double>(K));
    for (int r = 0; r < K; ++r) {
      for (int c = 0; c < K; ++c) cost[r][c] = row_l1(rec.p[r], reference[c]);
    }
    // perm[c] = sweep row assigned to reference slot c.
    const auto perm = best_assignment(cost);
    std::vector<int> slot_of(K);
    for (int c = 0; c < K; ++c) slot_of[perm[c]] = c;
    std::vector<std::vector<double>> p(K), nu(K);
    for (int r = 0; r < K; ++r) {
      p[slot_of[r]] = std::move(rec.p[r]);
      nu[slot_of[r]] = std::move(rec.nu[r]);
    }
    rec.p = std::move(p);
    rec.nu = std::move(nu);
    for (int& c : rec.C) c = slot_of[c];
    // Running mean keeps the reference stable as sweeps accumulate.
    for (int k = 0; k < K; ++k) {
      for (std::size_t v = 0; v < reference[k].size(); ++v) {
        reference[k][v] = (reference[k][v] * aligned + rec.p[k][v]) / (aligned + 1);
      }
    }
    ++aligned;
  }
}

}  // namespace cosub
