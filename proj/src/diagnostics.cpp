#include "cosub/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cosub/distributions.hpp"
#include "cosub/simulate.hpp"

namespace cosub {

std::optional<double> auc(const EdgeVector& a, std::span<const double> pibar) {
  if (a.bits.size() != pibar.size()) throw NumericError("auc: dimension mismatch");
  const int L = a.edge_slots();
  int positives = 0;
  for (auto bit : a.bits) positives += bit;
  const int negatives = L - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return pibar[i] < pibar[j]; });
  // Average ranks within tied score groups.
  std::vector<double> rank(L);
  int start = 0;
  while (start < L) {
    int stop = start + 1;
    while (stop < L && pibar[order[stop]] == pibar[order[start]]) ++stop;
    const double mean_rank = 0.5 * (start + stop - 1) + 1.0;
    for (int j = start; j < stop; ++j) rank[order[j]] = mean_rank;
    start = stop;
  }
  double rank_sum = 0.0;
  for (int l = 0; l < L; ++l) {
    if (a.bits[l]) rank_sum += rank[l];
  }
  const double u_stat = rank_sum - 0.5 * positives * (positives + 1.0);
  return u_stat / (static_cast<double>(positives) * negatives);
}

std::vector<std::pair<double, double>> roc_points(const EdgeVector& a,
                                                  std::span<const double> pibar) {
  if (a.bits.size() != pibar.size()) throw NumericError("roc_points: dimension mismatch");
  const int L = a.edge_slots();
  int positives = 0;
  for (auto bit : a.bits) positives += bit;
  const int negatives = L - positives;
  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return pibar[i] > pibar[j]; });
  std::vector<std::pair<double, double>> points{{0.0, 0.0}};
  int tp = 0, fp = 0;
  int j = 0;
  while (j < L) {
    const double score = pibar[order[j]];
    while (j < L && pibar[order[j]] == score) {
      if (a.bits[order[j]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    points.emplace_back(negatives > 0 ? static_cast<double>(fp) / negatives : 0.0,
                        positives > 0 ? static_cast<double>(tp) / positives : 0.0);
  }
  return points;
}

double choice_fit_distance(std::span<const long long> counts, std::span<const double> p_hat) {
  if (counts.size() != p_hat.size()) throw NumericError("choice_fit_distance: dimension mismatch");
  long long total = 0;
  for (long long c : counts) total += c;
  if (total < 1) throw ValidationError("choice_fit_distance: agency has no customers");
  double dist = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    dist += std::fabs(static_cast<double>(counts[v]) / total - p_hat[v]);
  }
  return dist / static_cast<double>(counts.size());
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) throw NumericError("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

OccupancyReport occupancy_check(std::span<const OccupancySample> samples,
                                const Hyperparameters& hp) {
  if (samples.empty()) throw ValidationError("occupancy_check: empty trace");
  OccupancyReport report;
  std::vector<double> occupied;
  occupied.reserve(samples.size());
  for (const auto& sample : samples) occupied.push_back(sample.occupied);
  report.median_occupied = median(std::move(occupied));
  report.increase_H = report.median_occupied >= hp.H;
  report.median_lambda_last.resize(hp.H);
  bool all_heavy = true;
  for (int h = 0; h < hp.H; ++h) {
    std::vector<double> lambda;
    lambda.reserve(samples.size());
    for (const auto& sample : samples) lambda.push_back(sample.lambda_last[h]);
    report.median_lambda_last[h] = median(std::move(lambda));
    all_heavy = all_heavy && report.median_lambda_last[h] > 0.05;
  }
  report.increase_R = all_heavy;
  return report;
}

std::vector<double> agency_edge_probs(std::span<const TraceRecord> trace, int agency_index) {
  if (trace.empty()) throw ValidationError("agency_edge_probs: empty trace");
  if (agency_index < 0 || agency_index >= static_cast<int>(trace.front().C.size())) {
    throw ValidationError("agency_edge_probs: agency index out of range");
  }
  std::vector<double> mean(trace.front().Z.size(), 0.0);
  for (const auto& rec : trace) {
    const auto pi = compute_component_probs(rec.Z, rec.Xbar[rec.G[agency_index]]);
    for (std::size_t l = 0; l < mean.size(); ++l) mean[l] += pi.pi[l] / trace.size();
  }
  return mean;
}

FitReport fit_report(const Dataset& data, const PosteriorSummary& summary,
                     std::span<const OccupancySample> occupancy, const Hyperparameters& hp,
                     double auc_flag_threshold) {
  if (static_cast<int>(summary.map.partition.size()) != data.n()) {
    throw ValidationError("fit_report: summary partition does not match the dataset");
  }
  FitReport report;
  report.auc_flag_threshold = auc_flag_threshold;
  for (int i = 0; i < data.n(); ++i) {
    const int k = summary.map.partition[i];
    AgencyFit fit;
    fit.agency_id = data.agencies[i].agency_id;
    fit.auc = auc(data.agencies[i].network, summary.pibar_hat[k].mean);
    fit.epsilon = choice_fit_distance(data.agencies[i].choice_counts, summary.p_hat[k].mean);
    fit.flagged = fit.auc.has_value() && *fit.auc < auc_flag_threshold;
    report.per_agency.push_back(std::move(fit));
  }
  report.occupancy = occupancy_check(occupancy, hp);
  return report;
}

// ---- Geweke successive-conditional harness ----

namespace {

struct JointDraw {
  ModelState state;
  Dataset data;
};

Dataset blank_dataset(int n, int v_count, int customers) {
  Dataset data;
  data.v_count = v_count;
  for (int i = 0; i < n; ++i) {
    AgencyRecord rec;
    rec.agency_id = "g" + std::to_string(i + 1);
    rec.choice_counts.assign(v_count, 0);
    rec.choice_counts[0] = customers;
    rec.network = EdgeVector(v_count);
    data.agencies.push_back(std::move(rec));
  }
  return data;
}

void regenerate_data(const ModelState& state, Dataset& data, int customers, RngStream& rng) {
  const int V = data.v_count;
  for (int i = 0; i < data.n(); ++i) {
    data.agencies[i].choice_counts =
        sample_multinomial(customers, state.p[state.C[i]], rng);
    const auto& pi = state.pi[state.G[i]].pi;
    for (int l = 0; l < pair_count(V); ++l) {
      data.agencies[i].network.bits[l] = rng.uniform() < pi[l] ? 1 : 0;
    }
  }
}

JointDraw forward_draw(const GewekeConfig& cfg, RngStream& rng) {
  const auto& hp = cfg.hp;
  JointDraw draw;
  draw.data = blank_dataset(cfg.n, hp.v_count(), cfg.customers_per_agency);
  ModelState& s = draw.state;
  // Sequential CRP seating produces canonical labels directly.
  std::vector<int> sizes;
  for (int i = 0; i < cfg.n; ++i) {
    std::vector<double> w(sizes.size() + 1);
    for (std::size_t k = 0; k < sizes.size(); ++k) w[k] = sizes[k];
    w[sizes.size()] = hp.alpha_c;
    const int k = sample_categorical(w, rng);
    if (k == static_cast<int>(sizes.size())) {
      sizes.push_back(1);
    } else {
      ++sizes[k];
    }
    s.C.push_back(k);
  }
  const int K = static_cast<int>(sizes.size());
  for (int k = 0; k < K; ++k) {
    s.p.push_back(sample_dirichlet(hp.alpha, rng));
    s.nu.push_back(sample_dirichlet(std::vector<double>(hp.H, 1.0 / hp.H), rng));
  }
  s.Z.resize(hp.edge_slots());
  for (int l = 0; l < hp.edge_slots(); ++l) s.Z[l] = sample_gaussian(hp.mu[l], hp.sigma2[l], rng);
  s.theta.assign(hp.H, std::vector<double>(hp.R));
  s.Xbar.assign(hp.H, Eigen::MatrixXd(hp.v_count(), hp.R));
  for (int h = 0; h < hp.H; ++h) {
    for (int r = 0; r < hp.R; ++r) {
      s.theta[h][r] = sample_gamma(r == 0 ? hp.a1 : hp.a2, 1.0, rng);
    }
    const auto lambda = shrinkage_weights(s.theta[h]);
    for (int r = 0; r < hp.R; ++r) {
      for (int v = 0; v < hp.v_count(); ++v) {
        s.Xbar[h](v, r) = sample_gaussian(0.0, lambda[r], rng);
      }
    }
  }
  s.omega.assign(hp.H, std::vector<double>(hp.edge_slots(), 0.0));
  s.omega_valid.assign(hp.H, 0);
  s.pi.resize(hp.H);
  for (int h = 0; h < hp.H; ++h) s.pi[h] = compute_component_probs(s.Z, s.Xbar[h]);
  s.G.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i) s.G[i] = sample_categorical(s.nu[s.C[i]], rng);
  regenerate_data(s, draw.data, cfg.customers_per_agency, rng);
  return draw;
}

std::vector<double> tracked_statistics(const JointDraw& draw) {
  const ModelState& s = draw.state;
  const Dataset& d = draw.data;
  std::vector<char> used(s.pi.size(), 0);
  for (int g : s.G) used[g] = 1;
  const double occupied = std::count(used.begin(), used.end(), 1);
  const double k_count = s.cluster_count();
  double edges_first = 0.0;
  for (auto bit : d.agencies[0].network.bits) edges_first += bit;
  const double share_first = static_cast<double>(d.agencies[0].choice_counts[0]) /
                             static_cast<double>(d.agencies[0].total_choices());
  return {
      s.Z[0],
      s.Z[0] * s.Z[0],
      s.Z.back(),
      s.p[s.C[0]][0],
      s.pi[s.G[0]].pi[0],
      k_count,
      occupied,
      s.Xbar[0](0, 0) * s.Xbar[0](0, 0),
      edges_first,
      share_first,
  };
}

const char* kStatNames[] = {
    "Z_first",      "Z_first_sq",     "Z_last",          "p_cluster1_product1",
    "pi_agency1_first", "cluster_count", "occupied_components", "Xbar_comp1_sq",
    "edges_agency1",    "choice_share_agency1",
};

struct MomentAccumulator {
  std::vector<std::vector<double>> samples;
  void add(const std::vector<double>& stats) {
    if (samples.empty()) samples.resize(stats.size());
    for (std::size_t j = 0; j < stats.size(); ++j) samples[j].push_back(stats[j]);
  }
};

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

// Standard error via batch means, robust to chain autocorrelation.
double batch_se(const std::vector<double>& x, int batches) {
  const int B = std::min<int>(batches, static_cast<int>(x.size()));
  const std::size_t per = x.size() / B;
  std::vector<double> batch_means;
  for (int b = 0; b < B; ++b) {
    double total = 0.0;
    for (std::size_t j = b * per; j < (b + 1) * per; ++j) total += x[j];
    batch_means.push_back(total / per);
  }
  const double m = mean_of(batch_means);
  double var = 0.0;
  for (double bm : batch_means) var += (bm - m) * (bm - m);
  var /= (B - 1);
  return std::sqrt(var / B);
}

}  // namespace

GewekeConfig geweke_default_config() {
  GewekeConfig cfg;
  cfg.hp.alpha_c = 1.0;
  cfg.hp.alpha.assign(4, 1.0);
  cfg.hp.mu.assign(pair_count(4), 0.0);
  cfg.hp.sigma2.assign(pair_count(4), 1.0);
  cfg.hp.a1 = 2.5;
  cfg.hp.a2 = 3.5;
  cfg.hp.H = 2;
  cfg.hp.R = 1;
  return cfg;
}

std::vector<GewekeStatistic> geweke_harness(const GewekeConfig& cfg) {
  cfg.hp.validate();
  const RngStream root(cfg.seed);
  RngStream forward_rng = root.derived(1);
  MomentAccumulator forward;
  for (int round = 0; round < cfg.rounds; ++round) {
    forward.add(tracked_statistics(forward_draw(cfg, forward_rng)));
  }

  const GibbsSampler sampler(cfg.hp, cfg.hooks);
  RngStream chain_init = root.derived(2);
  JointDraw current = forward_draw(cfg, chain_init);
  const RngStream chain_root = root.derived(3);
  MomentAccumulator chain;
  for (int round = 0; round < cfg.rounds; ++round) {
    sampler.sweep(current.state, current.data, static_cast<std::uint64_t>(round + 1), chain_root);
    RngStream data_rng = chain_root.derived(static_cast<std::uint64_t>(round + 1), 100);
    regenerate_data(current.state, current.data, cfg.customers_per_agency, data_rng);
    chain.add(tracked_statistics(current));
  }

  std::vector<GewekeStatistic> out;
  for (std::size_t j = 0; j < forward.samples.size(); ++j) {
    GewekeStatistic stat;
    stat.name = kStatNames[j];
    stat.forward_mean = mean_of(forward.samples[j]);
    stat.chain_mean = mean_of(chain.samples[j]);
    const double se_f = batch_se(forward.samples[j], 50);
    const double se_c = batch_se(chain.samples[j], 50);
    stat.z = (stat.forward_mean - stat.chain_mean) / std::sqrt(se_f * se_f + se_c * se_c);
    out.push_back(std::move(stat));
  }
  return out;
}

}  // namespace cosub
