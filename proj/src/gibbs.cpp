#include "cosub/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cosub/distributions.hpp"

namespace cosub {

namespace {

// Substream step keys, one per algorithm step.
enum StepKey : std::uint64_t {
  kInit = 0,
  kChoice = 1,
  kAllocate = 2,
  kMixing = 3,
  kPolyaGamma = 4,
  kSimilarity = 5,
  kCoords = 6,
  kShrinkage = 7,
  kReseat = 9,
};

std::vector<int> edge_list(const EdgeVector& a) {
  std::vector<int> edges;
  for (int l = 0; l < a.edge_slots(); ++l) {
    if (a.bits[l]) edges.push_back(l);
  }
  return edges;
}

}  // namespace

void ChainConfig::validate() const {
  if (iterations < 1) throw ValidationError("chain config: iterations must be positive");
  if (burnin < 0 || burnin >= iterations) {
    throw ValidationError("chain config: burnin must satisfy 0 <= burnin < iterations");
  }
  if (thin < 1) throw ValidationError("chain config: thin must be at least 1");
}

double marginal_choices_new_cluster(std::span<const long long> counts,
                                    std::span<const double> alpha) {
  if (counts.size() != alpha.size()) {
    throw NumericError("marginal_choices_new_cluster: dimension mismatch");
  }
  double alpha_sum = 0.0;
  double count_sum = 0.0;
  double value = 0.0;
  for (std::size_t v = 0; v < alpha.size(); ++v) {
    value += std::lgamma(alpha[v] + static_cast<double>(counts[v])) - std::lgamma(alpha[v]);
    alpha_sum += alpha[v];
    count_sum += static_cast<double>(counts[v]);
  }
  return value + std::lgamma(alpha_sum) - std::lgamma(alpha_sum + count_sum);
}

double marginal_component_new_cluster(int H) {
  if (H < 1) throw NumericError("marginal_component_new_cluster: H must be at least 1");
  // The symmetric Dirichlet(1/H) marginal of a single indicator is uniform.
  return -std::log(static_cast<double>(H));
}

GibbsSampler::GibbsSampler(const Hyperparameters& hp, TestHooks hooks)
    : hp_(hp), hooks_(hooks) {
  hp_.validate();
}

ModelState GibbsSampler::init_state(const Dataset& data, RngStream& rng) const {
  const int n = data.n();
  const int V = hp_.v_count();
  const int L = hp_.edge_slots();
  ModelState s;
  s.C.assign(n, 0);
  s.G.resize(n);
  for (int i = 0; i < n; ++i) {
    s.G[i] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hp_.H));
  }
  s.p.push_back(sample_dirichlet(hp_.alpha, rng));
  s.nu.push_back(sample_dirichlet(std::vector<double>(hp_.H, 1.0 / hp_.H), rng));
  s.Z.resize(L);
  for (int l = 0; l < L; ++l) s.Z[l] = sample_gaussian(hp_.mu[l], hp_.sigma2[l], rng);
  s.theta.assign(hp_.H, std::vector<double>(hp_.R));
  s.Xbar.assign(hp_.H, Eigen::MatrixXd(V, hp_.R));
  for (int h = 0; h < hp_.H; ++h) {
    for (int r = 0; r < hp_.R; ++r) {
      s.theta[h][r] = sample_gamma(r == 0 ? hp_.a1 : hp_.a2, 1.0, rng);
    }
    const auto lambda = shrinkage_weights(s.theta[h]);
    for (int r = 0; r < hp_.R; ++r) {
      for (int v = 0; v < V; ++v) s.Xbar[h](v, r) = sample_gaussian(0.0, lambda[r], rng);
    }
  }
  s.omega.assign(hp_.H, std::vector<double>(L, 0.0));
  s.omega_valid.assign(hp_.H, 0);
  refresh_edge_probs(s);
  return s;
}

GibbsSampler::ComponentAggregates GibbsSampler::aggregate_components(const ModelState& s,
                                                                     const Dataset& d) const {
  ComponentAggregates agg;
  agg.n_h.assign(hp_.H, 0);
  agg.edge_totals.assign(hp_.H, std::vector<double>(hp_.edge_slots(), 0.0));
  for (int i = 0; i < d.n(); ++i) {
    const int h = s.G[i];
    ++agg.n_h[h];
    const auto& bits = d.agencies[i].network.bits;
    auto& totals = agg.edge_totals[h];
    for (std::size_t l = 0; l < bits.size(); ++l) totals[l] += bits[l];
  }
  return agg;
}

std::vector<double> GibbsSampler::choice_posterior_alpha(const ModelState& s, const Dataset& d,
                                                         int k) const {
  std::vector<double> alpha(hp_.alpha);
  for (int i = 0; i < d.n(); ++i) {
    if (s.C[i] != k) continue;
    for (int v = 0; v < hp_.v_count(); ++v) {
      alpha[v] += static_cast<double>(d.agencies[i].choice_counts[v]);
    }
  }
  return alpha;
}

void GibbsSampler::update_choice_probs(ModelState& s, const Dataset& d, RngStream& rng) const {
  for (int k = 0; k < s.cluster_count(); ++k) {
    RngStream unit = rng.derived(static_cast<std::uint64_t>(k));
    s.p[k] = sample_dirichlet(choice_posterior_alpha(s, d, k), unit);
  }
}

std::vector<double> GibbsSampler::component_log_weights(const ModelState& s, const Dataset& d,
                                                        int i) const {
  std::vector<double> w(hp_.H);
  for (int h = 0; h < hp_.H; ++h) {
    const double nu_h = s.nu[s.C[i]][h];
    w[h] = (nu_h > 0.0 ? std::log(nu_h) : -std::numeric_limits<double>::infinity()) +
           log_lik_network(d.agencies[i].network, s.pi[h]);
  }
  return w;
}

void GibbsSampler::allocate_components(ModelState& s, const Dataset& d, RngStream& rng) const {
  const int L = hp_.edge_slots();
  // log lik factorizes as a constant per component plus edge contributions.
  std::vector<double> base(hp_.H, 0.0);
  std::vector<std::vector<double>> edge_logit(hp_.H, std::vector<double>(L));
  for (int h = 0; h < hp_.H; ++h) {
    for (int l = 0; l < L; ++l) {
      const double pi = s.pi[h].pi[l];
      base[h] += std::log1p(-pi);
      edge_logit[h][l] = std::log(pi) - std::log1p(-pi);
    }
  }
  std::vector<double> w(hp_.H);
  for (int i = 0; i < d.n(); ++i) {
    const auto edges = edge_list(d.agencies[i].network);
    const auto& nu_row = s.nu[s.C[i]];
    for (int h = 0; h < hp_.H; ++h) {
      double lik = base[h];
      for (int l : edges) lik += edge_logit[h][l];
      w[h] = (nu_row[h] > 0.0 ? std::log(nu_row[h]) : -std::numeric_limits<double>::infinity()) +
             lik;
    }
    RngStream unit = rng.derived(static_cast<std::uint64_t>(i));
    s.G[i] = sample_categorical_log(w, unit);
  }
}

std::vector<double> GibbsSampler::mixing_posterior_alpha(const ModelState& s, int k) const {
  std::vector<double> alpha(hp_.H, 1.0 / hp_.H);
  for (std::size_t i = 0; i < s.C.size(); ++i) {
    if (s.C[i] == k) alpha[s.G[i]] += 1.0;
  }
  return alpha;
}

void GibbsSampler::update_mixing_probs(ModelState& s, RngStream& rng) const {
  for (int k = 0; k < s.cluster_count(); ++k) {
    RngStream unit = rng.derived(static_cast<std::uint64_t>(k));
    s.nu[k] = sample_dirichlet(mixing_posterior_alpha(s, k), unit);
  }
}

void GibbsSampler::update_polya_gamma(ModelState& s, const Dataset& d, RngStream& rng) const {
  std::vector<int> n_h(hp_.H, 0);
  for (int g : s.G) ++n_h[g];
  for (int h = 0; h < hp_.H; ++h) {
    if (n_h[h] == 0) {
      s.omega_valid[h] = 0;
      continue;
    }
    const auto offsets = edge_offsets(s.Xbar[h]);
    for (int l = 0; l < hp_.edge_slots(); ++l) {
      RngStream unit = rng.derived(static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(l));
      s.omega[h][l] = sample_polya_gamma(n_h[h], s.Z[l] + offsets[l], unit);
    }
    s.omega_valid[h] = 1;
  }
}

std::pair<double, double> GibbsSampler::similarity_posterior(const ModelState& s,
                                                             const Dataset& d, int l) const {
  const auto agg = aggregate_components(s, d);
  double precision = 1.0 / hp_.sigma2[l];
  double weighted_mean = hp_.mu[l] / hp_.sigma2[l];
  for (int h = 0; h < hp_.H; ++h) {
    if (agg.n_h[h] == 0) continue;
    const auto offsets = edge_offsets(s.Xbar[h]);
    const double centering = hooks_.corrupt_z_update ? 0.0 : 0.5 * agg.n_h[h];
    precision += s.omega[h][l];
    weighted_mean += agg.edge_totals[h][l] - centering - s.omega[h][l] * offsets[l];
  }
  const double variance = 1.0 / precision;
  return {variance * weighted_mean, variance};
}

void GibbsSampler::update_shared_similarity(ModelState& s, const Dataset& d,
                                            RngStream& rng) const {
  const auto agg = aggregate_components(s, d);
  std::vector<const std::vector<double>*> omega_rows;
  std::vector<std::vector<double>> offsets;
  std::vector<int> active;
  for (int h = 0; h < hp_.H; ++h) {
    if (agg.n_h[h] == 0) continue;
    if (!s.omega_valid[h]) {
      throw NumericError("update_shared_similarity: omega missing for nonempty component");
    }
    active.push_back(h);
    offsets.push_back(edge_offsets(s.Xbar[h]));
  }
  for (int l = 0; l < hp_.edge_slots(); ++l) {
    double precision = 1.0 / hp_.sigma2[l];
    double weighted_mean = hp_.mu[l] / hp_.sigma2[l];
    for (std::size_t j = 0; j < active.size(); ++j) {
      const int h = active[j];
      const double centering = hooks_.corrupt_z_update ? 0.0 : 0.5 * agg.n_h[h];
      precision += s.omega[h][l];
      weighted_mean += agg.edge_totals[h][l] - centering - s.omega[h][l] * offsets[j][l];
    }
    const double variance = 1.0 / precision;
    RngStream unit = rng.derived(static_cast<std::uint64_t>(l));
    s.Z[l] = sample_gaussian(variance * weighted_mean, variance, unit);
  }
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> GibbsSampler::coord_posterior(const ModelState& s,
                                                                          const Dataset& d,
                                                                          int h, int v) const {
  const auto agg = aggregate_components(s, d);
  const int V = hp_.v_count();
  const int R = hp_.R;
  // Prior precision diag(prod_{m<=r} theta_m) = Lambda^-1.
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(R, R);
  double prod = 1.0;
  for (int r = 0; r < R; ++r) {
    prod *= s.theta[h][r];
    precision(r, r) = prod;
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(R);
  if (agg.n_h[h] > 0) {
    if (!s.omega_valid[h]) {
      throw NumericError("coord_posterior: omega missing for nonempty component");
    }
    Eigen::MatrixXd rest(V - 1, R);        // Xbar with row v removed
    Eigen::VectorXd resid(V - 1);          // S_(v) - n_h/2 - Omega_(v) Z_(v)
    int row = 0;
    for (int u = 0; u < V; ++u) {
      if (u == v) continue;
      const int l = u < v ? pair_index(v + 1, u + 1, V) : pair_index(u + 1, v + 1, V);
      const double omega = s.omega[h][l];
      rest.row(row) = s.Xbar[h].row(u);
      resid[row] = agg.edge_totals[h][l] - 0.5 * agg.n_h[h] - omega * s.Z[l];
      for (int r = 0; r < R; ++r) {
        for (int q = 0; q <= r; ++q) {
          const double value = omega * rest(row, r) * rest(row, q);
          precision(r, q) += value;
          if (q != r) precision(q, r) += value;
        }
      }
      ++row;
    }
    eta = rest.transpose() * resid;
  }
  return {eta, precision};
}

void GibbsSampler::update_latent_coords(ModelState& s, const Dataset& d, RngStream& rng) const {
  const auto agg = aggregate_components(s, d);
  const int V = hp_.v_count();
  const int R = hp_.R;
  for (int h = 0; h < hp_.H; ++h) {
    if (agg.n_h[h] == 0) {
      // No allocated networks: the conditional is the prior.
      const auto lambda = shrinkage_weights(s.theta[h]);
      RngStream unit = rng.derived(static_cast<std::uint64_t>(h), ~std::uint64_t{0});
      for (int v = 0; v < V; ++v) {
        for (int r = 0; r < R; ++r) s.Xbar[h](v, r) = sample_gaussian(0.0, lambda[r], unit);
      }
      continue;
    }
    if (!s.omega_valid[h]) {
      throw NumericError("update_latent_coords: omega missing for nonempty component");
    }
    Eigen::MatrixXd rest(V - 1, R);
    Eigen::VectorXd resid(V - 1);
    Eigen::VectorXd sqrt_omega(V - 1);
    for (int v = 0; v < V; ++v) {
      Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(R, R);
      double prod = 1.0;
      for (int r = 0; r < R; ++r) {
        prod *= s.theta[h][r];
        precision(r, r) = prod;
      }
      int row = 0;
      for (int u = 0; u < V; ++u) {
        if (u == v) continue;
        const int l = u < v ? pair_index(v + 1, u + 1, V) : pair_index(u + 1, v + 1, V);
        const double omega = s.omega[h][l];
        rest.row(row) = s.Xbar[h].row(u);
        sqrt_omega[row] = std::sqrt(omega);
        resid[row] = agg.edge_totals[h][l] - 0.5 * agg.n_h[h] - omega * s.Z[l];
        ++row;
      }
      const Eigen::MatrixXd weighted = sqrt_omega.asDiagonal() * rest;
      precision.noalias() += weighted.transpose() * weighted;
      const Eigen::VectorXd eta = rest.transpose() * resid;
      RngStream unit =
          rng.derived(static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(v));
      try {
        s.Xbar[h].row(v) = sample_gaussian_precision(precision, eta, unit).transpose();
      } catch (const NumericError& err) {
        std::ostringstream msg;
        msg << err.what() << " (component " << h + 1 << ", product row " << v + 1 << ")";
        throw NumericError(msg.str());
      }
    }
  }
}

std::pair<double, double> GibbsSampler::shrinkage_posterior(const ModelState& s, int h,
                                                            int r) const {
  const int V = hp_.v_count();
  const int R = hp_.R;
  const double shape = (r == 0 ? hp_.a1 : hp_.a2) + 0.5 * V * (R - r);
  double rate = 1.0;
  for (int m = r; m < R; ++m) {
    double partial = 1.0;  // prod_{t<=m, t != r} theta_t
    for (int t = 0; t <= m; ++t) {
      if (t != r) partial *= s.theta[h][t];
    }
    rate += 0.5 * partial * s.Xbar[h].col(m).squaredNorm();
  }
  return {shape, rate};
}

void GibbsSampler::update_shrinkage(ModelState& s, RngStream& rng) const {
  for (int h = 0; h < hp_.H; ++h) {
    RngStream unit = rng.derived(static_cast<std::uint64_t>(h));
    for (int r = 0; r < hp_.R; ++r) {
      const auto [shape, rate] = shrinkage_posterior(s, h, r);
      s.theta[h][r] = sample_gamma(shape, rate, unit);
    }
  }
}

void GibbsSampler::refresh_edge_probs(ModelState& s) const {
  s.pi.resize(hp_.H);
  for (int h = 0; h < hp_.H; ++h) s.pi[h] = compute_component_probs(s.Z, s.Xbar[h]);
}

void GibbsSampler::detach_agency(ModelState& s, int i) const {
  const int k = s.C[i];
  int remaining = 0;
  for (std::size_t j = 0; j < s.C.size(); ++j) {
    if (static_cast<int>(j) != i && s.C[j] == k) ++remaining;
  }
  if (remaining == 0) {
    s.p.erase(s.p.begin() + k);
    s.nu.erase(s.nu.begin() + k);
    for (auto& c : s.C) {
      if (c > k) --c;
    }
  }
  s.C[i] = -1;
}

std::vector<double> GibbsSampler::reseat_log_weights_detached(const ModelState& s,
                                                              const Dataset& d, int i) const {
  const int K = s.cluster_count();
  std::vector<int> sizes(K, 0);
  for (std::size_t j = 0; j < s.C.size(); ++j) {
    if (s.C[j] >= 0) ++sizes[s.C[j]];
  }
  const auto& counts = d.agencies[i].choice_counts;
  std::vector<double> w(K + 1);
  for (int k = 0; k < K; ++k) {
    w[k] = std::log(static_cast<double>(sizes[k]));
    if (!hooks_.reseat_prior_only) {
      w[k] += log_lik_choices(counts, s.p[k]);
      const double nu_gi = s.nu[k][s.G[i]];
      w[k] += nu_gi > 0.0 ? std::log(nu_gi) : -std::numeric_limits<double>::infinity();
    }
  }
  w[K] = std::log(hp_.alpha_c);
  if (!hooks_.reseat_prior_only) {
    w[K] += marginal_choices_new_cluster(counts, hp_.alpha);
    w[K] += marginal_component_new_cluster(hp_.H);
  }
  return w;
}

std::vector<double> GibbsSampler::reseat_log_weights(ModelState s, const Dataset& d,
                                                     int i) const {
  detach_agency(s, i);
  return reseat_log_weights_detached(s, d, i);
}

void GibbsSampler::reseat_clusters(ModelState& s, const Dataset& d, RngStream& rng) const {
  for (int i = 0; i < d.n(); ++i) {
    detach_agency(s, i);
    const auto w = reseat_log_weights_detached(s, d, i);
    const int K = s.cluster_count();
    const int choice = sample_categorical_log(w, rng);
    if (choice == K) {
      // Open a new cluster seeded from its full conditionals given agency i.
      std::vector<double> p_alpha(hp_.alpha);
      for (int v = 0; v < hp_.v_count(); ++v) {
        p_alpha[v] += static_cast<double>(d.agencies[i].choice_counts[v]);
      }
      s.p.push_back(sample_dirichlet(p_alpha, rng));
      std::vector<double> nu_alpha(hp_.H, 1.0 / hp_.H);
      nu_alpha[s.G[i]] += 1.0;
      s.nu.push_back(sample_dirichlet(nu_alpha, rng));
    }
    s.C[i] = choice;
  }
}

void GibbsSampler::canonicalize_labels(ModelState& s) {
  const int K = s.cluster_count();
  std::vector<int> new_label(K, -1);
  int next = 0;
  for (int c : s.C) {
    if (new_label[c] < 0) new_label[c] = next++;
  }
  if (next != K) throw NumericError("canonicalize_labels: empty cluster label");
  std::vector<std::vector<double>> p(K), nu(K);
  for (int k = 0; k < K; ++k) {
    p[new_label[k]] = std::move(s.p[k]);
    nu[new_label[k]] = std::move(s.nu[k]);
  }
  s.p = std::move(p);
  s.nu = std::move(nu);
  for (int& c : s.C) c = new_label[c];
}

void GibbsSampler::sweep(ModelState& s, const Dataset& d, std::uint64_t sweep_id,
                         const RngStream& root) const {
  RngStream r1 = root.derived(sweep_id, kChoice);
  update_choice_probs(s, d, r1);
  RngStream r2 = root.derived(sweep_id, kAllocate);
  allocate_components(s, d, r2);
  RngStream r3 = root.derived(sweep_id, kMixing);
  update_mixing_probs(s, r3);
  RngStream r4 = root.derived(sweep_id, kPolyaGamma);
  update_polya_gamma(s, d, r4);
  RngStream r5 = root.derived(sweep_id, kSimilarity);
  update_shared_similarity(s, d, r5);
  RngStream r6 = root.derived(sweep_id, kCoords);
  update_latent_coords(s, d, r6);
  RngStream r7 = root.derived(sweep_id, kShrinkage);
  update_shrinkage(s, r7);
  refresh_edge_probs(s);
  RngStream r9 = root.derived(sweep_id, kReseat);
  reseat_clusters(s, d, r9);
  canonicalize_labels(s);
}

void GibbsSampler::sweep_conditional(ModelState& s, const Dataset& d, std::uint64_t sweep_id,
                                     const RngStream& root) const {
  RngStream r1 = root.derived(sweep_id, kChoice);
  update_choice_probs(s, d, r1);
  RngStream r2 = root.derived(sweep_id, kAllocate);
  allocate_components(s, d, r2);
  RngStream r3 = root.derived(sweep_id, kMixing);
  update_mixing_probs(s, r3);
  RngStream r4 = root.derived(sweep_id, kPolyaGamma);
  update_polya_gamma(s, d, r4);
  RngStream r5 = root.derived(sweep_id, kSimilarity);
  update_shared_similarity(s, d, r5);
  RngStream r6 = root.derived(sweep_id, kCoords);
  update_latent_coords(s, d, r6);
  RngStream r7 = root.derived(sweep_id, kShrinkage);
  update_shrinkage(s, r7);
  refresh_edge_probs(s);
}

RunResult run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg,
                    const TraceSink& sink, TestHooks hooks) {
  data.validate();
  cfg.validate();
  if (hp.v_count() != data.v_count) {
    throw ValidationError("run_chain: hyperparameters do not match the dataset's V");
  }
  const GibbsSampler sampler(hp, hooks);
  const RngStream root(cfg.seed);
  RngStream init = root.derived(0, kInit);
  ModelState state = sampler.init_state(data, init);

  RunResult result;
  result.log_joint.reserve(cfg.iterations);
  for (int it = 1; it <= cfg.iterations; ++it) {
    try {
      sampler.sweep(state, data, static_cast<std::uint64_t>(it), root);
    } catch (const NumericError& err) {
      std::ostringstream msg;
      msg << err.what() << " (iteration " << it << ")";
      throw ChainError(msg.str(), it);
    }
    result.log_joint.push_back(joint_log_density(state, data, hp));
    if (it > cfg.burnin && (it - cfg.burnin - 1) % cfg.thin == 0) {
      TraceRecord rec;
      rec.iteration = it;
      rec.C = state.C;
      rec.G = state.G;
      rec.p = state.p;
      rec.nu = state.nu;
      rec.Z = state.Z;
      rec.Xbar = state.Xbar;
      rec.theta = state.theta;
      rec.log_joint = result.log_joint.back();
      if (sink) sink(rec);
      ++result.records_emitted;

      OccupancySample occ;
      std::vector<char> used(hp.H, 0);
      for (int g : state.G) used[g] = 1;
      occ.occupied = static_cast<int>(std::count(used.begin(), used.end(), 1));
      occ.lambda_last.resize(hp.H);
      for (int h = 0; h < hp.H; ++h) {
        occ.lambda_last[h] = shrinkage_weights(state.theta[h]).back();
      }
      result.occupancy.push_back(std::move(occ));
    }
  }
  return result;
}

RunResult run_conditional_chain(const Dataset& data, const Hyperparameters& hp,
                                const std::vector<int>& partition, const ChainConfig& cfg,
                                const ConditionalSink& sink) {
  data.validate();
  cfg.validate();
  if (static_cast<int>(partition.size()) != data.n()) {
    throw ValidationError("run_conditional_chain: partition length must equal n");
  }
  int K = 0;
  for (int c : partition) K = std::max(K, c + 1);
  {
    std::vector<int> sizes(K, 0);
    int next = 0;
    for (int c : partition) {
      if (c < 0 || c >= K) throw ValidationError("run_conditional_chain: bad cluster label");
      if (c > next) throw ValidationError("run_conditional_chain: labels must be canonical");
      next = std::max(next, c + 1);
      ++sizes[c];
    }
    for (int k = 0; k < K; ++k) {
      if (sizes[k] == 0) throw ValidationError("run_conditional_chain: empty cluster label");
    }
  }

  const GibbsSampler sampler(hp);
  const RngStream root(cfg.seed);
  RngStream init = root.derived(0, kInit);
  ModelState state = sampler.init_state(data, init);
  state.C = partition;
  state.p.resize(K);
  state.nu.resize(K);
  for (int k = 0; k < K; ++k) {
    state.p[k] = sample_dirichlet(hp.alpha, init);
    state.nu[k] = sample_dirichlet(std::vector<double>(hp.H, 1.0 / hp.H), init);
  }

  RunResult result;
  result.log_joint.reserve(cfg.iterations);
  for (int it = 1; it <= cfg.iterations; ++it) {
    try {
      sampler.sweep_conditional(state, data, static_cast<std::uint64_t>(it), root);
    } catch (const NumericError& err) {
      std::ostringstream msg;
      msg << err.what() << " (conditional iteration " << it << ")";
      throw ChainError(msg.str(), it);
    }
    result.log_joint.push_back(joint_log_density(state, data, hp));
    if (it > cfg.burnin && (it - cfg.burnin - 1) % cfg.thin == 0) {
      if (sink) {
        ConditionalSample sample;
        sample.p = state.p;
        sample.nu = state.nu;
        sample.pi.resize(hp.H);
        for (int h = 0; h < hp.H; ++h) sample.pi[h] = state.pi[h].pi;
        sink(sample);
      }
      ++result.records_emitted;
    }
  }
  return result;
}

}  // namespace cosub
