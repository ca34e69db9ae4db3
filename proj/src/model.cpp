#include "cosub/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cosub/distributions.hpp"

namespace cosub {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbClamp = 1e-12;  // keeps the logistic away from {0,1}
}  // namespace

void Hyperparameters::validate() const {
  if (!(alpha_c > 0.0)) throw ValidationError("hyperparameters: alpha_c must be positive");
  if (v_count() < 2) throw ValidationError("hyperparameters: alpha must have length V >= 2");
  for (double a : alpha) {
    if (!(a > 0.0)) throw ValidationError("hyperparameters: alpha entries must be positive");
  }
  if (edge_slots() != pair_count(v_count())) {
    throw ValidationError("hyperparameters: mu must have length V(V-1)/2");
  }
  if (sigma2.size() != mu.size()) {
    throw ValidationError("hyperparameters: sigma2 must match mu in length");
  }
  for (double s : sigma2) {
    if (!(s > 0.0)) throw ValidationError("hyperparameters: sigma2 entries must be positive");
  }
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw ValidationError("hyperparameters: a1, a2 must be positive");
  if (H < 1 || R < 1) throw ValidationError("hyperparameters: H and R must be at least 1");
}

Hyperparameters empirical_hyperparameters(const Dataset& data, int H, int R, double alpha_c,
                                          double sigma2, double a1, double a2) {
  data.validate();
  const int V = data.v_count;
  const int L = pair_count(V);
  const int n = data.n();
  Hyperparameters hp;
  hp.alpha_c = alpha_c;
  hp.a1 = a1;
  hp.a2 = a2;
  hp.H = H;
  hp.R = R;
  hp.alpha.assign(V, 0.0);
  for (const auto& agency : data.agencies) {
    for (int v = 0; v < V; ++v) hp.alpha[v] += static_cast<double>(agency.choice_counts[v]);
  }
  for (double& a : hp.alpha) a = std::max(a / n, 0.01);
  hp.mu.assign(L, 0.0);
  hp.sigma2.assign(L, sigma2);
  const double clamp = 1.0 / (2.0 * n);
  for (int l = 0; l < L; ++l) {
    double freq = 0.0;
    for (const auto& agency : data.agencies) freq += agency.network.bits[l];
    freq = std::clamp(freq / n, clamp, 1.0 - clamp);
    hp.mu[l] = logit(freq);
  }
  hp.validate();
  return hp;
}

std::vector<int> ModelState::cluster_sizes() const {
  std::vector<int> sizes(cluster_count(), 0);
  for (int c : C) ++sizes[c];
  return sizes;
}

void ModelState::validate(const Hyperparameters& hp, int n) const {
  const int V = hp.v_count();
  const int L = hp.edge_slots();
  const int K = cluster_count();
  if (static_cast<int>(C.size()) != n || static_cast<int>(G.size()) != n) {
    throw ValidationError("state: C and G must have one entry per agency");
  }
  if (static_cast<int>(nu.size()) != K) throw ValidationError("state: p and nu row counts differ");
  auto check_simplex = [](const std::vector<double>& row, std::size_t dim, const char* name) {
    if (row.size() != dim) throw ValidationError(std::string("state: bad row length in ") + name);
    double total = 0.0;
    for (double x : row) {
      if (!(x >= 0.0)) throw ValidationError(std::string("state: negative entry in ") + name);
      total += x;
    }
    if (std::fabs(total - 1.0) > 1e-8) {
      throw ValidationError(std::string("state: row of ") + name + " does not sum to 1");
    }
  };
  for (const auto& row : p) check_simplex(row, V, "p");
  for (const auto& row : nu) check_simplex(row, hp.H, "nu");
  std::vector<int> sizes(K, 0);
  for (int c : C) {
    if (c < 0 || c >= K) throw ValidationError("state: cluster label out of range");
    ++sizes[c];
  }
  for (int k = 0; k < K; ++k) {
    if (sizes[k] == 0) throw ValidationError("state: empty cluster label");
  }
  for (int g : G) {
    if (g < 0 || g >= hp.H) throw ValidationError("state: component label out of range");
  }
  if (static_cast<int>(Z.size()) != L) throw ValidationError("state: Z has wrong length");
  if (static_cast<int>(Xbar.size()) != hp.H || static_cast<int>(theta.size()) != hp.H) {
    throw ValidationError("state: need one Xbar and theta per component");
  }
  for (int h = 0; h < hp.H; ++h) {
    if (Xbar[h].rows() != V || Xbar[h].cols() != hp.R) {
      throw ValidationError("state: Xbar must be V x R");
    }
    if (static_cast<int>(theta[h].size()) != hp.R) {
      throw ValidationError("state: theta must have R entries");
    }
    for (double t : theta[h]) {
      if (!(t > 0.0)) throw ValidationError("state: theta entries must be positive");
    }
  }
}

std::vector<double> shrinkage_weights(std::span<const double> theta) {
  std::vector<double> lambda(theta.size());
  double prod = 1.0;
  for (std::size_t r = 0; r < theta.size(); ++r) {
    prod /= theta[r];
    lambda[r] = prod;
  }
  return lambda;
}

std::vector<double> edge_offsets(const Eigen::MatrixXd& xbar) {
  const int V = static_cast<int>(xbar.rows());
  std::vector<double> d(pair_count(V));
  int l = 0;
  for (int u = 0; u < V - 1; ++u) {
    for (int v = u + 1; v < V; ++v) {
      d[l++] = xbar.row(v).dot(xbar.row(u));
    }
  }
  return d;
}

EdgeProbComponent compute_component_probs(std::span<const double> z,
                                          const Eigen::MatrixXd& xbar) {
  const auto d = edge_offsets(xbar);
  if (d.size() != z.size()) throw NumericError("compute_component_probs: dimension mismatch");
  EdgeProbComponent out;
  out.pi.resize(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    const double psi = z[l] + d[l];
    if (std::isnan(psi)) throw NumericError("compute_component_probs: NaN offset");
    out.pi[l] = std::clamp(logistic(psi), kProbClamp, 1.0 - kProbClamp);
  }
  return out;
}

double log_lik_choices(std::span<const long long> counts, std::span<const double> p) {
  if (counts.size() != p.size()) throw NumericError("log_lik_choices: dimension mismatch");
  double value = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] == 0) continue;
    if (p[v] <= 0.0) return -kInf;
    value += static_cast<double>(counts[v]) * std::log(p[v]);
  }
  return value;
}

double log_lik_network(const EdgeVector& a, const EdgeProbComponent& pi) {
  if (a.bits.size() != pi.pi.size()) throw NumericError("log_lik_network: dimension mismatch");
  double value = 0.0;
  for (std::size_t l = 0; l < pi.pi.size(); ++l) {
    value += a.bits[l] ? std::log(pi.pi[l]) : std::log1p(-pi.pi[l]);
  }
  return value;
}

double mixture_log_lik(const EdgeVector& a, std::span<const double> nu,
                       std::span<const EdgeProbComponent> components) {
  if (nu.size() != components.size()) throw NumericError("mixture_log_lik: dimension mismatch");
  std::vector<double> terms(nu.size());
  for (std::size_t h = 0; h < nu.size(); ++h) {
    terms[h] = (nu[h] > 0.0 ? std::log(nu[h]) : -kInf) + log_lik_network(a, components[h]);
  }
  return log_sum_exp(terms);
}

double crp_log_eppf(std::span<const int> C, double alpha_c) {
  const int n = static_cast<int>(C.size());
  if (n == 0) return 0.0;
  int K = 0;
  for (int c : C) K = std::max(K, c + 1);
  std::vector<int> sizes(K, 0);
  for (int c : C) {
    if (c < 0) throw ValidationError("crp_log_eppf: negative label");
    ++sizes[c];
  }
  double value = 0.0;
  for (int k = 0; k < K; ++k) {
    if (sizes[k] == 0) throw ValidationError("crp_log_eppf: labels must be contiguous");
    value += std::log(alpha_c) + std::lgamma(static_cast<double>(sizes[k]));
  }
  for (int j = 0; j < n; ++j) value -= std::log(alpha_c + j);
  return value;
}

namespace {

// Prior and allocation terms shared by both joint-density variants; the
// network factor differs between them.
double joint_without_network(const ModelState& state, const Dataset& data,
                             const Hyperparameters& hp) {
  const int n = data.n();
  double value = crp_log_eppf(state.C, hp.alpha_c);
  const std::vector<double> nu_prior(hp.H, 1.0 / hp.H);
  for (int k = 0; k < state.cluster_count(); ++k) {
    value += log_dirichlet_pdf(state.p[k], hp.alpha);
    value += log_dirichlet_pdf(state.nu[k], nu_prior);
  }
  for (int l = 0; l < hp.edge_slots(); ++l) {
    value += log_normal_pdf(state.Z[l], hp.mu[l], hp.sigma2[l]);
  }
  for (int h = 0; h < hp.H; ++h) {
    const auto lambda = shrinkage_weights(state.theta[h]);
    for (int r = 0; r < hp.R; ++r) {
      value += log_gamma_pdf(state.theta[h][r], r == 0 ? hp.a1 : hp.a2, 1.0);
      for (int v = 0; v < hp.v_count(); ++v) {
        value += log_normal_pdf(state.Xbar[h](v, r), 0.0, lambda[r]);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    const double nu_gi = state.nu[state.C[i]][state.G[i]];
    value += nu_gi > 0.0 ? std::log(nu_gi) : -kInf;
    value += log_lik_choices(data.agencies[i].choice_counts, state.p[state.C[i]]);
  }
  return value;
}

}  // namespace

double joint_log_density(const ModelState& state, const Dataset& data,
                         const Hyperparameters& hp) {
  state.validate(hp, data.n());
  double value = joint_without_network(state, data, hp);
  std::vector<EdgeProbComponent> pi(hp.H);
  for (int h = 0; h < hp.H; ++h) pi[h] = compute_component_probs(state.Z, state.Xbar[h]);
  for (int i = 0; i < data.n(); ++i) {
    value += log_lik_network(data.agencies[i].network, pi[state.G[i]]);
  }
  return value;
}

double joint_log_density_augmented(const ModelState& state, const Dataset& data,
                                   const Hyperparameters& hp) {
  state.validate(hp, data.n());
  double value = joint_without_network(state, data, hp);
  const int L = hp.edge_slots();
  std::vector<int> n_h(hp.H, 0);
  for (int g : state.G) ++n_h[g];
  for (int h = 0; h < hp.H; ++h) {
    if (n_h[h] == 0) continue;
    if (state.omega_valid.empty() || !state.omega_valid[h]) {
      throw NumericError("joint_log_density_augmented: omega missing for a nonempty component");
    }
    std::vector<double> s(L, 0.0);
    for (int i = 0; i < data.n(); ++i) {
      if (state.G[i] != h) continue;
      for (int l = 0; l < L; ++l) s[l] += data.agencies[i].network.bits[l];
    }
    const auto d = edge_offsets(state.Xbar[h]);
    for (int l = 0; l < L; ++l) {
      const double psi = state.Z[l] + d[l];
      value += (s[l] - 0.5 * n_h[h]) * psi - 0.5 * state.omega[h][l] * psi * psi;
    }
  }
  return value;
}

}  // namespace cosub
