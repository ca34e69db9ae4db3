#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cosub/data.hpp"

namespace cosub {

struct Hyperparameters {
  double alpha_c = 1.0;         // CRP concentration
  std::vector<double> alpha;    // Dirichlet prior for choice probabilities, length V
  std::vector<double> mu;       // prior means of the shared similarities, length L
  std::vector<double> sigma2;   // prior variances of the shared similarities, length L
  double a1 = 2.5;              // multiplicative-gamma shape, first weight
  double a2 = 3.5;              // multiplicative-gamma shape, later weights
  int H = 15;                   // mixture component bound
  int R = 10;                   // latent dimension bound

  int v_count() const { return static_cast<int>(alpha.size()); }
  int edge_slots() const { return static_cast<int>(mu.size()); }
  void validate() const;
};

// Data-centered defaults: mu_l = logit of the pooled edge frequency (clamped
// away from 0/1 at 1/(2n)) and alpha_v = mean choice count per agency,
// floored at 0.01 for products never chosen.
Hyperparameters empirical_hyperparameters(const Dataset& data, int H = 15, int R = 10,
                                          double alpha_c = 1.0, double sigma2 = 10.0,
                                          double a1 = 2.5, double a2 = 3.5);

// Component-wise edge probabilities pi = logistic(Z + L(Xbar Xbar^T)).
struct EdgeProbComponent {
  std::vector<double> pi;
};

// One Gibbs iteration's latent quantities. Cluster labels in C are contiguous
// 0-based with no empty label; p and nu have one row per cluster. Component
// quantities (nu columns, Xbar, theta, omega) are indexed 0..H-1.
struct ModelState {
  std::vector<int> C;                      // cluster per agency
  std::vector<int> G;                      // mixture component per agency
  std::vector<std::vector<double>> p;      // K x V choice probabilities
  std::vector<std::vector<double>> nu;     // K x H mixing probabilities
  std::vector<double> Z;                   // shared similarity, length L
  std::vector<Eigen::MatrixXd> Xbar;       // H scaled coordinate matrices, V x R
  std::vector<std::vector<double>> theta;  // H x R shrinkage gammas
  std::vector<std::vector<double>> omega;  // H x L Polya-gamma auxiliaries
  std::vector<char> omega_valid;           // per component: omega usable this sweep
  std::vector<EdgeProbComponent> pi;       // H cached edge-probability vectors

  int cluster_count() const { return static_cast<int>(p.size()); }
  std::vector<int> cluster_sizes() const;
  void validate(const Hyperparameters& hp, int n) const;
};

// Shrinkage weights lambda_r as cumulative products of 1/theta_r.
std::vector<double> shrinkage_weights(std::span<const double> theta);

// Dot products <Xbar_v, Xbar_u> stacked in pair_index order.
std::vector<double> edge_offsets(const Eigen::MatrixXd& xbar);

EdgeProbComponent compute_component_probs(std::span<const double> z, const Eigen::MatrixXd& xbar);

// Sum_v n_v log p_v; returns -inf when a positive count meets a zero
// probability (documented sentinel, not an error).
double log_lik_choices(std::span<const long long> counts, std::span<const double> p);

double log_lik_network(const EdgeVector& a, const EdgeProbComponent& pi);

// log sum_h nu_h exp(log_lik_network(a, pi_h)), via log-sum-exp.
double mixture_log_lik(const EdgeVector& a, std::span<const double> nu,
                       std::span<const EdgeProbComponent> components);

// Exchangeable partition probability of a contiguous 0-based assignment.
double crp_log_eppf(std::span<const int> C, double alpha_c);

// Log density of state and data under the full hierarchical model (priors for
// C, p, nu, Z, Xbar given theta, theta; categorical prior for G; choice and
// network likelihoods). The Polya-gamma auxiliaries do not enter.
double joint_log_density(const ModelState& state, const Dataset& data,
                         const Hyperparameters& hp);

// Variant at fixed omega for checking the [4.2]/[4.3] blocks: the network
// factor of joint_log_density is replaced by the PG-augmented quadratic
// sum_h sum_l { (S_l - n_h/2) psi_l - omega_l psi_l^2 / 2 }, psi = Z + D(h),
// S = per-component edge totals, over nonempty components only. Additive
// constants in omega are dropped.
double joint_log_density_augmented(const ModelState& state, const Dataset& data,
                                   const Hyperparameters& hp);

}  // namespace cosub
