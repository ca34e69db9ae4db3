#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cosub/rng.hpp"

namespace cosub {

// ---- numeric helpers ----

double log_sum_exp(std::span<const double> values);
inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p) - std::log1p(-p); }
double log_norm_cdf(double x);

// ---- log densities (used by the joint-density oracle and the tests) ----

double log_normal_pdf(double x, double mean, double variance);
double log_gamma_pdf(double x, double shape, double rate);
double log_dirichlet_pdf(std::span<const double> x, std::span<const double> alpha);

// ---- samplers ----

// Gamma(shape, rate), Marsaglia-Tsang with the shape<1 boost.
double sample_gamma(double shape, double rate, RngStream& rng);

double sample_gaussian(double mean, double variance, RngStream& rng);

// Draw from N(P^-1 eta, P^-1) given a symmetric positive-definite precision P.
Eigen::VectorXd sample_gaussian_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& eta, RngStream& rng);

std::vector<double> sample_dirichlet(std::span<const double> alpha, RngStream& rng);

// Index j with probability weights_j / sum(weights); weights must be
// nonnegative, finite, and not all zero.
int sample_categorical(std::span<const double> weights, RngStream& rng);

// Same draw from unnormalized log weights via log-sum-exp.
int sample_categorical_log(std::span<const double> log_weights, RngStream& rng);

std::vector<long long> sample_multinomial(long long trials, std::span<const double> probs,
                                          RngStream& rng);

// Polya-gamma PG(b, c) for integer b >= 1, as the sum of b exact PG(1, c)
// rejection draws (Devroye-style alternating-series sampler).
double sample_polya_gamma(int b, double c, RngStream& rng);

}  // namespace cosub
