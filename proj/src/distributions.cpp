#include "cosub/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cosub/common.hpp"

namespace cosub {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;  // log sqrt(2 pi)
}  // namespace

double log_sum_exp(std::span<const double> values) {
  double m = -kInf;
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double total = 0.0;
  for (double v : values) total += std::exp(v - m);
  return m + std::log(total);
}

double log_norm_cdf(double x) {
  if (x < -20.0) {
    // Asymptotic expansion of Mills' ratio; erfc loses precision out here.
    const double x2 = x * x;
    return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi +
           std::log1p(-1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
  }
  return std::log(0.5 * std::erfc(-x * M_SQRT1_2));
}

double log_normal_pdf(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw NumericError("log_normal_pdf: variance must be positive");
  const double d = x - mean;
  return -0.5 * std::log(variance) - kLogSqrt2Pi - 0.5 * d * d / variance;
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw NumericError("log_gamma_pdf: shape and rate must be positive");
  }
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_dirichlet_pdf(std::span<const double> x, std::span<const double> alpha) {
  if (x.size() != alpha.size()) throw NumericError("log_dirichlet_pdf: dimension mismatch");
  double log_norm = 0.0;
  double alpha_sum = 0.0;
  double value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(alpha[j] > 0.0)) throw NumericError("log_dirichlet_pdf: alpha must be positive");
    if (!(x[j] >= 0.0)) return -kInf;
    log_norm -= std::lgamma(alpha[j]);
    alpha_sum += alpha[j];
    value += (alpha[j] - 1.0) * std::log(x[j]);
  }
  return value + log_norm + std::lgamma(alpha_sum);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw SamplingError("sample_gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    const double u = rng.uniform_pos();
    return g * std::exp(std::log(u) / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
  }
}

double sample_gaussian(double mean, double variance, RngStream& rng) {
  if (!(variance > 0.0)) throw SamplingError("sample_gaussian: variance must be positive");
  return mean + std::sqrt(variance) * rng.gaussian();
}

Eigen::VectorXd sample_gaussian_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& eta, RngStream& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericError("sample_gaussian_precision: precision matrix is not positive definite");
  }
  Eigen::VectorXd z(eta.size());
  for (Eigen::Index r = 0; r < z.size(); ++r) z[r] = rng.gaussian();
  // mean = P^-1 eta; noise = U^-1 z has covariance P^-1 for P = L U.
  return llt.solve(eta) + llt.matrixU().solve(z);
}

std::vector<double> sample_dirichlet(std::span<const double> alpha, RngStream& rng) {
  for (double a : alpha) {
    if (!(a > 0.0)) throw SamplingError("sample_dirichlet: alpha entries must be positive");
  }
  std::vector<double> draw(alpha.size());
  for (;;) {
    double total = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      draw[j] = sample_gamma(alpha[j], 1.0, rng);
      total += draw[j];
    }
    if (total > 0.0) {
      for (double& x : draw) x /= total;
      return draw;
    }
    // All gammas underflowed to zero (tiny shapes); retry.
  }
}

int sample_categorical(std::span<const double> weights, RngStream& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (std::isnan(w) || w < 0.0) throw SamplingError("sample_categorical: invalid weight");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw SamplingError("sample_categorical: weights must have positive finite total");
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cum += weights[j];
    if (u < cum) return static_cast<int>(j);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<long long> sample_multinomial(long long trials, std::span<const double> probs,
                                          RngStream& rng) {
  if (trials < 0) throw SamplingError("sample_multinomial: negative trial count");
  std::vector<long long> counts(probs.size(), 0);
  for (long long t = 0; t < trials; ++t) ++counts[sample_categorical(probs, rng)];
  return counts;
}

int sample_categorical_log(std::span<const double> log_weights, RngStream& rng) {
  double m = -kInf;
  for (double w : log_weights) {
    if (std::isnan(w)) throw SamplingError("sample_categorical_log: NaN weight");
    m = std::max(m, w);
  }
  if (m == -kInf) throw SamplingError("sample_categorical_log: all weights are zero");
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - m);
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t j = 0; j < log_weights.size(); ++j) {
    cum += std::exp(log_weights[j] - m);
    if (u < cum) return static_cast<int>(j);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

}  // namespace cosub
