#include <cmath>
#include <limits>

#include "cosub/common.hpp"
#include "cosub/distributions.hpp"

// Exact PG(1, c) sampler after Devroye's alternating-series method for the
// Jacobi-type variable J*(1, z), with PG(1, c) = J*(1, c/2) / 4 and the
// truncation point t = 2/pi (Polson-Scott-Windle; Windle 2013, Ch. 4).

namespace cosub {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kPiSq = kPi * kPi;
constexpr double kTrunc = 2.0 / kPi;
constexpr double kLog4OverPi = 0.24156447527049044469;  // log(4/pi)

// n-th coefficient of the alternating series for the J*(1, 0) density,
// using whichever of the two equivalent expansions converges fast at x.
double series_coef(int n, double x) {
  const double np = n + 0.5;
  if (x <= kTrunc) {
    return kPi * np * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * np * np / x);
  }
  return kPi * np * std::exp(-np * np * kPiSq * x * 0.5);
}

// Inverse-Gaussian(mu, lambda=1) via Michael-Schucany-Haas.
double sample_inverse_gaussian(double mu, RngStream& rng) {
  const double nu = rng.gaussian();
  const double v = nu * nu;
  double x = mu + 0.5 * mu * (mu * v - std::sqrt(4.0 * mu * v + mu * mu * v * v));
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
  return x;
}

// Inverse-Gaussian(1/z, 1) restricted to (0, t) with t = 2/pi. For small z the
// reciprocal is drawn from Ga(1/2, rate 1/2) restricted to (pi/2, inf) and
// exponentially tilted; for z >= pi/2 plain rejection on the IG draw is cheap.
double sample_truncated_inverse_gaussian(double z, RngStream& rng) {
  if (z < kPi / 2.0) {
    for (;;) {
      // Shifted-exponential proposal for the truncated gamma reciprocal.
      double g;
      for (;;) {
        g = kPi / 2.0 + 2.0 * rng.exponential();
        if (rng.uniform() <= std::sqrt(kPi / (2.0 * g))) break;
      }
      const double x = 1.0 / g;
      if (std::log(rng.uniform_pos()) < -0.5 * z * z * x) return x;
    }
  }
  const double mu = 1.0 / z;
  for (;;) {
    const double x = sample_inverse_gaussian(mu, rng);
    if (x < kTrunc) return x;
  }
}

// One draw of J*(1, z), z >= 0.
double sample_jacobi_unit(double z, RngStream& rng) {
  const double k = kPiSq / 8.0 + z * z / 2.0;
  // Probability of proposing from the exponential tail on (t, inf) versus the
  // inverse-Gaussian body on (0, t): p / (p + q) with q/p computed in logs.
  const double w = std::sqrt(kPi / 2.0);
  const double log_kt = std::log(k) + k * kTrunc;
  const double logf1 = kLog4OverPi - z + log_norm_cdf(w * (kTrunc * z - 1.0)) + log_kt;
  const double logf2 = kLog4OverPi + z + log_norm_cdf(-w * (kTrunc * z + 1.0)) + log_kt;
  const double q_over_p = std::exp(logf1) + std::exp(logf2);
  const double prob_tail = 1.0 / (1.0 + q_over_p);

  for (;;) {
    double x;
    if (rng.uniform() < prob_tail) {
      x = kTrunc + rng.exponential() / k;
    } else {
      x = sample_truncated_inverse_gaussian(z, rng);
    }
    // Squeeze acceptance via the alternating partial sums of the series.
    double partial = series_coef(0, x);
    const double y = rng.uniform() * partial;
    for (int n = 1;; ++n) {
      if (n & 1) {
        partial -= series_coef(n, x);
        if (y <= partial) return x;
      } else {
        partial += series_coef(n, x);
        if (y > partial) break;
      }
    }
  }
}

}  // namespace

double sample_polya_gamma(int b, double c, RngStream& rng) {
  if (b < 1) throw SamplingError("sample_polya_gamma: shape b must be a positive integer");
  if (!std::isfinite(c)) throw SamplingError("sample_polya_gamma: tilt c must be finite");
  const double z = std::fabs(c) * 0.5;
  double total = 0.0;
  for (int j = 0; j < b; ++j) total += sample_jacobi_unit(z, rng);
  return 0.25 * total;
}

}  // namespace cosub
