#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

// Shared oracles for the statistical tests. Everything here is derived
// independently of the library implementation it checks.

namespace testsup {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  m.n = x.size();
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.variance = ss / (x.size() - 1);
  m.se_mean = std::sqrt(m.variance / x.size());
  return m;
}

// Mean of PG(b, c): b tanh(c/2) / (2c), with the c -> 0 limit b/4.
inline double pg_mean(int b, double c) {
  if (c == 0.0) return b / 4.0;
  return b * std::tanh(c / 2.0) / (2.0 * c);
}

// Density of PG(1, c) via the alternating-series expansion of the Jacobi
// J*(1, z) density at x = 4y, z = |c|/2:
//   f(x|z) = cosh(z) exp(-x z^2/2) sum_n (-1)^n a_n(x).
inline double pg1_density(double y, double c) {
  if (y <= 0.0) return 0.0;
  const double x = 4.0 * y;
  const double z = std::fabs(c) * 0.5;
  const double pi = 3.14159265358979323846;
  auto coef = [&](int n) {
    const double np = n + 0.5;
    if (x <= 0.64) {
      return pi * np * std::pow(2.0 / (pi * x), 1.5) * std::exp(-2.0 * np * np / x);
    }
    return pi * np * std::exp(-np * np * pi * pi * x * 0.5);
  };
  double total = 0.0;
  double sign = 1.0;
  for (int n = 0; n < 1000; ++n) {
    const double term = coef(n);
    total += sign * term;
    sign = -sign;
    if (n > 2 && term < 1e-17 * std::fabs(total)) break;
  }
  return 4.0 * std::cosh(z) * std::exp(-0.5 * x * z * z) * total;
}

// Piecewise-linear CDF of PG(1, c) from trapezoid integration on a fine grid.
struct Pg1Cdf {
  double step = 0.0;
  std::vector<double> values;

  double operator()(double y) const {
    if (y <= 0.0) return 0.0;
    const double pos = y / step;
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return 1.0;
    const double frac = pos - lo;
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  }
};

inline Pg1Cdf pg1_cdf(double c, int panels = 200000) {
  const double z = std::fabs(c) * 0.5;
  const double rate = 4.0 * (3.14159265358979323846 * 3.14159265358979323846 / 8.0 +
                             z * z / 2.0);
  const double y_max = 25.0 / rate;
  Pg1Cdf cdf;
  cdf.step = y_max / panels;
  cdf.values.resize(panels + 1);
  cdf.values[0] = 0.0;
  double prev = pg1_density(0.0, c);
  for (int j = 1; j <= panels; ++j) {
    const double cur = pg1_density(j * cdf.step, c);
    cdf.values[j] = cdf.values[j - 1] + 0.5 * (prev + cur) * cdf.step;
    prev = cur;
  }
  // Normalize out the residual tail mass.
  const double total = cdf.values.back();
  for (double& v : cdf.values) v /= total;
  return cdf;
}

template <typename Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

// Asymptotic one-sample critical value at level 0.01.
inline double ks_critical(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double ks_two_sample_critical(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = 1 + *std::max_element(a.begin(), a.end());
  const int kb = 1 + *std::max_element(b.begin(), b.end());
  std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++table[a[i]][b[i]];
  auto choose2 = [](long long x) { return 0.5 * x * (x - 1); };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (int r = 0; r < ka; ++r) {
    long long row = 0;
    for (int c = 0; c < kb; ++c) {
      sum_cells += choose2(table[r][c]);
      row += table[r][c];
    }
    sum_rows += choose2(row);
  }
  for (int c = 0; c < kb; ++c) {
    long long col = 0;
    for (int r = 0; r < ka; ++r) col += table[r][c];
    sum_cols += choose2(col);
  }
  const double total = choose2(static_cast<long long>(a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

}  // namespace testsup
