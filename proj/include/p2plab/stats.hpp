#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace p2plab {

// 0.99 quantile of the chi-square distribution. Exact table for small df,
// Wilson-Hilferty approximation beyond (relative error < 1e-3 there).
inline double chi2_quantile_99(int df) {
  static const double table[] = {6.6349, 9.2103, 11.3449, 13.2767, 15.0863,
                                 16.8119, 18.4753, 20.0902, 21.6660, 23.2093};
  if (df < 1) throw std::invalid_argument("df must be positive");
  if (df <= 10) return table[df - 1];
  const double z99 = 2.3263478740408408;
  double t = 1.0 - 2.0 / (9.0 * df) + z99 * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

struct Chi2Result {
  double statistic;
  int df;
  double critical_99;
  bool pass;  // statistic below the 0.99 quantile
};

// observed counts vs expected counts (same total); cells with tiny expected
// mass should be merged by the caller.
inline Chi2Result chi2_test(const std::vector<double>& observed,
                            const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw std::invalid_argument("chi2: need matching cell vectors");
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) throw std::invalid_argument("chi2: nonpositive expected cell");
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  int df = static_cast<int>(observed.size()) - 1;
  double crit = chi2_quantile_99(df);
  return {stat, df, crit, stat < crit};
}

struct KsResult {
  double statistic;
  double critical_99;
  bool pass;
};

// One-sample Kolmogorov-Smirnov test against Exp(rate), alpha = 0.01.
inline KsResult ks_test_exponential(std::vector<double> sample, double rate) {
  if (sample.size() < 8) throw std::invalid_argument("ks: sample too small");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double cdf = 1.0 - std::exp(-rate * sample[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(cdf - lo, hi - cdf));
  }
  double crit = 1.62762 / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  return {d, crit, d < crit};
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

struct LineFit {
  double slope;
  double intercept;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least_squares: degenerate x range");
  double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace p2plab
