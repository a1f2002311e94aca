#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace testutil {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double stderr_of_mean(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline double excess_kurtosis(std::span<const double> v) {
  const double m = mean(v);
  double s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    const double d = x - m;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  s2 /= n;
  s4 /= n;
  return s4 / (s2 * s2) - 3.0;
}

}  // namespace testutil
