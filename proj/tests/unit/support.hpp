#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace edgelab::testing {

/// Sample mean of f(x) with its i.i.d. standard error.
template <class F>
std::pair<double, double> mean_se(std::span<const double> xs, F&& f) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    const double v = f(x);
    s += v;
    s2 += v * v;
  }
  const double m = static_cast<double>(xs.size());
  const double mean = s / m;
  const double var = std::max(0.0, s2 / m - mean * mean);
  return {mean, std::sqrt(var / m)};
}

inline std::pair<double, double> moment_se(std::span<const double> xs, int k) {
  return mean_se(xs, [k](double x) { return std::pow(x, k); });
}

/// |value - target| <= z * se. z = 4 keeps the family-wise false alarm rate low across ~100 MC checks.
inline bool within(double value, double target, double se, double z = 4.0) {
  return std::abs(value - target) <= z * se + 1e-15;
}

}  // namespace edgelab::testing
