#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edgelab/process.hpp"

namespace edgelab {

using Cdf = std::function<double(double)>;

struct DistReport {
  std::string metric;  // kolmogorov | w1 | lq
  double q = 1.0;
  double value = 0.0;
  /// Numerical error bound (quadrature and window tails).
  double uncertainty = 0.0;
  /// Monte Carlo scale of the estimator (0 for analytic pairs). For lq
  /// with an empirical side this is the bias integral F(1-F)/(M-1).
  double noise = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  long n = 0;
  std::string fingerprint;

  static std::string csv_header() { return "metric,n,value,uncertainty"; }
  std::string csv_row() const;
};

/// Exact sup over the jump points of the empirical CDF.
DistReport kolmogorov(std::span<const double> sample, const Cdf& target);
DistReport kolmogorov(const SampleSet& sample, const Cdf& target);
/// sup |F - G| for two continuous CDFs: grid scan on [lo, hi] plus golden-section polish.
DistReport kolmogorov(const Cdf& F, const Cdf& G, double lo, double hi, int points = 20001);

struct WindowPolicy {
  /// Scale used for the default window [-sigmas * scale, sigmas * scale].
  double scale = 1.0;
  double sigmas = 12.0;
  /// Hard cap on automatic widening, in units of `scale`.
  double max_sigmas = 96.0;
  double tol = 1e-10;
};

/// int |F - G| for continuous CDFs, widening the window until the
/// sub-Gaussian tail estimate is below 10% of the value.
DistReport wasserstein1(const Cdf& F, const Cdf& G, const WindowPolicy& policy = {});
/// int |F_M - G| with the empirical CDF integrated exactly between jumps.
DistReport wasserstein1(std::span<const double> sample, const Cdf& G, const WindowPolicy& policy = {});
DistReport wasserstein1(const SampleSet& sample, const Cdf& G, const WindowPolicy& policy = {});

/// int |F - G|^q (no root).
DistReport lq_distance(const Cdf& F, const Cdf& G, double q, const WindowPolicy& policy = {});
/// Empirical side exact between jumps. With `debias` and q = 2 the
/// unbiased correction sum F_M(1 - F_M)/(M - 1) is subtracted.
DistReport lq_distance(std::span<const double> sample, const Cdf& G, double q, const WindowPolicy& policy = {},
                       bool debias = false);

struct RateFit {
  std::vector<double> ns;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  /// Standard error of the slope from the residuals.
  double slope_se = 0.0;

  std::string to_json() const;
};

/// Least squares of log(value) on log(n); needs >= 4 points, values > 0.
RateFit fit_rate(std::span<const double> ns, std::span<const double> values);

}  // namespace edgelab
