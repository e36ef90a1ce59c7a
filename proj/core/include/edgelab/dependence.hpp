#pragma once

#include <string>
#include <vector>

#include "edgelab/cumulants.hpp"
#include "edgelab/process.hpp"

namespace edgelab {

/// ||X_k - X_k^*||_p from M coupled pairs (all innovations up to time 0
/// replaced). Exactly zero when the coupled values agree.
Estimate estimate_lambda(const ProcessSpec& spec, long k, double p, std::size_t M, const InnovationStream& stream,
                         int threads = 0);

/// ||X_k - X_k'||_p where only eps_0 is replaced.
Estimate estimate_theta(const ProcessSpec& spec, long k, double p, std::size_t M, const InnovationStream& stream,
                        int threads = 0);

struct DependenceProfile {
  double p = 2.0;
  std::vector<long> k;
  std::vector<Estimate> lambda;
  /// partial[q][K] = sum_{k <= K} k^q lambda_k, q = 0, 1, 2.
  std::vector<std::vector<double>> partial;
  /// Log-linear fit of lambda_k against k over the strictly positive entries with k >= 1.
  double decay_slope = 0.0;
  double decay_r2 = 0.0;
  int decay_points = 0;

  std::string to_json() const;
};

/// lambda_k for k = 0..K.
DependenceProfile dependence_profile(const ProcessSpec& spec, double p, long K, std::size_t M,
                                     const InnovationStream& stream, int threads = 0);

struct AssumptionReport {
  double p = 2.0;
  /// E |X|^p log(1+|X|)^a for a = 2.5 and 3.5.
  std::vector<double> log_exponents;
  std::vector<Estimate> moments;
  bool a1_pass = false;
  DependenceProfile profile;
  /// Relative increment of Lambda_{2,p} over the last quarter of lags.
  double a2_tail_increment = 0.0;
  bool a2_pass = false;
  LongRunSet longrun;
  bool a3_pass = false;

  bool all_pass() const noexcept { return a1_pass && a2_pass && a3_pass; }
  std::string to_json() const;
  std::string to_text() const;
};

/// `n_probe` is the lag window of the long-run variance estimate.
AssumptionReport assumption_report(const ProcessSpec& spec, double p, long K, long n_probe, std::size_t M,
                                   const InnovationStream& stream, int threads = 0);

struct TailRow {
  double x = 0.0;
  std::size_t exceed = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double envelope = 0.0;
  bool below = false;
};

struct TailCheckOptions {
  double p = 3.0;
  /// Exponent a in the envelope n x^-p (log x)^(-a/2).
  double log_exponent = 2.5;
  /// Grid points must satisfy x >= C sqrt(n log n).
  double C = 1.0;
  double envelope_constant = 1.0;
  double z = 1.959963984540054;
};

/// P(S_n >= x) with Wilson intervals next to the envelope. Throws
/// InvalidArgument when a grid point violates the lower limit.
std::vector<TailRow> tail_check(const ProcessSpec& spec, long n, std::size_t M, const std::vector<double>& xs,
                                const InnovationStream& stream, const TailCheckOptions& opt = {}, int threads = 0);

/// Wilson score interval for k successes out of m.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t m, double z = 1.959963984540054);

/// ||S_n - S_{n,m}||_2 (unnormalized) with the truncated sum driven by the
/// same innovations.
Estimate truncation_gap(const ProcessSpec& spec, long n, long m, std::size_t M, const InnovationStream& stream,
                        int threads = 0);

}  // namespace edgelab
