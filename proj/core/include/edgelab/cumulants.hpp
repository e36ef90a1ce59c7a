#pragma once

#include <span>
#include <string>
#include <vector>

#include "edgelab/process.hpp"

namespace edgelab {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Mean with a standard error from `batches` contiguous batch means.
Estimate batch_mean(std::span<const double> values, int batches = 32);

/// s_n^2 = E (S_n/sqrt n)^2 and kappa_n^3 = E (S_n/sqrt n)^3.
struct CumulantSet {
  long n = 0;
  double s_n_sq = 0.0;
  double s_n_sq_se = 0.0;
  double kappa_n_cu = 0.0;
  double kappa_n_cu_se = 0.0;
  std::string method;

  std::string to_json() const;
};

/// Long-run variance sum_k E X_0 X_k and third cumulant sum_{i,j} E X_0 X_i X_j.
struct LongRunSet {
  double sigma_sq = 0.0;
  double sigma_sq_se = 0.0;
  double kappa_cu = 0.0;
  double kappa_cu_se = 0.0;
  long K = 0;
  std::string method;

  /// sigma_sq not positive at 3 standard errors (or exactly zero).
  bool a3_violation() const noexcept { return !(sigma_sq > 3.0 * sigma_sq_se) || sigma_sq <= 1e-12; }
  std::string to_json() const;
};

CumulantSet cumulants_from_sample(const SampleSet& sample);
CumulantSet estimate_finite_n(const ProcessSpec& spec, long n, std::size_t M, const InnovationStream& stream,
                              int threads = 0);
/// Exact finite-n values for linear filters: S_n = sum_t c_t eps_t.
CumulantSet finite_n_linear(std::span<const double> coefficients, const InnovationLaw& law, long n);

LongRunSet longrun_linear(std::span<const double> coefficients, double sigma_eps_sq, double third_moment);

enum class BruteForceMethod { Auto, Exact, MonteCarlo };

/// Lag sums truncated at |k| <= K. Exact moment enumeration for linear
/// specs with K >= memory (Auto), Monte Carlo over stationary windows
/// X_{-K}..X_K otherwise.
LongRunSet longrun_bruteforce(const ProcessSpec& spec, long K, std::size_t M, const InnovationStream& stream,
                              BruteForceMethod method = BruteForceMethod::Auto, int threads = 0);

/// r(n) = |E S_n^4 - 3 n^2 s_n^4| / n with a delta-method batch SE.
struct FourthMomentCheck {
  double r = 0.0;
  double se = 0.0;
  long n = 0;
};
FourthMomentCheck fourth_moment_from_sample(const SampleSet& sample);
FourthMomentCheck check_fourth_moment(const ProcessSpec& spec, long n, std::size_t M, const InnovationStream& stream,
                                      int threads = 0);

}  // namespace edgelab
