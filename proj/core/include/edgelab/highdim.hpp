#pragma once

#include <string>
#include <utility>
#include <vector>

#include "edgelab/cumulants.hpp"
#include "edgelab/flat_toml.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/process.hpp"

namespace edgelab {

/// d coordinate processes, a tail block I driven by independent streams,
/// and a projection vector theta. Coordinates outside I are free.
struct HighDimSpec {
  int d = 0;
  /// Zero-based indices of the tail block.
  std::vector<int> I;
  std::vector<double> theta;
  std::vector<ProcessSpec> coordinates;
  double alpha = 0.5;
  double beta = 2.0;
  double c = 0.05;
  double C = 1.0;
  /// Range over which the tail-block band is enforced; 0 disables the check.
  long n_min = 0;
  long n_max = 0;
  /// Coordinates enter as X^2 - E X^2 instead of X.
  bool square_centered = false;

  /// Throws InvalidArgument for shape errors and Infeasible when the tail
  /// block leaves c (log n)^beta / n <= sum_I theta^2 <= C n^-alpha.
  void validate() const;
  double tail_mass() const;
  double theta_norm_sq() const;
  bool in_tail(int i) const;

  std::string to_toml() const;
  /// Reads `[highdim]` plus optional `[highdim.I]` / `[highdim.Ic]` process blocks.
  static HighDimSpec from_document(const toml::Document& doc);
};

/// Lower and upper tail-band limits at n.
std::pair<double, double> tail_band(long n, double alpha, double beta, double c, double C);

/// Equal theta on I = {0..I_size-1} with sum theta^2 at the geometric mean of
/// the band at the range midpoint (geometric). Coordinates outside I get
/// weight `outer_weight` each. All coordinates default to IID Rademacher.
HighDimSpec build_theta(long n_min, long n_max, double alpha, double beta, double c, double C, int d, int I_size,
                        double outer_weight = 1.0);

/// Stream for coordinate i; distinct coordinates never share draws.
InnovationStream coordinate_stream(const InnovationStream& stream, int i);

/// M replicates of <theta, S_n>/sqrt(n).
SampleSet simulate_projection(const HighDimSpec& spec, const InnovationStream& stream, long n, std::size_t M,
                              int threads = 0);

/// Weighted Rademacher group: `count` coordinates with weight |w|.
struct RademacherGroup {
  double weight = 1.0;
  long count = 1;
};

/// Groups of an all-Rademacher IID spec; empty if some coordinate is not
/// IID Rademacher or there are more than two distinct |theta| values.
std::vector<RademacherGroup> rademacher_groups(const HighDimSpec& spec);

/// Exact Kolmogorov distance between the law of
/// sum_g w_g (sum of count_g*n Rademachers)/sqrt(n) and `target`.
/// Supports one or two groups.
DistReport exact_rademacher_kolmogorov(const std::vector<RademacherGroup>& groups, long n, const Cdf& target);

/// Cross-covariances E[X_I,k X_Ic,k+h], h = 0..max_lag, of the projected
/// blocks along one path of length n per replicate.
std::vector<Estimate> block_cross_covariance(const HighDimSpec& spec, const InnovationStream& stream, long n,
                                             std::size_t M, int max_lag = 4, int threads = 0);

/// Regression slope of X_{k,i} on X_{k,i'} for consecutive tail coordinates
/// i' < i; each with SE. Martingale differences give zero.
std::vector<Estimate> martingale_difference_check(const HighDimSpec& spec, const InnovationStream& stream, long n,
                                                  std::size_t M, int threads = 0);

}  // namespace edgelab
