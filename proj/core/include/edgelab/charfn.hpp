#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "edgelab/innovations.hpp"
#include "edgelab/process.hpp"

namespace edgelab {

/// One independent block of a weighted sum: `multiplicity` i.i.d. copies
/// of weight * eps with eps ~ law.
struct CfComponent {
  InnovationLaw law;
  double weight = 1.0;
  long multiplicity = 1;
};

/// Characteristic function of S_n/sqrt(n), analytic or empirical.
class CharFnSource {
 public:
  enum class Kind { IIDGeneral, Lattice, GaussianSum, Example1, MAq, Projection, Empirical };

  /// phi_eps(xi/sqrt n)^n.
  static CharFnSource iid(const InnovationLaw& law, long n);
  /// cos(xi/sqrt n)^n.
  static CharFnSource lattice(long n);
  /// exp(-s^2 xi^2 / 2).
  static CharFnSource gaussian(double s);
  /// cos(xi/sqrt n)^n * ghat(xi/sqrt n)^2.
  static CharFnSource example1(long n, double a, int b);
  /// Linear filter a_0..a_q driven by `law`: product over the filter weights c_t.
  static CharFnSource ma(std::span<const double> coefficients, const InnovationLaw& law, long n);
  /// Product of independent weighted blocks (weights already include 1/sqrt n).
  static CharFnSource projection(std::vector<CfComponent> components, long n);
  /// Replicate average of exp(i xi s_j).
  static CharFnSource empirical(const SampleSet& sample);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  long n() const noexcept { return n_; }

  std::complex<double> operator()(double xi) const;
  double modulus(double xi) const { return std::abs((*this)(xi)); }

  /// Standard deviation of the underlying variable.
  double scale() const noexcept { return scale_; }
  /// M^{-1/2} for empirical sources, 0 otherwise.
  double noise_floor() const noexcept { return noise_floor_; }
  /// A point beyond which |phi| <= tol, or +inf when the modulus is not
  /// known to decay monotonically.
  double decay_point(double tol) const;
  /// Initial frequency step for sampling phi.
  double resolution_hint() const noexcept { return 0.25 / std::max(scale_, 1e-300); }

  const std::vector<CfComponent>& components() const noexcept { return components_; }

 private:
  CharFnSource() = default;

  Kind kind_ = Kind::GaussianSum;
  long n_ = 1;
  double scale_ = 1.0;
  double noise_floor_ = 0.0;
  std::vector<CfComponent> components_;
  double gauss_s_ = 1.0;
  double smooth_a_ = 0.0;
  int smooth_b_ = 0;
  double smooth_cb_ = 0.0;
  std::vector<double> sums_;
};

inline std::complex<double> cf_eval(const CharFnSource& source, double xi) { return source(xi); }

/// T_a^b(x) = integral over a <= |xi| <= b of e^{-i xi x} phi(xi) (1 - |xi|/b) / xi.
struct TailIntegralResult {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> x;
  std::vector<std::complex<double>> values;
  double error = 0.0;

  std::string to_csv() const;
};

TailIntegralResult tail_integral(const CharFnSource& source, double a, double b, std::span<const double> xs,
                                 double tol = 1e-11);

struct CharacteristicOptions {
  /// Upper end of the geometric b-grid. Required (> 0) unless b_grid is set.
  double B_max = 0.0;
  int b_points = 24;
  /// Explicit b-grid; overrides B_max/b_points.
  std::vector<double> b_grid;
  /// Zero-padding factor of the frequency samples (x spacing pi/(2B) at 4).
  double oversample = 4.0;
  /// Caps on the frequency samples and on the FFT length.
  long max_nodes = 1L << 20;
  long max_fft = 1L << 22;
  /// Half-width of the x-window; 0 selects max(8s, 4 pi b / a) (or tau).
  /// Windows that need more than max_nodes frequency samples are shrunk
  /// to what the budget resolves and flagged.
  double x_window = 0.0;
  /// Local maxima of the FFT scan refined by golden-section search.
  int refine_maxima = 6;
  /// Skip the scan when the envelope bound is below this fraction of 1/b.
  double envelope_skip = 1e-3;
  int threads = 0;
};

/// Per-b detail of a characteristic computation.
struct BScan {
  double b = 0.0;
  /// sup_x |T| (or the integral of |T| over [-tau, tau]).
  double term = 0.0;
  double value = 0.0;
  double x_at_sup = 0.0;
  double x_window = 0.0;
  double x_spacing = 0.0;
  double step = 0.0;
  long nodes = 0;
  long fft_size = 0;
  double error = 0.0;
  /// The scan was replaced by the envelope bound 2 int |phi| (1 - xi/b)/xi.
  bool envelope_only = false;
  /// Interpolation check passed at the final frequency step.
  bool resolved = true;
  /// The node budget forced a narrower x-window than requested.
  bool window_reduced = false;
};

struct CharacteristicResult {
  double a = 0.0;
  double value = 0.0;
  double argmin_b = 0.0;
  /// tau for integrated characteristics, 0 for the sup version.
  double tau = 0.0;
  double noise_floor = 0.0;
  /// value is below the empirical noise floor and only bounded by it.
  bool below_floor = false;
  std::vector<BScan> scans;

  std::string to_json() const;
};

/// min_b ( sup_x |T_a^b(x)| + 1/b ).
CharacteristicResult characteristic(const CharFnSource& source, double a, const CharacteristicOptions& options);

/// min_b ( integral_{-tau}^{tau} |T_a^b(x)| dx + 2 tau / b ).
CharacteristicResult integrated_characteristic(const CharFnSource& source, double a, double tau,
                                               const CharacteristicOptions& options);

/// Geometric grid of `points` values from a to B_max inclusive.
std::vector<double> geometric_grid(double a, double B_max, int points);

/// CDF by Gil-Pelaez inversion; needs a source whose modulus decays.
double gil_pelaez_cdf(const CharFnSource& source, double x, double tol = 1e-11);

}  // namespace edgelab
