#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "edgelab/innovations.hpp"

namespace edgelab {

/// Gaussian-plus-centered-Gamma comparison law
///   L = Z + sign * (G - E G),  Z ~ N(0, gauss_variance),  G ~ Gamma(shape, rate),
/// resolved so that E L^2 = s_sq and E L^3 = kappa_cu exactly.
struct GaussGammaLaw {
  enum class Branch { Positive, Negative, Degenerate };

  /// How the variance is split between the Gaussian and the Gamma part.
  /// EqualVariance puts s_sq/2 on each (the symmetric split of the
  /// (Z + G - EG)/sqrt2 construction). FixedShape pins the Gamma shape to
  /// n * per_summand_shape and solves for the variance, which may be infeasible.
  enum class Split { EqualVariance, FixedShape };

  double s_sq = 1.0;
  double kappa_cu = 0.0;
  long n = 1;
  double gauss_variance = 1.0;
  double gamma_shape = 0.0;
  double gamma_rate = 0.0;
  Branch branch = Branch::Degenerate;

  double sign() const noexcept {
    return branch == Branch::Positive ? 1.0 : branch == Branch::Negative ? -1.0 : 0.0;
  }
  /// Closed-form moments of the resolved law.
  double second_moment() const noexcept;
  double third_moment() const noexcept;

  std::string to_json() const;
  static GaussGammaLaw from_json(const std::string& text);
};

GaussGammaLaw fit_gauss_gamma(double s_sq, double kappa_cu, long n,
                              GaussGammaLaw::Split split = GaussGammaLaw::Split::EqualVariance,
                              double per_summand_shape = 1.0);

/// One draw: one Gaussian and one Gamma variate from the replicate's substream.
double sample_Ln_one(const GaussGammaLaw& law, Rng& rng);
std::vector<double> sample_Ln(const GaussGammaLaw& law, const InnovationStream& stream, std::size_t count);

/// CDF by Gaussian-against-Gamma-CDF convolution quadrature (abs error <= 1e-7).
double Ln_cdf(const GaussGammaLaw& law, double x);

/// Compact-spectrum smoothing law with density c_b a |sin(ax)/(ax)|^b.
class SmoothingLaw {
 public:
  SmoothingLaw(double a, int b);

  double a() const noexcept { return a_; }
  int b() const noexcept { return b_; }
  double c_b() const noexcept { return c_b_; }
  /// Support of the Fourier transform is [-ab, ab].
  double cf_support() const noexcept { return a_ * b_; }

  double density(double x) const noexcept;
  /// Real-valued Fourier transform (the law is symmetric).
  double cf(double t) const noexcept;
  /// CDF by quadrature over half-periods plus a power-law tail bound.
  double cdf(double x) const;
  double variance() const;
  double sample(Rng& rng) const noexcept;
  std::vector<double> sample(const InnovationStream& stream, std::size_t count) const;

  /// Piecewise-polynomial representation of the CF on [-ab, ab]:
  /// knots t_k = a(2k - b), k = 0..b, and for each piece the monomial
  /// coefficients in (t - t_k)/a.
  std::string spline_json() const;

 private:
  double a_;
  int b_;
  double c_b_;
};

/// Exact value of the integral of (sin u / u)^b over the real line, b even.
double sinc_power_integral(int b);
/// Density of the sum of b independent Uniform(-1, 1) variables.
double uniform_convolution_density(int b, double y) noexcept;

}  // namespace edgelab
