#pragma once

#include <string>
#include <vector>

#include "edgelab/process.hpp"

namespace edgelab {

/// Second-order Edgeworth expansion of the law of S_n/sqrt(n):
///   Psi(x) = Phi(x/s) + c (1 - x^2/s^2) phi(x/s),
/// with c = kappa/6 (AsWritten) or kappa/(6 s^3) (Standardized).
struct EdgeworthExpansion {
  enum class Variant { AsWritten, Standardized };

  EdgeworthExpansion(double s, double kappa, long n, Variant variant = Variant::Standardized);

  double s() const noexcept { return s_; }
  double kappa() const noexcept { return kappa_; }
  long n() const noexcept { return n_; }
  Variant variant() const noexcept { return variant_; }
  /// Coefficient c of the correction profile (1 - y^2) phi(y).
  double correction_coefficient() const noexcept;

  double cdf(double x) const noexcept;
  /// Signed density; may be negative.
  double density(double x) const noexcept;

 private:
  double s_;
  double kappa_;
  long n_;
  Variant variant_;
};

std::string to_string(EdgeworthExpansion::Variant v);
EdgeworthExpansion::Variant variant_from_string(const std::string& name);

inline double psi_cdf(const EdgeworthExpansion& e, double x) { return e.cdf(x); }
inline double psi_density(const EdgeworthExpansion& e, double x) { return e.density(x); }

/// Bounded test functions for weak expansions.
struct TestFunction {
  enum class Kind {
    Sin,         ///< sin(freq x)
    Cos,         ///< cos(freq x)
    SmoothBump,  ///< exp(-1/(1-u^2)) on |u| < 1, u = (x - center)/width
    Holder,      ///< max(0, 1 - |u|)^exponent, Hoelder of order `exponent` at the edges
  };
  Kind kind = Kind::Sin;
  double freq = 1.0;
  double center = 0.0;
  double width = 1.0;
  double exponent = 0.5;

  double operator()(double x) const noexcept;
  /// Points where f is not smooth (quadrature splits there).
  std::vector<double> breakpoints() const;
  std::string name() const;
  static TestFunction from_name(const std::string& name);
};

/// Integral of f against the signed measure dPsi over [-12s, 12s].
double integrate_against(const TestFunction& f, const EdgeworthExpansion& e, double tol = 1e-9);

struct WeakGap {
  double gap = 0.0;
  double se = 0.0;
  double sample_mean = 0.0;
  double expansion_value = 0.0;
};

/// |mean f(sums) - integral f dPsi| with a batch-means SE.
WeakGap weak_gap(const TestFunction& f, const SampleSet& sample, const EdgeworthExpansion& e);

}  // namespace edgelab
