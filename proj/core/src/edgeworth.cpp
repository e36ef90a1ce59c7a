#include "edgelab/edgeworth.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "edgelab/cumulants.hpp"
#include "edgelab/error.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

EdgeworthExpansion::EdgeworthExpansion(double s, double kappa, long n, Variant variant)
    : s_(s), kappa_(kappa), n_(n), variant_(variant) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("edgeworth: s must be positive");
  if (!std::isfinite(kappa)) throw InvalidArgument("edgeworth: kappa must be finite");
}

double EdgeworthExpansion::correction_coefficient() const noexcept {
  return variant_ == Variant::AsWritten ? kappa_ / 6.0 : kappa_ / (6.0 * s_ * s_ * s_);
}

double EdgeworthExpansion::cdf(double x) const noexcept {
  const double y = x / s_;
  return normal_cdf(y) + correction_coefficient() * (1.0 - y * y) * normal_pdf(y);
}

double EdgeworthExpansion::density(double x) const noexcept {
  // d/dy [(1 - y^2) phi(y)] = (y^3 - 3y) phi(y)
  const double y = x / s_;
  return normal_pdf(y) * (1.0 + correction_coefficient() * (y * y * y - 3.0 * y)) / s_;
}

std::string to_string(EdgeworthExpansion::Variant v) {
  return v == EdgeworthExpansion::Variant::AsWritten ? "as_written" : "standardized";
}

EdgeworthExpansion::Variant variant_from_string(const std::string& name) {
  if (name == "as_written") return EdgeworthExpansion::Variant::AsWritten;
  if (name == "standardized") return EdgeworthExpansion::Variant::Standardized;
  throw InvalidArgument("unknown Edgeworth variant '" + name + "'");
}

double TestFunction::operator()(double x) const noexcept {
  switch (kind) {
    case Kind::Sin:
      return std::sin(freq * x);
    case Kind::Cos:
      return std::cos(freq * x);
    case Kind::SmoothBump: {
      const double u = (x - center) / width;
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    }
    case Kind::Holder: {
      const double u = std::abs(x - center) / width;
      return u < 1.0 ? std::pow(1.0 - u, exponent) : 0.0;
    }
  }
  return 0.0;
}

std::vector<double> TestFunction::breakpoints() const {
  switch (kind) {
    case Kind::SmoothBump:
      return {center - width, center + width};
    case Kind::Holder:
      return {center - width, center, center + width};
    default:
      return {};
  }
}

std::string TestFunction::name() const {
  switch (kind) {
    case Kind::Sin:
      return "sin";
    case Kind::Cos:
      return "cos";
    case Kind::SmoothBump:
      return "bump";
    case Kind::Holder:
      return "holder";
  }
  return "unknown";
}

TestFunction TestFunction::from_name(const std::string& name) {
  TestFunction f;
  if (name == "sin")
    f.kind = Kind::Sin;
  else if (name == "cos")
    f.kind = Kind::Cos;
  else if (name == "bump")
    f.kind = Kind::SmoothBump;
  else if (name == "holder")
    f.kind = Kind::Holder;
  else
    throw InvalidArgument("unknown test function '" + name + "'");
  return f;
}

double integrate_against(const TestFunction& f, const EdgeworthExpansion& e, double tol) {
  const double lo = -12.0 * e.s(), hi = 12.0 * e.s();
  std::vector<double> cuts{lo};
  for (double b : f.breakpoints())
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const auto integrand = [&](double x) { return f(x) * e.density(x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (f.kind == TestFunction::Kind::Holder) {
      // Endpoint power singularities: double-exponential rule.
      boost::math::quadrature::tanh_sinh<double> ts;
      double err = 0.0;
      total += ts.integrate(integrand, cuts[i], cuts[i + 1], 1e-13, &err);
      if (!(err < tol)) throw NumericalError("weak_gap: quadrature did not reach the requested tolerance");
    } else {
      total += quad::refine(integrand, cuts[i], cuts[i + 1], tol / static_cast<double>(cuts.size())).value;
    }
  }
  return total;
}

WeakGap weak_gap(const TestFunction& f, const SampleSet& sample, const EdgeworthExpansion& e) {
  std::vector<double> values(sample.sums.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(sample.sums[i]);
  const Estimate m = batch_mean(values);
  const double rhs = integrate_against(f, e);
  return WeakGap{std::abs(m.value - rhs), m.se, m.value, rhs};
}

}  // namespace edgelab
