#include "edgelab/charfn.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>

#include "edgelab/error.hpp"
#include "edgelab/laws.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

namespace {

std::complex<double> component_cf(const CfComponent& c, double xi) {
  const std::complex<double> z = c.law.cf(c.weight * xi);
  if (c.law.symmetric()) return std::pow(z.real(), static_cast<int>(c.multiplicity));
  return std::pow(z, static_cast<double>(c.multiplicity));
}

bool monotone_modulus(const InnovationLaw& law) {
  return law.kind() == InnovationLaw::Kind::StandardNormal || law.kind() == InnovationLaw::Kind::CenteredExponential;
}

double components_scale(const std::vector<CfComponent>& cs) {
  double v = 0.0;
  for (const auto& c : cs) v += static_cast<double>(c.multiplicity) * c.weight * c.weight * c.law.variance();
  return std::sqrt(v);
}

}  // namespace

CharFnSource CharFnSource::iid(const InnovationLaw& law, long n) {
  if (n < 1) throw InvalidArgument("cf source: n must be positive");
  CharFnSource s;
  s.kind_ = Kind::IIDGeneral;
  s.n_ = n;
  s.components_ = {CfComponent{law, 1.0 / std::sqrt(static_cast<double>(n)), n}};
  s.scale_ = components_scale(s.components_);
  return s;
}

CharFnSource CharFnSource::lattice(long n) {
  CharFnSource s = iid(InnovationLaw::rademacher(), n);
  s.kind_ = Kind::Lattice;
  return s;
}

CharFnSource CharFnSource::gaussian(double sd) {
  if (!(sd > 0.0)) throw InvalidArgument("cf source: s must be positive");
  CharFnSource s;
  s.kind_ = Kind::GaussianSum;
  s.gauss_s_ = sd;
  s.scale_ = sd;
  return s;
}

CharFnSource CharFnSource::example1(long n, double a, int b) {
  const SmoothingLaw g(a, b);
  CharFnSource s = iid(InnovationLaw::rademacher(), n);
  s.kind_ = Kind::Example1;
  s.smooth_a_ = a;
  s.smooth_b_ = b;
  s.smooth_cb_ = g.c_b();
  s.scale_ = std::sqrt(1.0 + 2.0 * g.variance() / static_cast<double>(n));
  return s;
}

CharFnSource CharFnSource::ma(std::span<const double> a, const InnovationLaw& law, long n) {
  if (a.empty()) throw InvalidArgument("cf source: empty coefficient list");
  if (n < 1) throw InvalidArgument("cf source: n must be positive");
  const long L = static_cast<long>(a.size()) - 1;
  std::vector<double> prefix(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) prefix[i + 1] = prefix[i] + a[i];
  std::map<double, long> weights;
  const double root_n = std::sqrt(static_cast<double>(n));
  for (long t = 1 - L; t <= n; ++t) {
    const long lo = std::max(0L, 1 - t), hi = std::min(L, n - t);
    if (hi < lo) continue;
    const double c = prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    if (c != 0.0) ++weights[c];
  }
  CharFnSource s;
  s.kind_ = Kind::MAq;
  s.n_ = n;
  for (const auto& [c, count] : weights) s.components_.push_back(CfComponent{law, c / root_n, count});
  s.scale_ = components_scale(s.components_);
  return s;
}

CharFnSource CharFnSource::projection(std::vector<CfComponent> components, long n) {
  if (components.empty()) throw InvalidArgument("cf source: no components");
  for (const auto& c : components)
    if (c.multiplicity < 1) throw InvalidArgument("cf source: multiplicities must be positive");
  CharFnSource s;
  s.kind_ = Kind::Projection;
  s.n_ = n;
  s.components_ = std::move(components);
  s.scale_ = components_scale(s.components_);
  return s;
}

CharFnSource CharFnSource::empirical(const SampleSet& sample) {
  if (sample.sums.empty()) throw InvalidArgument("cf source: empty sample");
  CharFnSource s;
  s.kind_ = Kind::Empirical;
  s.n_ = sample.n;
  s.sums_ = sample.sums;
  double m = 0.0, v = 0.0;
  for (double x : s.sums_) m += x;
  m /= static_cast<double>(s.sums_.size());
  for (double x : s.sums_) v += (x - m) * (x - m);
  s.scale_ = std::sqrt(std::max(v / static_cast<double>(s.sums_.size()), 1e-300));
  s.noise_floor_ = 1.0 / std::sqrt(static_cast<double>(s.sums_.size()));
  return s;
}

std::string CharFnSource::name() const {
  switch (kind_) {
    case Kind::IIDGeneral:
      return "iid";
    case Kind::Lattice:
      return "lattice";
    case Kind::GaussianSum:
      return "gaussian";
    case Kind::Example1:
      return "example1";
    case Kind::MAq:
      return "ma";
    case Kind::Projection:
      return "projection";
    case Kind::Empirical:
      return "empirical";
  }
  return "unknown";
}

std::complex<double> CharFnSource::operator()(double xi) const {
  switch (kind_) {
    case Kind::GaussianSum:
      return std::exp(-0.5 * gauss_s_ * gauss_s_ * xi * xi);
    case Kind::Empirical: {
      double re = 0.0, im = 0.0;
      for (double s : sums_) {
        re += std::cos(xi * s);
        im += std::sin(xi * s);
      }
      const double M = static_cast<double>(sums_.size());
      return {re / M, im / M};
    }
    case Kind::Example1: {
      const double t = xi / std::sqrt(static_cast<double>(n_));
      if (std::abs(t) > smooth_a_ * smooth_b_) return 0.0;
      const double g = 2.0 * std::numbers::pi * smooth_cb_ * uniform_convolution_density(smooth_b_, t / smooth_a_);
      return component_cf(components_.front(), xi) * (g * g);
    }
    default: {
      std::complex<double> p = 1.0;
      for (const auto& c : components_) {
        p *= component_cf(c, xi);
        if (p == 0.0) break;
      }
      return p;
    }
  }
}

double CharFnSource::decay_point(double tol) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::GaussianSum:
      return std::sqrt(2.0 * std::log(1.0 / tol)) / gauss_s_;
    case Kind::Example1:
      return smooth_a_ * smooth_b_ * std::sqrt(static_cast<double>(n_));
    case Kind::Empirical:
      return inf;
    default:
      break;
  }
  for (const auto& c : components_)
    if (!monotone_modulus(c.law)) return inf;
  double hi = 1.0 / scale_;
  for (int i = 0; i < 200 && modulus(hi) > tol; ++i) hi *= 2.0;
  if (modulus(hi) > tol) return inf;
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (modulus(mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

std::string TailIntegralResult::to_csv() const {
  std::string out = "a,b,x,re,im\n";
  char buf[160];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", a, b, x[i], values[i].real(),
                  values[i].imag());
    out += buf;
  }
  return out;
}

TailIntegralResult tail_integral(const CharFnSource& source, double a, double b, std::span<const double> xs,
                                 double tol) {
  if (!(a > 0.0)) throw InvalidArgument("tail_integral: a must be positive");
  if (b < a) throw InvalidArgument("tail_integral: b must be >= a");
  TailIntegralResult r;
  r.a = a;
  r.b = b;
  r.x.assign(xs.begin(), xs.end());
  r.values.assign(xs.size(), 0.0);
  constexpr double kNegligible = 1e-18;
  const double B = std::min(b, source.decay_point(kNegligible));
  if (B <= a) return r;
  // Frequencies above B carry |phi| <= 1e-18.
  const double tail_bound = B < b ? 2.0 * kNegligible * std::log(b / B) : 0.0;
  std::vector<double> errors(xs.size(), 0.0);
  parallel_for(xs.size(), 0, [&](std::size_t i) {
    const double x = xs[i];
    const auto f = [&](double xi) {
      const std::complex<double> e(std::cos(xi * x), -std::sin(xi * x));
      return (e * source(xi)).imag() * (1.0 - xi / b) / xi;
    };
    const double wavelength = x == 0.0 ? std::numeric_limits<double>::infinity() : std::numbers::pi / std::abs(x);
    const double panel = std::min(wavelength, 4.0 * source.resolution_hint());
    const long panels = static_cast<long>(std::ceil((B - a) / panel));
    const quad::Result q = quad::refine(f, a, B, 0.5 * tol, panels, std::max(panels * 16, 1L << 12));
    r.values[i] = {0.0, 2.0 * q.value};
    errors[i] = 2.0 * q.error;
  });
  for (double e : errors) r.error = std::max(r.error, e);
  r.error += tail_bound;
  return r;
}

double gil_pelaez_cdf(const CharFnSource& source, double x, double tol) {
  const double xi_max = source.decay_point(1e-17);
  if (!std::isfinite(xi_max)) throw InvalidArgument("gil_pelaez_cdf: characteristic function must decay");
  const auto f = [&](double xi) {
    const std::complex<double> e(std::cos(xi * x), -std::sin(xi * x));
    return (e * source(xi)).imag() / xi;
  };
  const double wavelength = x == 0.0 ? std::numeric_limits<double>::infinity() : std::numbers::pi / std::abs(x);
  const double panel = std::min(wavelength, 4.0 * source.resolution_hint());
  const long panels = static_cast<long>(std::ceil(xi_max / panel));
  const quad::Result q = quad::refine(f, 0.0, xi_max, tol, panels, std::max(panels * 64, 1L << 14));
  return 0.5 - q.value / std::numbers::pi;
}

}  // namespace edgelab
