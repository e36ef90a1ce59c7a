#include "edgelab/laws.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "edgelab/error.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

const char* branch_name(GaussGammaLaw::Branch b) {
  switch (b) {
    case GaussGammaLaw::Branch::Positive:
      return "positive";
    case GaussGammaLaw::Branch::Negative:
      return "negative";
    case GaussGammaLaw::Branch::Degenerate:
      return "degenerate";
  }
  return "degenerate";
}

// Number of half-periods tabulated for the smoothing-law CDF.
constexpr int kCdfHalfPeriods = 800;

}  // namespace

double GaussGammaLaw::second_moment() const noexcept {
  if (branch == Branch::Degenerate) return gauss_variance;
  return gauss_variance + gamma_shape / (gamma_rate * gamma_rate);
}

double GaussGammaLaw::third_moment() const noexcept {
  if (branch == Branch::Degenerate) return 0.0;
  return sign() * 2.0 * gamma_shape / (gamma_rate * gamma_rate * gamma_rate);
}

std::string GaussGammaLaw::to_json() const {
  nlohmann::json j = {{"s_sq", s_sq},
                      {"kappa_cu", kappa_cu},
                      {"n", n},
                      {"gauss_variance", gauss_variance},
                      {"gamma_shape", gamma_shape},
                      {"gamma_rate", gamma_rate},
                      {"branch", branch_name(branch)}};
  return j.dump(2);
}

GaussGammaLaw GaussGammaLaw::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GaussGammaLaw law;
  law.s_sq = j.at("s_sq").get<double>();
  law.kappa_cu = j.at("kappa_cu").get<double>();
  law.n = j.at("n").get<long>();
  law.gauss_variance = j.at("gauss_variance").get<double>();
  law.gamma_shape = j.at("gamma_shape").get<double>();
  law.gamma_rate = j.at("gamma_rate").get<double>();
  const auto b = j.at("branch").get<std::string>();
  law.branch = b == "positive" ? Branch::Positive : b == "negative" ? Branch::Negative : Branch::Degenerate;
  return law;
}

GaussGammaLaw fit_gauss_gamma(double s_sq, double kappa_cu, long n, GaussGammaLaw::Split split,
                              double per_summand_shape) {
  if (!(s_sq > 0.0)) throw InvalidArgument("fit_gauss_gamma: s_sq must be positive");
  if (n < 1) throw InvalidArgument("fit_gauss_gamma: n must be positive");
  GaussGammaLaw law;
  law.s_sq = s_sq;
  law.kappa_cu = kappa_cu;
  law.n = n;
  if (kappa_cu == 0.0) {
    law.gauss_variance = s_sq;
    law.branch = GaussGammaLaw::Branch::Degenerate;
    return law;
  }
  const double k = std::abs(kappa_cu);
  double v = 0.0;
  if (split == GaussGammaLaw::Split::EqualVariance) {
    v = 0.5 * s_sq;
    law.gamma_rate = 2.0 * v / k;
    law.gamma_shape = v * law.gamma_rate * law.gamma_rate;
  } else {
    if (!(per_summand_shape > 0.0)) throw InvalidArgument("fit_gauss_gamma: shape must be positive");
    const double shape = static_cast<double>(n) * per_summand_shape;
    v = std::pow(0.5 * k * std::sqrt(shape), 2.0 / 3.0);
    if (v > s_sq) {
      const double limit = 2.0 * std::pow(s_sq, 1.5) / std::sqrt(shape);
      throw Infeasible("fit_gauss_gamma: |kappa_cu| exceeds the representable maximum " +
                           std::to_string(limit),
                       limit);
    }
    law.gamma_shape = shape;
    law.gamma_rate = std::sqrt(shape / v);
  }
  law.gauss_variance = s_sq - v;
  law.branch = kappa_cu > 0.0 ? GaussGammaLaw::Branch::Positive : GaussGammaLaw::Branch::Negative;
  return law;
}

double sample_Ln_one(const GaussGammaLaw& law, Rng& rng) {
  const double z = std::sqrt(law.gauss_variance) * rng.normal();
  if (law.branch == GaussGammaLaw::Branch::Degenerate) return z;
  return z + law.sign() * rng.gamma_centered(law.gamma_shape) / law.gamma_rate;
}

std::vector<double> sample_Ln(const GaussGammaLaw& law, const InnovationStream& stream, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    Rng rng = stream.substream(j).sequential(0);
    out[j] = sample_Ln_one(law, rng);
  }
  return out;
}

double Ln_cdf(const GaussGammaLaw& law, double x) {
  const double sigma = std::sqrt(law.gauss_variance);
  if (law.branch == GaussGammaLaw::Branch::Degenerate) return normal_cdf(x / sigma);
  const double A = law.gamma_shape, B = law.gamma_rate, sgn = law.sign();
  // P(sgn (G - A)/B <= y) for G ~ Gamma(A, 1)
  auto gamma_part = [A, B, sgn](double y) {
    if (sgn > 0.0) {
      const double g = A + B * y;
      return g <= 0.0 ? 0.0 : boost::math::gamma_p(A, g);
    }
    const double g = A - B * y;
    return g <= 0.0 ? 1.0 : boost::math::gamma_q(A, g);
  };
  if (sigma < 1e-300) return gamma_part(x);
  auto integrand = [&](double z) { return normal_pdf(z / sigma) / sigma * gamma_part(x - z); };
  const double lo = -12.0 * sigma, hi = 12.0 * sigma;
  const double kink = std::clamp(x + sgn * A / B, lo, hi);
  const double tol = 2e-9;
  const double value = quad::refine(integrand, lo, kink, tol, 4).value +
                       quad::refine(integrand, kink, hi, tol, 4).value;
  return std::clamp(value, 0.0, 1.0);
}

double sinc_power_integral(int b) {
  if (b < 2 || b % 2 != 0) throw InvalidArgument("sinc_power_integral: b must be even and >= 2");
  double s = 0.0;
  for (int k = 0; 2 * k < b; ++k)
    s += (k % 2 == 0 ? 1.0 : -1.0) * binomial(b, k) * std::pow(b - 2 * k, b - 1);
  return std::numbers::pi * s / (std::pow(2.0, b - 1) * factorial(b - 1));
}

double uniform_convolution_density(int b, double y) noexcept {
  double X = 0.5 * (y + b);
  if (X <= 0.0 || X >= b) return 0.0;
  X = std::min(X, b - X);
  double s = 0.0;
  for (int k = 0; k <= static_cast<int>(std::floor(X)); ++k)
    s += (k % 2 == 0 ? 1.0 : -1.0) * binomial(b, k) * std::pow(X - k, b - 1);
  return 0.5 * s / factorial(b - 1);
}

SmoothingLaw::SmoothingLaw(double a, int b) : a_(a), b_(b) {
  if (!(a > 0.0)) throw InvalidArgument("smoothing law: a must be positive");
  if (b < 6 || b % 2 != 0) throw InvalidArgument("smoothing law: b must be an even integer >= 6");
  c_b_ = 1.0 / sinc_power_integral(b);
}

double SmoothingLaw::density(double x) const noexcept {
  const double u = a_ * x;
  const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
  return c_b_ * a_ * std::pow(std::abs(s), b_);
}

double SmoothingLaw::cf(double t) const noexcept {
  if (std::abs(t) > cf_support()) return 0.0;
  return 2.0 * std::numbers::pi * c_b_ * uniform_convolution_density(b_, t / a_);
}

double SmoothingLaw::cdf(double x) const {
  // Standardized: F(x) = 1/2 + sgn(x) * c_b * int_0^{a|x|} |sin u/u|^b du.
  static thread_local std::vector<double> cache;
  static thread_local int cache_b = 0;
  const double half_period = 0.5 * std::numbers::pi;
  auto f = [this](double u) {
    const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
    return c_b_ * std::pow(std::abs(s), b_);
  };
  if (cache_b != b_) {
    cache.assign(kCdfHalfPeriods + 1, 0.0);
    for (int k = 0; k < kCdfHalfPeriods; ++k)
      cache[k + 1] = cache[k] + quad::gauss_legendre(f, k * half_period, (k + 1) * half_period);
    cache_b = b_;
  }
  const double u = a_ * std::abs(x);
  double mass;
  if (u >= kCdfHalfPeriods * half_period) {
    // mean of |sin|^b over a period times the power-law tail integral
    const double avg = binomial(b_, b_ / 2) / std::pow(2.0, b_);
    mass = 0.5 - c_b_ * avg / ((b_ - 1) * std::pow(u, b_ - 1));
  } else {
    const int k = static_cast<int>(u / half_period);
    mass = cache[k] + quad::gauss_legendre(f, k * half_period, u);
  }
  return x >= 0.0 ? 0.5 + mass : 0.5 - mass;
}

double SmoothingLaw::variance() const {
  const double half_period = 0.5 * std::numbers::pi;
  auto f = [this](double u) {
    const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
    return u * u * c_b_ * std::pow(std::abs(s), b_);
  };
  double s = 0.0;
  for (int k = 0; k < kCdfHalfPeriods; ++k) s += quad::gauss_legendre(f, k * half_period, (k + 1) * half_period);
  const double U = kCdfHalfPeriods * half_period;
  const double avg = binomial(b_, b_ / 2) / std::pow(2.0, b_);
  s += c_b_ * avg / ((b_ - 3) * std::pow(U, b_ - 3));
  return 2.0 * s / (a_ * a_);
}

double SmoothingLaw::sample(Rng& rng) const noexcept {
  // Envelope in u = a x: 1 on [-1, 1], |u|^-b outside. Masses 2 and 2/(b-1).
  const double p_core = (b_ - 1.0) / b_;
  for (;;) {
    const double pick = rng.uniform();
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double u, envelope;
    if (pick < p_core) {
      u = rng.uniform();
      envelope = 1.0;
    } else {
      u = std::pow(rng.uniform(), -1.0 / (b_ - 1.0));
      envelope = std::pow(u, -b_);
    }
    const double s = std::sin(u) / u;
    const double target = std::pow(std::abs(s), b_);
    if (rng.uniform() * envelope <= target) return sign * u / a_;
  }
}

std::vector<double> SmoothingLaw::sample(const InnovationStream& stream, std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    Rng rng = stream.substream(j).sequential(1);
    out[j] = sample(rng);
  }
  return out;
}

std::string SmoothingLaw::spline_json() const {
  // On piece k, X = k + s/2 with s = (t - t_k)/a in [0, 2]; the CF is
  // 2 pi c_b * 1/2 * f_IH(X) with the Irwin-Hall density f_IH.
  nlohmann::json pieces = nlohmann::json::array();
  const int deg = b_ - 1;
  const double scale = 2.0 * std::numbers::pi * c_b_ * 0.5 / factorial(deg);
  for (int k = 0; k < b_; ++k) {
    std::vector<double> coeff(deg + 1, 0.0);
    for (int j = 0; j <= k; ++j) {
      const double sgn = (j % 2 == 0 ? 1.0 : -1.0) * binomial(b_, j);
      for (int m = 0; m <= deg; ++m)
        coeff[m] += sgn * binomial(deg, m) * std::pow(k - j, deg - m) * std::pow(0.5, m);
    }
    for (auto& c : coeff) c *= scale;
    pieces.push_back({{"t_lo", a_ * (2 * k - b_)}, {"t_hi", a_ * (2 * k + 2 - b_)}, {"coefficients", coeff}});
  }
  nlohmann::json j = {{"a", a_}, {"b", b_}, {"c_b", c_b_}, {"variable", "(t - t_lo)/a"}, {"pieces", pieces}};
  return j.dump(2);
}

}  // namespace edgelab
