#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edgelab/error.hpp"
#include "edgelab/laws.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/quadrature.hpp"
#include "support.hpp"

using namespace edgelab;
using testing::moment_se;
using testing::within;

TEST_SUITE("laws") {
  TEST_CASE("zero skew gives a pure Gaussian") {
    const auto L = fit_gauss_gamma(1.5, 0.0, 100);
    CHECK(L.branch == GaussGammaLaw::Branch::Degenerate);
    CHECK(L.gauss_variance == doctest::Approx(1.5));
    for (double x : {-2.0, 0.0, 0.9}) CHECK(std::abs(Ln_cdf(L, x) - normal_cdf(x / std::sqrt(1.5))) <= 1e-10);
  }

  TEST_CASE("closed-form moments are matched") {
    for (double k : {0.2, -0.2, 1.5}) {
      const auto L = fit_gauss_gamma(1.0, k, 100);
      CHECK(L.second_moment() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(L.third_moment() == doctest::Approx(k).epsilon(1e-12));
    }
  }

  TEST_CASE("sampled moments") {
    const auto L = fit_gauss_gamma(1.0, 0.2, 100);
    const auto x = sample_Ln(L, InnovationStream(51, 0, InnovationLaw::uniform()), 1000000);
    const auto [m1, se1] = moment_se(x, 1);
    const auto [m2, se2] = moment_se(x, 2);
    const auto [m3, se3] = moment_se(x, 3);
    CHECK(within(m1, 0.0, se1));
    CHECK(within(m2, 1.0, se2));
    CHECK(within(m3, 0.2, se3));
  }

  TEST_CASE("negative skew reflects the law") {
    const auto P = fit_gauss_gamma(1.0, 0.3, 100);
    const auto N = fit_gauss_gamma(1.0, -0.3, 100);
    CHECK(N.branch == GaussGammaLaw::Branch::Negative);
    CHECK(N.gamma_shape == P.gamma_shape);
    CHECK(N.gamma_rate == P.gamma_rate);
    for (double x : {-1.0, 0.0, 0.5}) CHECK(Ln_cdf(N, x) == doctest::Approx(1.0 - Ln_cdf(P, -x)).epsilon(1e-7));
    const auto xs = sample_Ln(N, InnovationStream(51, 1, InnovationLaw::uniform()), 200000);
    const auto [m3, se3] = moment_se(xs, 3);
    CHECK(m3 < 0.0);
    CHECK(within(m3, -0.3, se3));
  }

  TEST_CASE("degenerate sampler passes a KS band") {
    const auto L = fit_gauss_gamma(1.0, 0.0, 1);
    const std::size_t M = 100000;
    const auto xs = sample_Ln(L, InnovationStream(51, 2, InnovationLaw::uniform()), M);
    const auto k = kolmogorov(xs, [](double x) { return normal_cdf(x); });
    CHECK(k.value <= 1.36 / std::sqrt(static_cast<double>(M)));
  }

  TEST_CASE("different seeds give different but compatible draws") {
    const auto L = fit_gauss_gamma(1.0, 0.4, 50);
    const auto a = sample_Ln(L, InnovationStream(1, 7, InnovationLaw::uniform()), 200000);
    const auto b = sample_Ln(L, InnovationStream(2, 7, InnovationLaw::uniform()), 200000);
    CHECK(a != b);
    for (int k = 1; k <= 3; ++k) {
      const auto [ma, sa] = moment_se(a, k);
      const auto [mb, sb] = moment_se(b, k);
      CHECK(std::abs(ma - mb) <= 3.0 * std::hypot(sa, sb));
    }
  }

  TEST_CASE("comparison-law cdf") {
    const auto L = fit_gauss_gamma(1.0, 0.5, 64);
    double prev = 0.0;
    for (int i = -60; i <= 60; ++i) {
      const double f = Ln_cdf(L, 0.1 * i);
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
    CHECK(Ln_cdf(L, -12.0) < 1e-7);
    CHECK(Ln_cdf(L, 14.0) > 1.0 - 1e-7);
    const std::size_t M = 1000000;
    auto xs = sample_Ln(L, InnovationStream(51, 3, InnovationLaw::uniform()), M);
    std::sort(xs.begin(), xs.end());
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double x = -4.0 + 0.08 * i;
      const double emp = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) / M;
      worst = std::max(worst, std::abs(emp - Ln_cdf(L, x)));
    }
    CHECK(worst <= 4.0 / std::sqrt(static_cast<double>(M)));
  }

  TEST_CASE("json round trip") {
    const auto L = fit_gauss_gamma(1.2, -0.7, 30);
    const auto back = GaussGammaLaw::from_json(L.to_json());
    CHECK(back.gamma_shape == L.gamma_shape);
    CHECK(back.gamma_rate == L.gamma_rate);
    CHECK(back.gauss_variance == L.gauss_variance);
    CHECK(back.branch == L.branch);
  }

  TEST_CASE("smoothing law normalisation") {
    const double c6 = 20.0 / (11.0 * std::numbers::pi);
    CHECK(SmoothingLaw(1.0, 6).c_b() == doctest::Approx(c6).epsilon(1e-12));
    CHECK(sinc_power_integral(6) == doctest::Approx(11.0 * std::numbers::pi / 20.0).epsilon(1e-14));
    // independent check by quadrature of (sin u / u)^6 over half periods
    double s = 0.0;
    const double h = 0.5 * std::numbers::pi;
    for (int k = 0; k < 4000; ++k)
      s += quad::composite([](double u) { return u == 0.0 ? 1.0 : std::pow(std::sin(u) / u, 6); }, k * h, (k + 1) * h, 2);
    CHECK(std::abs(1.0 / (2.0 * s) - c6) < 1e-8);
  }

  TEST_CASE("smoothing law transform") {
    const SmoothingLaw g(1.0, 6);
    CHECK(std::abs(g.cf(0.0) - 1.0) <= 1e-8);
    for (double t : {6.0 + 1e-9, 6.5, 9.0, 100.0}) {
      CHECK(std::abs(g.cf(t)) <= 1e-8);
      CHECK(std::abs(g.cf(-t)) <= 1e-8);
    }
    // transform of the density by quadrature at interior points
    for (double t : {0.5, 2.0, 4.5}) {
      double s = 0.0;
      const double h = 0.5 * std::numbers::pi;
      for (int k = 0; k < 800; ++k)
        s += quad::composite([&](double x) { return std::cos(t * x) * g.density(x); }, k * h, (k + 1) * h, 4);
      CHECK(g.cf(t) == doctest::Approx(2.0 * s).epsilon(1e-6));
    }
    CHECK(g.spline_json().find("coefficients") != std::string::npos);
  }

  TEST_CASE("smoothing law sampler") {
    const SmoothingLaw g(0.5, 6);
    const std::size_t M = 100000;
    const auto xs = g.sample(InnovationStream(52, 0, InnovationLaw::uniform()), M);
    const auto k = kolmogorov(xs, [&](double x) { return g.cdf(x); });
    CHECK(k.value <= 1.36 * std::sqrt(2.0 / M));
    const auto [m1, se1] = moment_se(xs, 1);
    CHECK(within(m1, 0.0, se1));
    const auto [m2, se2] = moment_se(xs, 2);
    CHECK(within(m2, g.variance(), se2));
    CHECK(g.density(1.3) == g.density(-1.3));
    CHECK(g.density(0.0) == doctest::Approx(g.c_b() * g.a()));
  }

  TEST_CASE("smoothing law parameters are validated") {
    CHECK_THROWS_AS(SmoothingLaw(1.0, 7), InvalidArgument);
    CHECK_THROWS_AS(SmoothingLaw(1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(SmoothingLaw(-1.0, 6), InvalidArgument);
  }

  TEST_CASE("uniform convolution density") {
    CHECK(uniform_convolution_density(1, 0.3) == doctest::Approx(0.5));
    CHECK(uniform_convolution_density(2, 0.0) == doctest::Approx(0.5));
    CHECK(uniform_convolution_density(2, 2.5) == 0.0);
    const auto total = quad::refine([](double y) { return uniform_convolution_density(6, y); }, -6.0, 6.0, 1e-12);
    CHECK(total.value == doctest::Approx(1.0).epsilon(1e-10));
  }
}
