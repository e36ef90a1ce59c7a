#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edgelab/charfn.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/process.hpp"
#include "edgelab/quadrature.hpp"

using namespace edgelab;

TEST_SUITE("charfn") {
  TEST_CASE("every source equals one at the origin") {
    const std::vector<double> a = {1.0, 0.5};
    const std::vector<CharFnSource> sources = {
        CharFnSource::lattice(64),
        CharFnSource::gaussian(1.3),
        CharFnSource::iid(InnovationLaw::centered_exponential(), 64),
        CharFnSource::example1(64, 0.02, 6),
        CharFnSource::ma(a, InnovationLaw::uniform(), 64),
    };
    for (const auto& s : sources) {
      CHECK(std::abs(s(0.0) - 1.0) < 1e-15);
    }
  }

  TEST_CASE("lattice source is a cosine power") {
    const long n = 16;
    const auto src = CharFnSource::lattice(n);
    for (double xi : {0.3, 1.7, 5.0, 12.0})
      CHECK(src(xi).real() == doctest::Approx(std::pow(std::cos(xi / 4.0), 16)).epsilon(1e-13));
    const ProcessSpec spec(IidFamily{InnovationLaw::rademacher()});
    const auto sample = simulate_sample_set(spec, InnovationStream(41, 0, spec.law()), n, 1000000);
    const auto emp = CharFnSource::empirical(sample);
    for (double xi : {0.3, 1.7, 5.0})
      CHECK(std::abs(emp(xi) - src(xi)) <= 3.0 / std::sqrt(1e6));
    CHECK(emp.noise_floor() == doctest::Approx(1e-3));
  }

  TEST_CASE("example1 source vanishes beyond its support") {
    const long n = 1024;
    const double a = 0.25 / 12.0;
    const int b = 6;
    const auto src = CharFnSource::example1(n, a, b);
    const double edge = a * b * std::sqrt(static_cast<double>(n));
    for (double f : {1.0 + 1e-12, 1.001, 2.0, 50.0}) {
      CHECK(src(f * edge) == std::complex<double>(0.0, 0.0));
      CHECK(src(-f * edge) == std::complex<double>(0.0, 0.0));
    }
    CHECK(std::abs(src(0.5 * edge)) > 0.0);
  }

  TEST_CASE("empty frequency band") {
    const std::vector<double> xs = {-1.0, 0.0, 2.0};
    const auto r = tail_integral(CharFnSource::gaussian(1.0), 3.0, 3.0, xs);
    for (const auto& v : r.values) CHECK(v == std::complex<double>(0.0, 0.0));
  }

  TEST_CASE("tail integral of example1 is identically zero") {
    const long n = 1024;
    const double T = 0.25 * std::sqrt(static_cast<double>(n));
    const auto src = CharFnSource::example1(n, 0.25 / 12.0, 6);
    std::vector<double> xs;
    for (int i = -40; i <= 40; ++i) xs.push_back(0.2 * i);
    for (double b : {2.0 * T, 8.0 * T, 100.0 * T}) {
      const auto r = tail_integral(src, T, b, xs);
      for (const auto& v : r.values) CHECK(std::abs(v) <= 1e-10);
    }
  }

  TEST_CASE("gaussian tail integral against direct quadrature") {
    const double a = 5.0, b = 10.0;
    const std::vector<double> xs = {0.0, 0.3, 1.1};
    const auto r = tail_integral(CharFnSource::gaussian(1.0), a, b, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      // symmetric real CF: T(x) = -2i int_a^b sin(xi x) e^{-xi^2/2} (1 - xi/b) / xi dxi
      const auto f = [&](double xi) { return std::sin(xi * x) * std::exp(-0.5 * xi * xi) * (1.0 - xi / b) / xi; };
      const double oracle = -2.0 * quad::refine(f, a, b, 1e-15, 64).value;
      CHECK(std::abs(r.values[i] - std::complex<double>(0.0, oracle)) <= 1e-10);
    }
    const auto env = quad::refine([](double xi) { return std::exp(-0.5 * xi * xi) / xi; }, a, b, 1e-16).value;
    for (const auto& v : r.values) CHECK(std::abs(v) <= 2.0 * env);
  }

  TEST_CASE("characteristic of example1 is only the cutoff term") {
    const long n = 1024;
    const double T = 0.25 * std::sqrt(static_cast<double>(n));
    const auto src = CharFnSource::example1(n, 0.25 / 12.0, 6);
    CharacteristicOptions opt;
    opt.B_max = 16.0 * T;
    const auto r = characteristic(src, T, opt);
    CHECK(r.value <= 1.0 / opt.B_max + 1e-10);
  }

  TEST_CASE("gaussian characteristic follows the cutoff") {
    const long n = 1024;
    const double T = 0.25 * std::sqrt(static_cast<double>(n));
    CharacteristicOptions opt;
    opt.B_max = 16.0 * std::sqrt(static_cast<double>(n));
    const auto r = characteristic(CharFnSource::gaussian(1.0), T, opt);
    CHECK(r.value <= 1.0 / opt.B_max + 1e-8);
  }

  TEST_CASE("lattice characteristic does not decay") {
    for (long n : {256L, 1024L}) {
      const double root_n = std::sqrt(static_cast<double>(n));
      CharacteristicOptions opt;
      opt.B_max = 16.0 * root_n;
      const auto r = characteristic(CharFnSource::lattice(n), 0.25 * root_n, opt);
      CHECK(root_n * r.value >= 0.1);
      CHECK(root_n * r.value <= 10.0);
    }
  }

  TEST_CASE("integrated characteristic bounds") {
    const long n = 256;
    const double T = 0.25 * std::sqrt(static_cast<double>(n));
    const double tau = 4.0 * std::sqrt(std::log(static_cast<double>(n)));
    CharacteristicOptions opt;
    opt.B_max = 16.0 * std::sqrt(static_cast<double>(n));
    const auto src = CharFnSource::iid(InnovationLaw::centered_exponential(), n);
    const auto c = characteristic(src, T, opt);
    const auto i = integrated_characteristic(src, T, tau, opt);
    CHECK(i.value <= 2.0 * tau * c.value + 1e-9);

    const auto ex = CharFnSource::example1(n, 0.25 / 12.0, 6);
    const auto ie = integrated_characteristic(ex, T, tau, opt);
    CHECK(ie.value == doctest::Approx(2.0 * tau / opt.B_max).epsilon(1e-9));

    CharacteristicOptions forced;
    forced.b_grid = {T};
    const auto ia = integrated_characteristic(src, T, tau, forced);
    CHECK(ia.value == 2.0 * tau / T);
  }

  TEST_CASE("Fourier inversion recovers known laws") {
    const auto g = CharFnSource::gaussian(1.7);
    for (double x : {-3.0, -0.4, 0.0, 1.2, 4.0})
      CHECK(gil_pelaez_cdf(g, x) == doctest::Approx(normal_cdf(x / 1.7)).epsilon(1e-9));
    // eight centred exponentials: (Gamma(8) - 8) / sqrt(8)
    const auto e = CharFnSource::iid(InnovationLaw::centered_exponential(), 8);
    for (double x : {-1.5, 0.0, 1.5}) {
      const double y = x * std::sqrt(8.0) + 8.0;
      double partial = 0.0, term = 1.0;
      for (int k = 0; k < 8; ++k) {
        partial += term;
        term *= y / (k + 1);
      }
      CHECK(gil_pelaez_cdf(e, x) == doctest::Approx(1.0 - std::exp(-y) * partial).epsilon(1e-8));
    }
  }

  TEST_CASE("geometric grid") {
    const auto g = geometric_grid(2.0, 32.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 2.0);
    CHECK(g.back() == doctest::Approx(32.0));
    CHECK(g[2] == doctest::Approx(8.0));
  }
}
