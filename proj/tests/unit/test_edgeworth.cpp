#include <cmath>

#include "doctest.h"
#include "edgelab/edgeworth.hpp"
#include "edgelab/error.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/quadrature.hpp"

using namespace edgelab;
using V = EdgeworthExpansion::Variant;

TEST_SUITE("edgeworth") {
  TEST_CASE("symmetric expansion is the normal law") {
    const EdgeworthExpansion e(1.0, 0.0, 100);
    CHECK(e.cdf(0.0) == 0.5);
    const EdgeworthExpansion w(1.3, 0.0, 100);
    for (double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
      CHECK(w.cdf(x) == doctest::Approx(normal_cdf(x / 1.3)).epsilon(1e-15));
      CHECK(w.density(x) == doctest::Approx(normal_pdf(x / 1.3) / 1.3).epsilon(1e-15));
    }
  }

  TEST_CASE("skew correction at the origin") {
    // c = kappa/6 as written; kappa/(6 s^3) standardized. Both enter as c * phi(0).
    const EdgeworthExpansion aw(1.0, 0.2, 1, V::AsWritten);
    CHECK(aw.cdf(0.0) == doctest::Approx(0.5 + 0.2 / 6.0 * kInvSqrt2Pi).epsilon(1e-15));
    CHECK(aw.cdf(0.0) - 0.5 == doctest::Approx(0.0133008).epsilon(1e-5));
    const EdgeworthExpansion st(2.0, 0.2, 1, V::Standardized);
    CHECK(st.correction_coefficient() == doctest::Approx(0.2 / (6.0 * 8.0)));
    const EdgeworthExpansion aw2(2.0, 0.2, 1, V::AsWritten);
    CHECK(aw2.correction_coefficient() == doctest::Approx(0.2 / 6.0));
  }

  TEST_CASE("density is the derivative of the cdf and integrates to one") {
    const EdgeworthExpansion e(1.4, 0.35, 1);
    const double h = 1e-5;
    for (double x : {-3.0, -1.0, 0.2, 2.5})
      CHECK(e.density(x) == doctest::Approx((e.cdf(x + h) - e.cdf(x - h)) / (2 * h)).epsilon(1e-7));
    const auto total = quad::refine([&](double x) { return e.density(x); }, -20.0, 20.0, 1e-12);
    CHECK(total.value == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("variant names") {
    CHECK(variant_from_string(to_string(V::AsWritten)) == V::AsWritten);
    CHECK(variant_from_string(to_string(V::Standardized)) == V::Standardized);
    CHECK_THROWS_AS(variant_from_string("other"), InvalidArgument);
  }

  TEST_CASE("test functions") {
    CHECK_THROWS_AS(TestFunction::from_name("nope"), InvalidArgument);
    const TestFunction h = TestFunction::from_name("holder");
    CHECK(h(h.center) == 1.0);
    CHECK(h(h.center + 2.0 * h.width) == 0.0);
    CHECK(h.breakpoints().size() >= 2);
    const TestFunction bump = TestFunction::from_name("bump");
    CHECK(bump(bump.center + bump.width) == 0.0);
    CHECK(bump(bump.center) == doctest::Approx(std::exp(-1.0)));
  }

  TEST_CASE("integrals against the expansion") {
    const EdgeworthExpansion e(1.0, 0.0, 100);
    TestFunction c = TestFunction::from_name("cos");
    CHECK(integrate_against(c, e) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
    TestFunction s = TestFunction::from_name("sin");
    CHECK(std::abs(integrate_against(s, e)) < 1e-12);
    // the skew term adds kappa/(6 sqrt n) * int sin dH3-type correction: E sin under Psi
    const EdgeworthExpansion k(1.0, 0.6, 1, V::Standardized);
    const double c3 = k.correction_coefficient();
    // d/dx[(1 - x^2) phi(x)] = (x^3 - 3x) phi(x); int sin(x) (x^3 - 3x) phi dx = -e^{-1/2}
    CHECK(integrate_against(s, k) == doctest::Approx(-c3 * std::exp(-0.5)).epsilon(1e-8));
  }

  TEST_CASE("weak gaps for normal sums") {
    const ProcessSpec spec(IidFamily{InnovationLaw::standard_normal()});
    const auto sample = simulate_sample_set(spec, InnovationStream(31, 0, spec.law()), 100, 200000);
    const EdgeworthExpansion e(1.0, 0.0, 100);
    const WeakGap gs = weak_gap(TestFunction::from_name("sin"), sample, e);
    CHECK(gs.gap <= 3.0 * gs.se);
    const WeakGap gc = weak_gap(TestFunction::from_name("cos"), sample, e);
    CHECK(gc.gap <= 3.0 * gc.se);
    CHECK(std::abs(gc.sample_mean - std::exp(-0.5)) <= 3.0 * gc.se);
    CHECK(gc.expansion_value == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  }
}
