#include <cmath>

#include "doctest.h"
#include "edgelab/dependence.hpp"
#include "edgelab/error.hpp"
#include "support.hpp"

using namespace edgelab;
using testing::within;

namespace {

ProcessSpec garch_spec() {
  GarchFamily g;
  g.alpha = {0.3};
  g.beta = {0.2};
  return ProcessSpec(g);
}

}  // namespace

TEST_SUITE("dependence") {
  TEST_CASE("iid coefficients vanish exactly") {
    for (const auto& law : {InnovationLaw::standard_normal(), InnovationLaw::centered_exponential()}) {
      const ProcessSpec spec{IidFamily{law}};
      for (long k = 1; k <= 3; ++k)
        for (double p : {2.0, 3.0}) {
          const InnovationStream s(81, static_cast<std::uint64_t>(k), law);
          CHECK(estimate_lambda(spec, k, p, 500, s).value == 0.0);
          CHECK(estimate_theta(spec, k, p, 500, s).value == 0.0);
        }
    }
  }

  TEST_CASE("MA(1) coefficient") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5}, InnovationLaw::rademacher()});
    const auto e = estimate_lambda(spec, 1, 2.0, 100000, InnovationStream(82, 0, spec.law()));
    CHECK(within(e.value, 0.5 * std::sqrt(2.0), e.se));
    CHECK(estimate_lambda(spec, 2, 2.0, 1000, InnovationStream(82, 1, spec.law())).value == 0.0);
  }

  TEST_CASE("linear coefficients follow the coupling algebra") {
    std::vector<double> a(10);
    for (int i = 0; i < 10; ++i) a[i] = std::pow(0.7, i);
    const ProcessSpec spec(LinearFamily{a, InnovationLaw::standard_normal()});
    for (long k : {1L, 3L, 6L}) {
      double tail = 0.0;
      for (std::size_t i = k; i < a.size(); ++i) tail += a[i] * a[i];
      const auto e = estimate_lambda(spec, k, 2.0, 40000, InnovationStream(83, k, spec.law()));
      // squared norm within 3 SE (delta method: se of the square is 2 value se)
      CHECK(within(e.value * e.value, 2.0 * tail, 2.0 * e.value * e.se));
    }
  }

  TEST_CASE("single swap against tail swap and monotonicity in p") {
    const std::vector<ProcessSpec> specs = {
        ProcessSpec(LinearFamily{{1.0, 0.5, 0.25}, InnovationLaw::centered_exponential()}),
        garch_spec(),
        ProcessSpec(DoublingFamily{16}),
    };
    for (const auto& spec : specs) {
      for (long k : {1L, 2L}) {
        const InnovationStream s(84, static_cast<std::uint64_t>(k), spec.law());
        const auto la = estimate_lambda(spec, k, 2.0, 20000, s);
        const auto th = estimate_theta(spec, k, 2.0, 20000, s.substream(99));
        CHECK(th.value <= 2.0 * la.value + 3.0 * std::hypot(th.se, 2.0 * la.se));
        const auto l3 = estimate_lambda(spec, k, 3.0, 20000, s);
        CHECK(la.value <= l3.value + 3.0 * std::hypot(la.se, l3.se));
      }
    }
  }

  TEST_CASE("GARCH coefficients decay geometrically") {
    const auto prof = dependence_profile(garch_spec(), 2.0, 12, 20000, InnovationStream(85, 0, InnovationLaw::standard_normal()));
    CHECK(prof.decay_slope < 0.0);
    CHECK(prof.decay_r2 >= 0.9);
    CHECK(prof.partial.size() == 3);
  }

  TEST_CASE("assumption audit verdicts") {
    const ProcessSpec normal(IidFamily{InnovationLaw::standard_normal()});
    const auto r = assumption_report(normal, 2.0, 8, 16, 20000, InnovationStream(86, 0, normal.law()));
    CHECK(r.all_pass());
    CHECK(within(r.longrun.sigma_sq, 1.0, r.longrun.sigma_sq_se));
    for (std::size_t i = 1; i < r.profile.lambda.size(); ++i) CHECK(r.profile.lambda[i].value == 0.0);

    const ProcessSpec tele(LinearFamily{{1.0, -1.0}, InnovationLaw::standard_normal()});
    const auto t = assumption_report(tele, 2.0, 8, 16, 20000, InnovationStream(86, 1, tele.law()));
    CHECK_FALSE(t.a3_pass);

    const ProcessSpec dbl(DoublingFamily{16});
    const auto d = assumption_report(dbl, 3.0, 12, 16, 20000, InnovationStream(86, 2, dbl.law()));
    CHECK(d.all_pass());
    CHECK(d.to_json().find("\"a2\"") != std::string::npos);
    CHECK(!d.to_text().empty());
  }

  TEST_CASE("tail probabilities") {
    const ProcessSpec normal(IidFamily{InnovationLaw::standard_normal()});
    const long n = 256;
    const double base = std::sqrt(n * std::log(static_cast<double>(n)));
    const std::vector<double> xs = {2.0 * base, 3.0 * base};
    const auto rows = tail_check(normal, n, 20000, xs, InnovationStream(87, 0, normal.law()));
    for (const auto& r : rows) {
      CHECK(r.below);
      CHECK(r.wilson_lo <= r.p_hat);
      CHECK(r.wilson_hi >= r.p_hat);
    }
    const std::vector<double> low = {0.5 * base};
    CHECK_THROWS_AS(tail_check(normal, n, 1000, low, InnovationStream(87, 1, normal.law())), InvalidArgument);
  }

  TEST_CASE("Wilson interval") {
    const auto [lo, hi] = wilson_interval(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi > 0.0);
    const auto [a, b] = wilson_interval(50, 100);
    CHECK(a == doctest::Approx(1.0 - b));
    CHECK(a < 0.5);
  }

  TEST_CASE("m-dependent approximation gap") {
    std::vector<double> a(30);
    for (int i = 0; i < 30; ++i) a[i] = std::pow(0.7, i);
    const ProcessSpec spec(LinearFamily{a, InnovationLaw::standard_normal()});
    const long n = 1024;
    for (long m : {4L, 8L}) {
      const auto g = truncation_gap(spec, n, m, 2000, InnovationStream(88, m, spec.law()));
      double tail = 0.0, tail_sq = 0.0;
      for (std::size_t i = m + 1; i < a.size(); ++i) {
        tail += a[i];
        tail_sq += a[i];
      }
      CHECK(g.value - 3.0 * g.se <= 2.0 * std::sqrt(static_cast<double>(n)) * tail);
      // interior terms contribute n (sum_{i>m} a_i)^2; edges are lower order
      CHECK(g.value == doctest::Approx(std::sqrt(static_cast<double>(n)) * tail_sq).epsilon(0.1));
    }
    CHECK_THROWS_AS(truncation_gap(spec, n, 4, 10, InnovationStream(88, 0, spec.law())), InvalidArgument);
  }
}
