#include <cmath>

#include "doctest.h"
#include "edgelab/cumulants.hpp"
#include "edgelab/process.hpp"
#include "support.hpp"

using namespace edgelab;
using testing::within;

TEST_SUITE("cumulants") {
  TEST_CASE("finite-n moments of symmetric iid sums") {
    const ProcessSpec spec(IidFamily{InnovationLaw::standard_normal()});
    const auto c = estimate_finite_n(spec, 50, 1000000, InnovationStream(21, 0, spec.law()));
    CHECK(within(c.s_n_sq, 1.0, c.s_n_sq_se));
    CHECK(within(c.kappa_n_cu, 0.0, c.kappa_n_cu_se));
  }

  TEST_CASE("finite-n third moment of exponential sums") {
    const ProcessSpec spec(IidFamily{InnovationLaw::centered_exponential()});
    const auto c = estimate_finite_n(spec, 100, 1000000, InnovationStream(21, 1, spec.law()));
    CHECK(within(c.kappa_n_cu, 0.2, c.kappa_n_cu_se));
  }

  TEST_CASE("finite-n estimate agrees with the exact MA(1) filter") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    const auto est = estimate_finite_n(spec, 256, 400000, InnovationStream(21, 2, spec.law()));
    const auto exact = finite_n_linear(spec.linear_coefficients(), spec.law(), 256);
    CHECK(within(est.s_n_sq, exact.s_n_sq, est.s_n_sq_se));
    CHECK(within(est.kappa_n_cu, exact.kappa_n_cu, est.kappa_n_cu_se));
    // kappa_n^3 -> kappa^3 / sqrt(n) up to O(1/n) edge effects
    const auto lr = longrun_linear(spec.linear_coefficients(), 1.0, 2.0);
    CHECK(std::abs(exact.kappa_n_cu * std::sqrt(256.0) - lr.kappa_cu) < 0.1 * lr.kappa_cu);
  }

  TEST_CASE("closed-form long-run cumulants") {
    const std::vector<double> one = {1.0};
    const auto iid = longrun_linear(one, 1.7, -0.3);
    CHECK(iid.sigma_sq == doctest::Approx(1.7));
    CHECK(iid.kappa_cu == doctest::Approx(-0.3));
    const std::vector<double> ma = {1.0, 0.5};
    const auto m = longrun_linear(ma, 1.0, 2.0);
    CHECK(m.sigma_sq == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(m.kappa_cu == doctest::Approx(6.75).epsilon(1e-14));
    const std::vector<double> telescoping = {1.0, -1.0};
    CHECK(longrun_linear(telescoping, 1.0, 0.0).a3_violation());
  }

  TEST_CASE("exact enumeration matches the closed form") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    const auto brute = longrun_bruteforce(spec, 3, 64, InnovationStream(22, 0, spec.law()), BruteForceMethod::Exact);
    const auto closed = longrun_linear(spec.linear_coefficients(), 1.0, 2.0);
    CHECK(std::abs(brute.sigma_sq - closed.sigma_sq) < 1e-10);
    CHECK(std::abs(brute.kappa_cu - closed.kappa_cu) < 1e-10);
  }

  TEST_CASE("Monte Carlo lag sums of an iid process") {
    const ProcessSpec spec(IidFamily{InnovationLaw::centered_exponential()});
    const auto lr =
        longrun_bruteforce(spec, 3, 200000, InnovationStream(22, 1, spec.law()), BruteForceMethod::MonteCarlo);
    CHECK(within(lr.sigma_sq, 1.0, lr.sigma_sq_se));
    CHECK(within(lr.kappa_cu, 2.0, lr.kappa_cu_se));
  }

  TEST_CASE("doubling map long-run variance") {
    const ProcessSpec spec(DoublingFamily{16});
    const auto lr =
        longrun_bruteforce(spec, 8, 200000, InnovationStream(22, 2, spec.law()), BruteForceMethod::MonteCarlo);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += std::pow(2.0, -i - 1);
    CHECK(within(lr.sigma_sq, s * s, lr.sigma_sq_se));
  }

  TEST_CASE("fourth-moment ratio") {
    const ProcessSpec normal(IidFamily{InnovationLaw::standard_normal()});
    const auto g = check_fourth_moment(normal, 64, 400000, InnovationStream(23, 0, normal.law()));
    CHECK(within(g.r, 0.0, g.se));
    const ProcessSpec rad(IidFamily{InnovationLaw::rademacher()});
    const auto r = check_fourth_moment(rad, 64, 400000, InnovationStream(23, 1, rad.law()));
    CHECK(within(r.r, 2.0, r.se));
    const ProcessSpec ma(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    const auto r64 = check_fourth_moment(ma, 64, 200000, InnovationStream(23, 2, ma.law()));
    const auto r128 = check_fourth_moment(ma, 128, 200000, InnovationStream(23, 3, ma.law()));
    const auto r256 = check_fourth_moment(ma, 256, 200000, InnovationStream(23, 4, ma.law()));
    const double se = std::max({r64.se, r128.se, r256.se});
    CHECK(r256.r <= 2.0 * std::max(r64.r, 3.0 * se));
    CHECK(r128.r <= 2.0 * std::max(r64.r, 3.0 * se));
  }

  TEST_CASE("batch means") {
    std::vector<double> v(1000, 2.0);
    const Estimate e = batch_mean(v, 10);
    CHECK(e.value == 2.0);
    CHECK(e.se == 0.0);
  }
}
