#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "edgelab/edgeworth.hpp"
#include "edgelab/error.hpp"
#include "edgelab/highdim.hpp"
#include "edgelab/normal.hpp"
#include "support.hpp"

using namespace edgelab;
using testing::moment_se;
using testing::within;

namespace {

double binom_pmf(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
}

/// Brute-force sup distance over all atoms of sum_g w_g B_g / sqrt(n).
double brute_kolmogorov(const std::vector<RademacherGroup>& groups, long n, const Cdf& G) {
  std::vector<std::pair<double, double>> atoms = {{0.0, 1.0}};
  for (const auto& g : groups) {
    const int m = static_cast<int>(g.count * n);
    std::vector<std::pair<double, double>> next;
    for (const auto& [x, p] : atoms)
      for (int k = 0; k <= m; ++k)
        next.push_back({x + g.weight * (2.0 * k - m) / std::sqrt(static_cast<double>(n)), p * binom_pmf(m, k)});
    atoms.swap(next);
  }
  std::sort(atoms.begin(), atoms.end());
  double F = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < atoms.size();) {
    const double x = atoms[i].first;
    const double before = F;
    while (i < atoms.size() && atoms[i].first == x) F += atoms[i++].second;
    worst = std::max({worst, std::abs(before - G(x)), std::abs(F - G(x))});
  }
  return worst;
}

}  // namespace

TEST_SUITE("highdim") {
  TEST_CASE("constructed theta sits inside the band") {
    const auto spec = build_theta(256, 4096, 0.5, 2.0, 0.05, 1.0, 33, 32);
    for (long n = 256; n <= 4096; n *= 2) {
      const auto [lo, hi] = tail_band(n, 0.5, 2.0, 0.05, 1.0);
      CHECK(spec.tail_mass() >= lo);
      CHECK(spec.tail_mass() <= hi);
    }
    CHECK(spec.I.size() == 32);
    CHECK(spec.theta.back() == 1.0);
    CHECK_NOTHROW(spec.validate());
  }

  TEST_CASE("empty band is infeasible") {
    CHECK_THROWS_AS(build_theta(256, 1024, 3.0, 2.0, 1.0, 1.0, 4, 2), Infeasible);
    HighDimSpec spec = build_theta(256, 4096, 0.5, 2.0, 0.05, 1.0, 3, 2);
    spec.theta[0] = 1.0;
    CHECK_THROWS_AS(spec.validate(), Infeasible);
  }

  TEST_CASE("a single coordinate is the scalar process") {
    HighDimSpec spec;
    spec.d = 1;
    spec.I = {0};
    spec.theta = {1.0};
    spec.coordinates = {ProcessSpec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()})};
    const InnovationStream s(71, 0, InnovationLaw::rademacher());
    const auto proj = simulate_projection(spec, s, 64, 500);
    const auto scalar = simulate_sample_set(spec.coordinates[0], coordinate_stream(s, 0), 64, 500);
    CHECK(proj.sums == scalar.sums);
  }

  TEST_CASE("gaussian coordinates give a gaussian projection") {
    HighDimSpec spec;
    spec.d = 5;
    spec.I = {0, 1};
    spec.theta = {0.3, -0.2, 1.0, 0.5, -0.7};
    spec.coordinates.assign(5, ProcessSpec(IidFamily{InnovationLaw::standard_normal()}));
    const auto proj = simulate_projection(spec, InnovationStream(71, 1, InnovationLaw::uniform()), 50, 100000);
    const auto [m2, se] = moment_se(proj.sums, 2);
    CHECK(within(m2, spec.theta_norm_sq(), se));
  }

  TEST_CASE("independent blocks add their cumulants") {
    HighDimSpec spec;
    spec.d = 3;
    spec.I = {0, 1};
    spec.theta = {0.6, 0.6, 0.8};
    const ProcessSpec rad(IidFamily{InnovationLaw::rademacher()});
    const ProcessSpec ma(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    spec.coordinates = {rad, rad, ma};
    const long n = 64;
    const auto proj = simulate_projection(spec, InnovationStream(71, 2, InnovationLaw::uniform()), n, 400000);
    const auto exact = finite_n_linear(ma.linear_coefficients(), ma.law(), n);
    const double s2 = 0.36 + 0.36 + 0.64 * exact.s_n_sq;
    const double k3 = 0.512 * exact.kappa_n_cu;
    const auto c = cumulants_from_sample(proj);
    CHECK(within(c.s_n_sq, s2, c.s_n_sq_se));
    CHECK(within(c.kappa_n_cu, k3, c.kappa_n_cu_se));
  }

  TEST_CASE("exact Rademacher laws against enumeration") {
    const EdgeworthExpansion e(1.0, 0.0, 1);
    const Cdf G = [&](double x) { return e.cdf(x); };
    const long n = 12;
    const std::vector<RademacherGroup> one = {{1.0, 1}};
    CHECK(exact_rademacher_kolmogorov(one, n, G).value == doctest::Approx(brute_kolmogorov(one, n, G)).epsilon(1e-12));
    const std::vector<RademacherGroup> two = {{0.3, 3}, {1.0, 1}};
    const double s = std::sqrt(3 * 0.09 + 1.0);
    const Cdf Gs = [&](double x) { return normal_cdf(x / s); };
    const auto r = exact_rademacher_kolmogorov(two, n, Gs);
    CHECK(r.value == doctest::Approx(brute_kolmogorov(two, n, Gs)).epsilon(1e-10));
    CHECK(r.uncertainty < 1e-9);
  }

  TEST_CASE("rademacher grouping") {
    const auto spec = build_theta(256, 4096, 0.5, 2.0, 0.05, 1.0, 33, 32);
    const auto g = rademacher_groups(spec);
    REQUIRE(g.size() == 2);
    long total = 0;
    for (const auto& x : g) total += x.count;
    CHECK(total == 33);
    HighDimSpec other = spec;
    other.coordinates[5] = ProcessSpec(IidFamily{InnovationLaw::standard_normal()});
    CHECK(rademacher_groups(other).empty());
  }

  TEST_CASE("tail block structure") {
    const auto spec = build_theta(256, 4096, 0.5, 2.0, 0.05, 1.0, 9, 8);
    const InnovationStream s(72, 0, InnovationLaw::rademacher());
    const auto cross = block_cross_covariance(spec, s, 64, 4000, 2);
    REQUIRE(cross.size() == 3);
    for (const auto& e : cross) CHECK(std::abs(e.value) <= 4.5 * e.se);
    const auto mds = martingale_difference_check(spec, s.substream(1), 64, 4000);
    CHECK(mds.size() == 7);
    for (const auto& e : mds) CHECK(std::abs(e.value) <= 4.5 * e.se);
  }

  TEST_CASE("configuration round trip") {
    const auto spec = build_theta(256, 4096, 0.5, 2.0, 0.05, 1.0, 10, 4, 0.5);
    const auto back = HighDimSpec::from_document(toml::parse(spec.to_toml()));
    CHECK(back.I == spec.I);
    CHECK(back.theta == spec.theta);
    CHECK(back.d == spec.d);
    CHECK(back.to_toml() == spec.to_toml());
  }
}
