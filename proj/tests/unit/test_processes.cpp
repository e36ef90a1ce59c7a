#include <cmath>

#include "doctest.h"
#include "edgelab/cumulants.hpp"
#include "edgelab/error.hpp"
#include "edgelab/laws.hpp"
#include "edgelab/process.hpp"
#include "support.hpp"

using namespace edgelab;
using testing::moment_se;
using testing::within;

TEST_SUITE("processes") {
  TEST_CASE("innovation streams are deterministic") {
    const InnovationStream s(1, 0, InnovationLaw::rademacher());
    CHECK(gen_innovations(s, 4) == gen_innovations(s, 4));
    const InnovationStream other(2, 0, InnovationLaw::rademacher());
    CHECK(gen_innovations(s, 64) != gen_innovations(other, 64));
  }

  TEST_CASE("rademacher draws are signs") {
    const auto v = gen_innovations(InnovationStream(7, 3, InnovationLaw::rademacher()), 1000000);
    long plus = 0;
    for (double x : v) {
      REQUIRE((x == 1.0 || x == -1.0));
      plus += x > 0;
    }
    CHECK(std::abs(plus - 500000) < 5 * 500);
  }

  TEST_CASE("centered exponential moments") {
    const auto v = gen_innovations(InnovationStream(11, 0, InnovationLaw::centered_exponential()), 1000000);
    const auto [m1, se1] = moment_se(v, 1);
    CHECK(std::abs(m1) <= 3e-3);
    const auto [m3, se3] = moment_se(v, 3);
    CHECK(within(m3, 2.0, se3));
    (void)se1;
  }

  TEST_CASE("stream substreams and lanes are distinct") {
    const InnovationStream s(5, 9, InnovationLaw::standard_normal());
    CHECK(s.substream(0).value(0) != s.substream(1).value(0));
    CHECK(s.lane(InnovationStream::kPast).value(0) != s.value(0));
    const InnovationStream r(5, 9, InnovationLaw::rademacher());
    double direct = 0.0;
    for (std::uint64_t i = 3; i < 3 + 1000; ++i) direct += r.value(i);
    CHECK(r.sum(3, 1000) == direct);
  }

  TEST_CASE("iid normal sums have unit variance") {
    const ProcessSpec spec(IidFamily{InnovationLaw::standard_normal()});
    const auto s = simulate_sample_set(spec, InnovationStream(3, 1, spec.law()), 100, 100000);
    const auto [m2, se] = moment_se(s.sums, 2);
    INFO("m2=", m2, " se=", se);
    CHECK(within(m2, 1.0, se));
  }

  TEST_CASE("MA(1) exponential sums match the closed-form variance") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    const auto s = simulate_sample_set(spec, InnovationStream(3, 2, spec.law()), 256, 100000);
    const auto exact = finite_n_linear(spec.linear_coefficients(), spec.law(), 256);
    const auto [m2, se] = moment_se(s.sums, 2);
    CHECK(within(m2, exact.s_n_sq, se));
  }

  TEST_CASE("example1 sums telescope") {
    const Example1Family fam = example1_defaults(0.25, 6);
    const ProcessSpec spec(fam);
    const InnovationStream stream(4, 4, spec.law());
    const long n = 64;
    const auto s = simulate_sample_set(spec, stream, n, 10000);
    for (std::size_t j = 0; j < s.sums.size(); ++j) {
      const auto d = example1_draws(fam, stream.substream(j), n);
      double u = 0.0;
      for (double x : d.U) u += x;
      REQUIRE(s.sums[j] == (u + d.H[n] - d.H[0]) / std::sqrt(static_cast<double>(n)));
    }
  }

  TEST_CASE("example1 path equals the defining recursion") {
    const Example1Family fam = example1_defaults(0.25, 6);
    const ProcessSpec spec(fam);
    const InnovationStream stream(4, 5, spec.law());
    const auto p = simulate_path(spec, stream, 32);
    const auto d = example1_draws(fam, stream, 32);
    // X_k = U_{k-1} + H_k - H_{k-1}
    for (long k = 1; k <= 32; ++k)
      CHECK(p.values[k - 1] == doctest::Approx(d.U[k - 1] + d.H[k] - d.H[k - 1]).epsilon(1e-14));
  }

  TEST_CASE("coupling leaves iid values unchanged") {
    const ProcessSpec spec(IidFamily{InnovationLaw::standard_normal()});
    const InnovationStream s(8, 0, spec.law());
    for (long k = 1; k < 5; ++k) {
      const auto [x, y] = simulate_coupled_pair(spec, s.substream(k), k);
      CHECK(x == y);
    }
  }

  TEST_CASE("MA(1) coupling difference has the closed-form norm") {
    const double theta = 0.5;
    const ProcessSpec spec(LinearFamily{{1.0, theta}, InnovationLaw::standard_normal()});
    const InnovationStream s(8, 1, spec.law());
    std::vector<double> d2(200000);
    for (std::size_t j = 0; j < d2.size(); ++j) {
      const auto [x, y] = simulate_coupled_pair(spec, s.substream(j), 1);
      d2[j] = (x - y) * (x - y);
    }
    const auto [m, se] = moment_se(d2, 1);
    CHECK(within(m, 2.0 * theta * theta, se));
  }

  TEST_CASE("k = 0 coupling gives independent copies") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5, 0.25}, InnovationLaw::centered_exponential()});
    const InnovationStream s(8, 2, spec.law());
    std::vector<double> d2(200000);
    for (std::size_t j = 0; j < d2.size(); ++j) {
      const auto [x, y] = simulate_coupled_pair(spec, s.substream(j), 0);
      d2[j] = (x - y) * (x - y);
    }
    const auto [m, se] = moment_se(d2, 1);
    CHECK(within(m, 2.0 * (1.0 + 0.25 + 0.0625), se));
  }

  TEST_CASE("m-dependent truncation") {
    const ProcessSpec lin(LinearFamily{{1.0, 0.5, 0.25}, InnovationLaw::standard_normal()});
    const auto t = truncate_mdep(lin, 1);
    CHECK(t.linear_coefficients() == std::vector<double>{1.0, 0.5});
    const ProcessSpec iid(IidFamily{InnovationLaw::rademacher()});
    CHECK(truncate_mdep(iid, 3).fingerprint() == iid.fingerprint());
    CHECK_THROWS_AS(truncate_mdep(lin, 0), InvalidArgument);
  }

  TEST_CASE("truncation gap of a geometric filter") {
    std::vector<double> a(21);
    for (int i = 0; i <= 20; ++i) a[i] = std::pow(0.5, i);
    const ProcessSpec spec(LinearFamily{a, InnovationLaw::standard_normal()});
    const ProcessSpec tr = truncate_mdep(spec, 8);
    const long n = 1024;
    const InnovationStream s(9, 0, spec.law());
    std::vector<double> d2(2000);
    for (std::size_t j = 0; j < d2.size(); ++j) {
      const double d = (simulate_normalized_sum(spec, s.substream(j), n) - simulate_normalized_sum(tr, s.substream(j), n)) *
                       std::sqrt(static_cast<double>(n));
      d2[j] = d * d;
    }
    const auto [m, se] = moment_se(d2, 1);
    double tail = 0.0;
    for (int i = 9; i <= 20; ++i) tail += a[i];
    const double bound = 2.0 * std::sqrt(static_cast<double>(n)) * tail;
    CHECK(std::sqrt(m) <= bound);
    (void)se;
  }

  TEST_CASE("smoothing increments") {
    CHECK_THROWS_AS(SmoothingLaw(0.0, 6), InvalidArgument);
    const SmoothingLaw g(0.25 / 12.0, 6);
    const ProcessSpec spec(IidFamily{InnovationLaw::standard_normal()});
    const long n = 16;
    const auto s = simulate_sample_set(spec, InnovationStream(12, 0, spec.law()), n, 200000);
    const auto d = smooth_diamond(s, g, InnovationStream(12, 1, InnovationLaw::uniform()));
    const auto [m2, se] = moment_se(d.sums, 2);
    CHECK(within(m2, 1.0 + 2.0 * g.variance() / n, se));
  }

  TEST_CASE("built-in processes are centered") {
    GarchFamily garch;
    garch.alpha = {0.2};
    garch.beta = {0.1};
    IteratedMapFamily rc;
    rc.gamma = 0.2;
    IteratedMapFamily tanh_ar;
    tanh_ar.map = IteratedMapFamily::Map::TanhAr;
    const std::vector<ProcessSpec> specs = {
        ProcessSpec(garch),
        ProcessSpec(rc),
        ProcessSpec(tanh_ar),
        ProcessSpec(DoublingFamily{16}),
        ProcessSpec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()}),
    };
    for (const auto& spec : specs) {
      const auto p = simulate_path(spec, InnovationStream(13, 0, spec.law()), 1000000);
      const Estimate e = batch_mean(p.values, 50);
      CHECK_MESSAGE(within(e.value, 0.0, e.se), spec.family_name());
    }
  }

  TEST_CASE("linear autocovariances") {
    const std::vector<double> a = {1.0, -0.4, 0.3};
    const ProcessSpec spec(LinearFamily{a, InnovationLaw::standard_normal()});
    const auto p = simulate_path(spec, InnovationStream(14, 0, spec.law()), 1000000);
    for (int h = 0; h <= 3; ++h) {
      std::vector<double> prod(p.values.size() - h);
      for (std::size_t t = 0; t < prod.size(); ++t) prod[t] = p.values[t] * p.values[t + h];
      double exact = 0.0;
      for (std::size_t i = 0; i + h < a.size(); ++i) exact += a[i] * a[i + h];
      const Estimate e = batch_mean(prod, 50);
      CHECK_MESSAGE(within(e.value, exact, e.se), "lag " << h);
    }
  }

  TEST_CASE("sample sets do not depend on the thread count") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
    const InnovationStream s(15, 0, spec.law());
    const auto one = simulate_sample_set(spec, s, 128, 4000, 1);
    const auto four = simulate_sample_set(spec, s, 128, 4000, 4);
    CHECK(one.sums == four.sums);
  }

  TEST_CASE("serialization round trips") {
    const ProcessSpec spec(LinearFamily{{1.0, 0.5, -0.25}, InnovationLaw::centered_exponential(2.0)});
    CHECK(ProcessSpec::from_toml(spec.to_toml()).fingerprint() == spec.fingerprint());
    const auto s = simulate_sample_set(spec, InnovationStream(16, 0, spec.law()), 32, 50);
    const auto back = SampleSet::from_csv(s.to_csv(), s.sidecar_json());
    CHECK(back.sums == s.sums);
    CHECK(back.spec_fingerprint == s.spec_fingerprint);
  }

  TEST_CASE("invalid specifications are rejected") {
    GarchFamily explosive;
    explosive.alpha = {0.9};
    explosive.beta = {0.9};
    CHECK_THROWS_AS(ProcessSpec{explosive}, InvalidArgument);
    IteratedMapFamily skewed;
    skewed.map = IteratedMapFamily::Map::TanhAr;
    skewed.law = InnovationLaw::centered_exponential();
    CHECK_THROWS_AS(ProcessSpec{skewed}, InvalidArgument);
    CHECK_THROWS_AS(InnovationLaw::custom({1.0, 2.0}, {0.5, 0.5}), InvalidArgument);
  }
}
