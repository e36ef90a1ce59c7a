#include <benchmark/benchmark.h>

#include <cmath>

#include "edgelab/charfn.hpp"
#include "edgelab/dependence.hpp"
#include "edgelab/edgeworth.hpp"
#include "edgelab/laws.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/process.hpp"

using namespace edgelab;

namespace {

ProcessSpec ma1() { return ProcessSpec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()}); }

void BM_Innovations(benchmark::State& state) {
  const InnovationStream s(1, 0, InnovationLaw::standard_normal());
  const auto M = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_innovations(s, M));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Innovations)->Arg(1 << 16)->Arg(1 << 20);

void BM_SampleSetMA1(benchmark::State& state) {
  const auto spec = ma1();
  const long n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_sample_set(spec, InnovationStream(2, n, spec.law()), n, 2000, 1));
  state.SetItemsProcessed(state.iterations() * 2000 * n);
}
BENCHMARK(BM_SampleSetMA1)->Arg(64)->Arg(1024);

void BM_KolmogorovSample(benchmark::State& state) {
  const auto xs = gen_innovations(InnovationStream(3, 0, InnovationLaw::standard_normal()), state.range(0));
  const EdgeworthExpansion e(1.0, 0.3, 256);
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov(xs, [&](double x) { return e.cdf(x); }));
}
BENCHMARK(BM_KolmogorovSample)->Arg(1 << 14)->Arg(1 << 18);

void BM_Wasserstein(benchmark::State& state) {
  const auto xs = gen_innovations(InnovationStream(4, 0, InnovationLaw::standard_normal()), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1(xs, [](double x) { return normal_cdf(x); }));
}
BENCHMARK(BM_Wasserstein)->Arg(1 << 14);

void BM_CharacteristicExponential(benchmark::State& state) {
  const long n = state.range(0);
  const auto src = CharFnSource::iid(InnovationLaw::centered_exponential(), n);
  CharacteristicOptions opt;
  opt.B_max = 16.0 * n;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(characteristic(src, 0.25 * std::sqrt(double(n)), opt));
}
BENCHMARK(BM_CharacteristicExponential)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CharacteristicLattice(benchmark::State& state) {
  const long n = state.range(0);
  const auto src = CharFnSource::lattice(n);
  CharacteristicOptions opt;
  opt.B_max = 16.0 * n;
  opt.max_nodes = 1L << 16;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(characteristic(src, 0.25 * std::sqrt(double(n)), opt));
}
BENCHMARK(BM_CharacteristicLattice)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GilPelaez(benchmark::State& state) {
  const std::vector<double> a = {1.0, 0.5};
  const auto src = CharFnSource::ma(a, InnovationLaw::centered_exponential(), 256);
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gil_pelaez_cdf(src, x));
    x = x > 2.0 ? -2.0 : x + 0.37;
  }
}
BENCHMARK(BM_GilPelaez);

void BM_GaussGammaSample(benchmark::State& state) {
  const auto L = fit_gauss_gamma(1.0, 0.2, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_Ln(L, InnovationStream(5, 0, InnovationLaw::uniform()), 1 << 16));
  state.SetItemsProcessed(state.iterations() * (1 << 16));
}
BENCHMARK(BM_GaussGammaSample);

void BM_SmoothingSampler(benchmark::State& state) {
  const SmoothingLaw g(0.25 / 12.0, 6);
  for (auto _ : state) benchmark::DoNotOptimize(g.sample(InnovationStream(6, 0, InnovationLaw::uniform()), 1 << 14));
  state.SetItemsProcessed(state.iterations() * (1 << 14));
}
BENCHMARK(BM_SmoothingSampler);

void BM_LambdaGarch(benchmark::State& state) {
  GarchFamily g;
  g.alpha = {0.2};
  g.beta = {0.1};
  const ProcessSpec spec(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_lambda(spec, 2, 2.0, 2000, InnovationStream(7, 0, spec.law())));
}
BENCHMARK(BM_LambdaGarch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
