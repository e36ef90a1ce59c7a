#include "edgelab/cumulants.hpp"

#include <cmath>
#include <numeric>

#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"
#include "json.hpp"

namespace edgelab {

Estimate batch_mean(std::span<const double> values, int batches) {
  const std::size_t M = values.size();
  if (M == 0) throw InvalidArgument("batch_mean: empty input");
  const std::size_t B = std::min<std::size_t>(static_cast<std::size_t>(std::max(2, batches)), M);
  double total = 0.0;
  for (double v : values) total += v;
  const double mean = total / static_cast<double>(M);
  if (B < 2) return {mean, 0.0};
  std::vector<double> means(B);
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t lo = M * b / B, hi = M * (b + 1) / B;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    means[b] = s / static_cast<double>(hi - lo);
  }
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return {mean, std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B))};
}

std::string CumulantSet::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  j.push_back({{"method", method}, {"n", n}, {"K", nullptr}, {"quantity", "s_n_sq"}, {"value", s_n_sq}, {"se", s_n_sq_se}});
  j.push_back({{"method", method}, {"n", n}, {"K", nullptr}, {"quantity", "kappa_n_cu"}, {"value", kappa_n_cu}, {"se", kappa_n_cu_se}});
  return j.dump(2);
}

std::string LongRunSet::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  j.push_back({{"method", method}, {"n", nullptr}, {"K", K}, {"quantity", "sigma_sq"}, {"value", sigma_sq}, {"se", sigma_sq_se}});
  j.push_back({{"method", method}, {"n", nullptr}, {"K", K}, {"quantity", "kappa_cu"}, {"value", kappa_cu}, {"se", kappa_cu_se}});
  return j.dump(2);
}

CumulantSet cumulants_from_sample(const SampleSet& sample) {
  std::vector<double> sq(sample.sums.size()), cu(sample.sums.size());
  for (std::size_t i = 0; i < sample.sums.size(); ++i) {
    sq[i] = sample.sums[i] * sample.sums[i];
    cu[i] = sq[i] * sample.sums[i];
  }
  const Estimate s2 = batch_mean(sq), k3 = batch_mean(cu);
  return CumulantSet{sample.n, s2.value, s2.se, k3.value, k3.se, "monte_carlo"};
}

CumulantSet estimate_finite_n(const ProcessSpec& spec, long n, std::size_t M, const InnovationStream& stream,
                              int threads) {
  return cumulants_from_sample(simulate_sample_set(spec, stream, n, M, threads));
}

CumulantSet finite_n_linear(std::span<const double> a, const InnovationLaw& law, long n) {
  if (a.empty()) throw InvalidArgument("finite_n_linear: empty coefficient list");
  if (n < 1) throw InvalidArgument("finite_n_linear: n must be positive");
  const long L = static_cast<long>(a.size()) - 1;
  std::vector<double> prefix(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) prefix[i + 1] = prefix[i] + a[i];
  double c2 = 0.0, c3 = 0.0;
  for (long t = 1 - L; t <= n; ++t) {
    const long lo = std::max(0L, 1 - t), hi = std::min(L, n - t);
    if (hi < lo) continue;
    const double c = prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    c2 += c * c;
    c3 += c * c * c;
  }
  const double dn = static_cast<double>(n);
  return CumulantSet{n, law.variance() * c2 / dn, 0.0, law.third_moment() * c3 / (dn * std::sqrt(dn)), 0.0,
                     "closed_form"};
}

LongRunSet longrun_linear(std::span<const double> a, double sigma_eps_sq, double third_moment) {
  if (a.empty()) throw InvalidArgument("longrun_linear: empty coefficient list");
  const double s = std::accumulate(a.begin(), a.end(), 0.0);
  return LongRunSet{sigma_eps_sq * s * s, 0.0, third_moment * s * s * s, 0.0, static_cast<long>(a.size()) - 1,
                    "closed_form"};
}

namespace {

LongRunSet bruteforce_exact(std::span<const double> a, const InnovationLaw& law, long K) {
  const long L = static_cast<long>(a.size()) - 1;
  const auto coef = [&](long i) { return i < 0 || i > L ? 0.0 : a[static_cast<std::size_t>(i)]; };
  // E X_0 X_k = sigma^2 sum_u a(-u) a(k-u); E X_0 X_i X_j = mu_3 sum_u a(-u) a(i-u) a(j-u).
  double sigma = 0.0;
  for (long k = -K; k <= K; ++k)
    for (long u = -L; u <= 0; ++u) sigma += coef(-u) * coef(k - u);
  double kappa = 0.0;
  for (long i = -K; i <= K; ++i)
    for (long j = -K; j <= K; ++j)
      for (long u = -L; u <= 0; ++u) kappa += coef(-u) * coef(i - u) * coef(j - u);
  return LongRunSet{law.variance() * sigma, 0.0, law.third_moment() * kappa, 0.0, K, "brute_force_exact"};
}

}  // namespace

LongRunSet longrun_bruteforce(const ProcessSpec& spec, long K, std::size_t M, const InnovationStream& stream,
                              BruteForceMethod method, int threads) {
  if (K < 0) throw InvalidArgument("longrun_bruteforce: K must be nonnegative");
  const bool exact_ok = spec.is_linear() && K >= spec.memory();
  if (method == BruteForceMethod::Exact && !spec.is_linear())
    throw InvalidArgument("longrun_bruteforce: exact enumeration needs a linear spec");
  if (method == BruteForceMethod::Exact || (method == BruteForceMethod::Auto && exact_ok))
    return bruteforce_exact(spec.linear_coefficients(), spec.law(), K);
  if (M < 2) throw InvalidArgument("longrun_bruteforce: M must be at least 2");

  // Replicate j: stationary window X_{-K}..X_K as a path of length 2K+1.
  const long len = 2 * K + 1;
  std::vector<double> second(M), third(M);
  parallel_for(M, threads, [&](std::size_t j) {
    const Path p = simulate_path(spec, stream.substream(j), len);
    const double x0 = p.values[static_cast<std::size_t>(K)];
    double w = 0.0;
    for (double v : p.values) w += v;
    second[j] = x0 * w;
    third[j] = x0 * w * w;
  });
  const Estimate s2 = batch_mean(second), k3 = batch_mean(third);
  return LongRunSet{s2.value, s2.se, k3.value, k3.se, K, "monte_carlo"};
}

FourthMomentCheck fourth_moment_from_sample(const SampleSet& sample) {
  const std::size_t M = sample.sums.size();
  double m2 = 0.0, m4 = 0.0;
  for (double t : sample.sums) {
    m2 += t * t;
    m4 += t * t * t * t;
  }
  m2 /= static_cast<double>(M);
  m4 /= static_cast<double>(M);
  std::vector<double> influence(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double t2 = sample.sums[i] * sample.sums[i];
    influence[i] = (t2 * t2 - m4) - 6.0 * m2 * (t2 - m2);
  }
  const double dn = static_cast<double>(sample.n);
  const Estimate psi = batch_mean(influence);
  return FourthMomentCheck{dn * std::abs(m4 - 3.0 * m2 * m2), dn * psi.se, sample.n};
}

FourthMomentCheck check_fourth_moment(const ProcessSpec& spec, long n, std::size_t M, const InnovationStream& stream,
                                      int threads) {
  return fourth_moment_from_sample(simulate_sample_set(spec, stream, n, M, threads));
}

}  // namespace edgelab
