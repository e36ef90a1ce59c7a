#include "edgelab/dependence.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/rng.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

constexpr std::size_t kMinReplicates = 64;

InnovationStream derived(const InnovationStream& s, std::uint64_t tag) {
  return InnovationStream(s.seed(), mix64(s.stream_id(), tag), s.law());
}

// L^p norm from per-replicate |d|^p values; delta-method SE.
Estimate lp_norm(const std::vector<double>& powers, double p) {
  const Estimate m = batch_mean(powers);
  if (m.value <= 0.0) return {0.0, m.se > 0.0 ? std::pow(m.se, 1.0 / p) : 0.0};
  const double v = std::pow(m.value, 1.0 / p);
  return {v, m.se * v / (p * m.value)};
}

Estimate coupled_norm(const ProcessSpec& spec, long k, double p, std::size_t M, const InnovationStream& stream,
                      Coupling coupling, int threads) {
  if (!(p >= 1.0)) throw InvalidArgument("dependence: p must be >= 1");
  if (M < kMinReplicates) throw InvalidArgument("dependence: need at least 64 replicates");
  if (k < 0) throw InvalidArgument("dependence: k must be >= 0");
  std::vector<double> powers(M);
  parallel_for(M, threads, [&](std::size_t j) {
    const auto [x, y] = simulate_coupled_pair(spec, stream.substream(j), k, coupling);
    powers[j] = std::pow(std::abs(x - y), p);
  });
  return lp_norm(powers, p);
}

}  // namespace

Estimate estimate_lambda(const ProcessSpec& spec, long k, double p, std::size_t M, const InnovationStream& stream,
                         int threads) {
  return coupled_norm(spec, k, p, M, stream, Coupling::Tail, threads);
}

Estimate estimate_theta(const ProcessSpec& spec, long k, double p, std::size_t M, const InnovationStream& stream,
                        int threads) {
  return coupled_norm(spec, k, p, M, stream, Coupling::Single, threads);
}

DependenceProfile dependence_profile(const ProcessSpec& spec, double p, long K, std::size_t M,
                                     const InnovationStream& stream, int threads) {
  if (K < 0) throw InvalidArgument("dependence_profile: K must be >= 0");
  DependenceProfile prof;
  prof.p = p;
  prof.partial.assign(3, {});
  double sums[3] = {0.0, 0.0, 0.0};
  for (long k = 0; k <= K; ++k) {
    const Estimate e = estimate_lambda(spec, k, p, M, stream, threads);
    prof.k.push_back(k);
    prof.lambda.push_back(e);
    const double dk = static_cast<double>(k);
    for (int q = 0; q < 3; ++q) {
      sums[q] += std::pow(dk, q) * e.value;
      prof.partial[static_cast<std::size_t>(q)].push_back(sums[q]);
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < prof.k.size(); ++i) {
    if (prof.k[i] >= 1 && prof.lambda[i].value > 0.0) {
      xs.push_back(static_cast<double>(prof.k[i]));
      ys.push_back(std::log(prof.lambda[i].value));
    }
  }
  prof.decay_points = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    prof.decay_slope = sxy / sxx;
    prof.decay_r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  }
  return prof;
}

std::string DependenceProfile::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < k.size(); ++i)
    rows.push_back({{"k", k[i]}, {"lambda", lambda[i].value}, {"se", lambda[i].se}});
  j["lambda"] = rows;
  j["partial_q0"] = partial.empty() ? std::vector<double>{} : partial[0];
  j["partial_q1"] = partial.size() < 2 ? std::vector<double>{} : partial[1];
  j["partial_q2"] = partial.size() < 3 ? std::vector<double>{} : partial[2];
  j["decay_slope"] = decay_slope;
  j["decay_r2"] = decay_r2;
  j["decay_points"] = decay_points;
  return j.dump(2);
}

AssumptionReport assumption_report(const ProcessSpec& spec, double p, long K, long n_probe, std::size_t M,
                                   const InnovationStream& stream, int threads) {
  if (K < 1) throw InvalidArgument("assumption_report: K must be >= 1");
  if (n_probe < 0) throw InvalidArgument("assumption_report: lag window must be >= 0");
  AssumptionReport r;
  r.p = p;
  r.log_exponents = {2.5, 3.5};
  const InnovationStream marginal = derived(stream, 0xA11CE);
  std::vector<double> xs(M);
  parallel_for(M, threads,
               [&](std::size_t j) { xs[j] = simulate_path(spec, marginal.substream(j), 1).values.front(); });
  r.a1_pass = true;
  for (double a : r.log_exponents) {
    std::vector<double> v(M);
    for (std::size_t j = 0; j < M; ++j) {
      const double ax = std::abs(xs[j]);
      v[j] = std::pow(ax, p) * std::pow(std::log1p(ax), a);
    }
    const Estimate e = batch_mean(v);
    r.moments.push_back(e);
    if (!std::isfinite(e.value) || !std::isfinite(e.se) || e.se > e.value) r.a1_pass = false;
  }
  r.profile = dependence_profile(spec, p, K, M, derived(stream, 0xB0B), threads);
  const auto& lam2 = r.profile.partial[2];
  const double total = lam2.back();
  const std::size_t quarter = std::max<std::size_t>(1, static_cast<std::size_t>((K + 3) / 4));
  const double earlier = lam2[lam2.size() - 1 - std::min(quarter, lam2.size() - 1)];
  r.a2_tail_increment = total > 0.0 ? (total - earlier) / total : 0.0;
  r.a2_pass = std::isfinite(total) && r.a2_tail_increment < 0.05;
  r.longrun = longrun_bruteforce(spec, n_probe, M, derived(stream, 0xC0DE), BruteForceMethod::Auto, threads);
  r.a3_pass = !r.longrun.a3_violation();
  return r;
}

std::string AssumptionReport::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  auto a1 = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < moments.size(); ++i)
    a1.push_back({{"log_exponent", log_exponents[i]}, {"value", moments[i].value}, {"se", moments[i].se}});
  j["a1"] = {{"moments", a1}, {"pass", a1_pass}};
  j["a2"] = {{"profile", nlohmann::ordered_json::parse(profile.to_json())},
             {"tail_increment", a2_tail_increment},
             {"pass", a2_pass}};
  j["a3"] = {{"longrun", nlohmann::ordered_json::parse(longrun.to_json())}, {"pass", a3_pass}};
  j["all_pass"] = all_pass();
  return j.dump(2);
}

std::string AssumptionReport::to_text() const {
  std::ostringstream os;
  char buf[200];
  os << "check  quantity                          value          se             verdict\n";
  for (std::size_t i = 0; i < moments.size(); ++i) {
    std::snprintf(buf, sizeof buf, "A1     E|X|^%-4g log(1+|X|)^%-4g         %-14.6g %-14.6g %s\n", p, log_exponents[i],
                  moments[i].value, moments[i].se, a1_pass ? "pass" : "FAIL");
    os << buf;
  }
  const double total = profile.partial.empty() ? 0.0 : profile.partial[2].back();
  std::snprintf(buf, sizeof buf, "A2     Lambda_2 up to K=%-4zu             %-14.6g %-14s %s (tail increment %.3g)\n",
                profile.k.empty() ? std::size_t{0} : static_cast<std::size_t>(profile.k.back()), total, "-",
                a2_pass ? "pass" : "FAIL", a2_tail_increment);
  os << buf;
  std::snprintf(buf, sizeof buf, "A3     long-run variance (K=%-4ld)        %-14.6g %-14.6g %s\n", longrun.K,
                longrun.sigma_sq, longrun.sigma_sq_se, a3_pass ? "pass" : "FAIL");
  os << buf;
  os << "lag    lambda         se\n";
  for (std::size_t i = 0; i < profile.k.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-6ld %-14.6g %-14.6g\n", profile.k[i], profile.lambda[i].value,
                  profile.lambda[i].se);
    os << buf;
  }
  return os.str();
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t m, double z) {
  if (m == 0) return {0.0, 1.0};
  const double n = static_cast<double>(m), ph = static_cast<double>(k) / n, z2 = z * z;
  const double centre = (ph + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // The endpoints are exactly 0 and 1 at k = 0 and k = m; avoid rounding residue.
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == m ? 1.0 : std::min(1.0, centre + half)};
}

std::vector<TailRow> tail_check(const ProcessSpec& spec, long n, std::size_t M, const std::vector<double>& xs,
                                const InnovationStream& stream, const TailCheckOptions& opt, int threads) {
  if (n < 2) throw InvalidArgument("tail_check: n must be >= 2");
  const double dn = static_cast<double>(n);
  const double floor = opt.C * std::sqrt(dn * std::log(dn));
  for (double x : xs)
    if (!(x >= floor) || !(x > 1.0))
      throw InvalidArgument("tail_check: grid point " + std::to_string(x) + " below C sqrt(n log n) = " +
                            std::to_string(floor));
  const SampleSet s = simulate_sample_set(spec, stream, n, M, threads);
  const double root_n = std::sqrt(dn);
  std::vector<TailRow> rows;
  for (double x : xs) {
    TailRow r;
    r.x = x;
    for (double v : s.sums)
      if (v * root_n >= x) ++r.exceed;
    r.p_hat = static_cast<double>(r.exceed) / static_cast<double>(M);
    std::tie(r.wilson_lo, r.wilson_hi) = wilson_interval(r.exceed, M, opt.z);
    r.envelope = opt.envelope_constant * dn * std::pow(x, -opt.p) * std::pow(std::log(x), -opt.log_exponent / 2.0);
    r.below = r.p_hat <= r.envelope;
    rows.push_back(r);
  }
  return rows;
}

Estimate truncation_gap(const ProcessSpec& spec, long n, long m, std::size_t M, const InnovationStream& stream,
                        int threads) {
  if (M < kMinReplicates) throw InvalidArgument("truncation_gap: need at least 64 replicates");
  const ProcessSpec truncated = truncate_mdep(spec, m);
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> sq(M);
  parallel_for(M, threads, [&](std::size_t j) {
    const InnovationStream rs = stream.substream(j);
    const double d = (simulate_normalized_sum(spec, rs, n) - simulate_normalized_sum(truncated, rs, n)) * root_n;
    sq[j] = d * d;
  });
  return lp_norm(sq, 2.0);
}

}  // namespace edgelab
