#include "edgelab/highdim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/rng.hpp"

namespace edgelab {

namespace {

std::string hex_fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProcessSpec rademacher_iid() { return ProcessSpec(IidFamily{InnovationLaw::rademacher()}); }

bool is_rademacher_iid(const ProcessSpec& s) {
  const auto* f = std::get_if<IidFamily>(&s.family());
  return f && f->law.kind() == InnovationLaw::Kind::Rademacher;
}

double stationary_second_moment(const ProcessSpec& s) {
  if (!s.is_linear()) throw InvalidArgument("highdim: square_centered needs linear or IID coordinates");
  double v = 0.0;
  for (double a : s.linear_coefficients()) v += a * a;
  return v * s.law().variance();
}

// log pmf of Binomial(N, 1/2), pruned to entries above `floor`.
struct BinomialTable {
  long lo = 0;
  std::vector<double> pmf;
};

BinomialTable binomial_half(long N, double floor) {
  const double base = std::lgamma(static_cast<double>(N) + 1.0) - static_cast<double>(N) * std::log(2.0);
  const auto lp = [&](long k) {
    return base - std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(N - k) + 1.0);
  };
  const double lfloor = std::log(floor);
  long lo = N / 2, hi = N / 2;
  while (lo > 0 && lp(lo - 1) > lfloor) --lo;
  while (hi < N && lp(hi + 1) > lfloor) ++hi;
  BinomialTable t;
  t.lo = lo;
  t.pmf.resize(static_cast<std::size_t>(hi - lo + 1));
  for (long k = lo; k <= hi; ++k) t.pmf[static_cast<std::size_t>(k - lo)] = std::exp(lp(k));
  return t;
}

}  // namespace

std::pair<double, double> tail_band(long n, double alpha, double beta, double c, double C) {
  const double dn = static_cast<double>(n);
  return {c * std::pow(std::log(dn), beta) / dn, C * std::pow(dn, -alpha)};
}

double HighDimSpec::tail_mass() const {
  double s = 0.0;
  for (int i : I) s += theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];
  return s;
}

double HighDimSpec::theta_norm_sq() const {
  double s = 0.0;
  for (double t : theta) s += t * t;
  return s;
}

bool HighDimSpec::in_tail(int i) const { return std::find(I.begin(), I.end(), i) != I.end(); }

void HighDimSpec::validate() const {
  if (d < 1) throw InvalidArgument("highdim: d must be positive");
  if (theta.size() != static_cast<std::size_t>(d)) throw InvalidArgument("highdim: theta must have length d");
  if (coordinates.size() != static_cast<std::size_t>(d))
    throw InvalidArgument("highdim: one coordinate process per dimension required");
  std::set<int> seen;
  for (int i : I) {
    if (i < 0 || i >= d) throw InvalidArgument("highdim: tail index out of range");
    if (!seen.insert(i).second) throw InvalidArgument("highdim: duplicate tail index");
  }
  for (double t : theta)
    if (!std::isfinite(t)) throw InvalidArgument("highdim: theta must be finite");
  if (!(alpha > 0.0) || !(beta > 1.0)) throw InvalidArgument("highdim: need alpha > 0 and beta > 1");
  if (!(c > 0.0) || !(C > 0.0)) throw InvalidArgument("highdim: band constants must be positive");
  if (n_min <= 0) return;
  if (n_max < n_min) throw InvalidArgument("highdim: n_max < n_min");
  const double mass = tail_mass();
  for (long n = n_min;; n = std::min(2 * n, n_max)) {
    const auto [lo, hi] = tail_band(n, alpha, beta, c, C);
    if (lo > hi) throw Infeasible("highdim: tail band empty at n = " + std::to_string(n), static_cast<double>(n));
    if (mass < lo * (1.0 - 1e-12) || mass > hi * (1.0 + 1e-12))
      throw Infeasible("highdim: tail mass outside its band at n = " + std::to_string(n), mass);
    if (n == n_max) break;
  }
}

std::string HighDimSpec::to_toml() const {
  std::ostringstream os;
  os << "[highdim]\n";
  os << "d = " << d << "\n";
  os << "I = [";
  for (std::size_t k = 0; k < I.size(); ++k) os << (k ? ", " : "") << I[k] + 1;
  os << "]\n";
  os << "theta = " << toml::format_array(theta) << "\n";
  os << "alpha = " << toml::format_double(alpha) << "\n";
  os << "beta = " << toml::format_double(beta) << "\n";
  os << "c = " << toml::format_double(c) << "\n";
  os << "C = " << toml::format_double(C) << "\n";
  os << "n_min = " << n_min << "\n";
  os << "n_max = " << n_max << "\n";
  os << "square_centered = " << (square_centered ? "true" : "false") << "\n";
  for (int i = 0; i < d; ++i) {
    if (in_tail(i)) {
      os << "\n[highdim.I]\n" << coordinates[static_cast<std::size_t>(i)].to_toml();
      break;
    }
  }
  for (int i = 0; i < d; ++i) {
    if (!in_tail(i)) {
      os << "\n[highdim.Ic]\n" << coordinates[static_cast<std::size_t>(i)].to_toml();
      break;
    }
  }
  return os.str();
}

HighDimSpec HighDimSpec::from_document(const toml::Document& doc) {
  const toml::Table* t = doc.section("highdim");
  if (!t) throw InvalidArgument("highdim: missing [highdim] block");
  static const std::set<std::string> known = {"d", "I", "theta", "alpha", "beta", "c",
                                              "C", "n_min", "n_max", "square_centered"};
  for (const auto& [key, value] : *t)
    if (!known.count(key)) throw InvalidArgument("highdim: unknown key '" + key + "'");
  HighDimSpec s;
  s.d = static_cast<int>(toml::require(*t, "d").as_int());
  for (auto i : toml::require(*t, "I").as_ints()) s.I.push_back(static_cast<int>(i) - 1);
  s.theta = toml::require(*t, "theta").as_doubles();
  s.alpha = toml::require(*t, "alpha").as_double();
  s.beta = toml::require(*t, "beta").as_double();
  s.c = toml::get_double(*t, "c", s.c);
  s.C = toml::get_double(*t, "C", s.C);
  s.n_min = toml::get_int(*t, "n_min", 0);
  s.n_max = toml::get_int(*t, "n_max", 0);
  s.square_centered = toml::get_bool(*t, "square_centered", false);
  const ProcessSpec inner = doc.section("highdim.I") ? ProcessSpec::from_table(*doc.section("highdim.I")) : rademacher_iid();
  const ProcessSpec outer =
      doc.section("highdim.Ic") ? ProcessSpec::from_table(*doc.section("highdim.Ic")) : rademacher_iid();
  if (s.d < 1) throw InvalidArgument("highdim: d must be positive");
  for (int i = 0; i < s.d; ++i) s.coordinates.push_back(s.in_tail(i) ? inner : outer);
  s.validate();
  return s;
}

HighDimSpec build_theta(long n_min, long n_max, double alpha, double beta, double c, double C, int d, int I_size,
                        double outer_weight) {
  if (n_min < 2 || n_max < n_min) throw InvalidArgument("build_theta: need 2 <= n_min <= n_max");
  if (I_size < 1 || I_size > d) throw InvalidArgument("build_theta: need 1 <= |I| <= d");
  HighDimSpec s;
  s.d = d;
  s.alpha = alpha;
  s.beta = beta;
  s.c = c;
  s.C = C;
  s.n_min = n_min;
  s.n_max = n_max;
  for (long n = n_min;; n = std::min(2 * n, n_max)) {
    const auto [lo, hi] = tail_band(n, alpha, beta, c, C);
    if (lo > hi) throw Infeasible("build_theta: band empty at n = " + std::to_string(n) + "; alpha too large", static_cast<double>(n));
    if (n == n_max) break;
  }
  const long mid = std::lround(std::sqrt(static_cast<double>(n_min) * static_cast<double>(n_max)));
  const auto [lo, hi] = tail_band(mid, alpha, beta, c, C);
  const double mass = std::sqrt(lo * hi);
  const double each = std::sqrt(mass / I_size);
  for (int i = 0; i < d; ++i) {
    if (i < I_size) s.I.push_back(i);
    s.theta.push_back(i < I_size ? each : outer_weight);
    s.coordinates.push_back(rademacher_iid());
  }
  s.validate();
  return s;
}

InnovationStream coordinate_stream(const InnovationStream& stream, int i) {
  return InnovationStream(stream.seed(), mix64(stream.stream_id() ^ 0xD1B54A32D192ED03ULL, static_cast<std::uint64_t>(i)),
                          stream.law());
}

SampleSet simulate_projection(const HighDimSpec& spec, const InnovationStream& stream, long n, std::size_t M,
                              int threads) {
  spec.validate();
  if (n < 1 || M < 1) throw InvalidArgument("simulate_projection: need n >= 1 and M >= 1");
  SampleSet out;
  out.n = n;
  out.seed = stream.seed();
  out.spec_fingerprint = hex_fnv(spec.to_toml());
  out.stream_fingerprint = stream.fingerprint() + "+coords";
  out.sums.assign(M, 0.0);
  if (!spec.square_centered) {
    for (int i = 0; i < spec.d; ++i) {
      const double w = spec.theta[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      const SampleSet s =
          simulate_sample_set(spec.coordinates[static_cast<std::size_t>(i)], coordinate_stream(stream, i), n, M, threads);
      for (std::size_t j = 0; j < M; ++j) out.sums[j] += w * s.sums[j];
    }
    return out;
  }
  std::vector<double> m2(static_cast<std::size_t>(spec.d));
  for (int i = 0; i < spec.d; ++i) m2[static_cast<std::size_t>(i)] = stationary_second_moment(spec.coordinates[static_cast<std::size_t>(i)]);
  const double root_n = std::sqrt(static_cast<double>(n));
  parallel_for(M, threads, [&](std::size_t j) {
    double total = 0.0;
    for (int i = 0; i < spec.d; ++i) {
      const double w = spec.theta[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      const Path p = simulate_path(spec.coordinates[static_cast<std::size_t>(i)], coordinate_stream(stream, i).substream(j), n);
      double s = 0.0;
      for (double x : p.values) s += x * x - m2[static_cast<std::size_t>(i)];
      total += w * s;
    }
    out.sums[j] = total / root_n;
  });
  return out;
}

std::vector<RademacherGroup> rademacher_groups(const HighDimSpec& spec) {
  if (spec.square_centered) return {};
  std::vector<RademacherGroup> groups;
  for (int i = 0; i < spec.d; ++i) {
    const double w = std::abs(spec.theta[static_cast<std::size_t>(i)]);
    if (w == 0.0) continue;
    if (!is_rademacher_iid(spec.coordinates[static_cast<std::size_t>(i)])) return {};
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.weight == w; });
    if (it == groups.end())
      groups.push_back({w, 1});
    else
      ++it->count;
  }
  if (groups.size() > 2) return {};
  return groups;
}

DistReport exact_rademacher_kolmogorov(const std::vector<RademacherGroup>& groups, long n, const Cdf& target) {
  if (groups.empty() || groups.size() > 2) throw InvalidArgument("exact kolmogorov: one or two groups required");
  if (n < 1) throw InvalidArgument("exact kolmogorov: n must be positive");
  for (const auto& g : groups)
    if (!(g.weight > 0.0) || g.count < 1) throw InvalidArgument("exact kolmogorov: invalid group");
  constexpr double kFloor = 1e-18;
  const double root_n = std::sqrt(static_cast<double>(n));
  // Atoms (x, mass); the step function only changes there, so the supremum
  // of |F - target| is attained at an atom from the left or the right.
  std::vector<std::pair<double, double>> atoms;
  const auto& g0 = groups[0];
  const long N0 = g0.count * n;
  const BinomialTable t0 = binomial_half(N0, kFloor);
  if (groups.size() == 1) {
    for (std::size_t k = 0; k < t0.pmf.size(); ++k) {
      const double A = 2.0 * static_cast<double>(t0.lo + static_cast<long>(k)) - static_cast<double>(N0);
      atoms.emplace_back(g0.weight * A / root_n, t0.pmf[k]);
    }
  } else {
    const auto& g1 = groups[1];
    const long N1 = g1.count * n;
    const BinomialTable t1 = binomial_half(N1, kFloor);
    atoms.reserve(t0.pmf.size() * t1.pmf.size());
    for (std::size_t k0 = 0; k0 < t0.pmf.size(); ++k0) {
      const double A = 2.0 * static_cast<double>(t0.lo + static_cast<long>(k0)) - static_cast<double>(N0);
      for (std::size_t k1 = 0; k1 < t1.pmf.size(); ++k1) {
        const double mass = t0.pmf[k0] * t1.pmf[k1];
        if (mass < kFloor * kFloor) continue;
        const double B = 2.0 * static_cast<double>(t1.lo + static_cast<long>(k1)) - static_cast<double>(N1);
        atoms.emplace_back((g0.weight * A + g1.weight * B) / root_n, mass);
      }
    }
  }
  std::sort(atoms.begin(), atoms.end());
  double total = 0.0;
  for (const auto& a : atoms) total += a.second;
  // Pruned mass splits evenly between the tails.
  double F = 0.5 * (1.0 - total);
  double d = 0.0;
  for (const auto& [x, mass] : atoms) {
    const double T = target(x);
    const double before = std::abs(F - T);
    F += mass;
    d = std::max({d, before, std::abs(F - T)});
  }
  DistReport r;
  r.metric = "kolmogorov";
  r.n = n;
  r.value = d;
  r.uncertainty = 1.0 - total + 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(atoms.size());
  r.window_lo = atoms.front().first;
  r.window_hi = atoms.back().first;
  return r;
}

std::vector<Estimate> block_cross_covariance(const HighDimSpec& spec, const InnovationStream& stream, long n,
                                             std::size_t M, int max_lag, int threads) {
  spec.validate();
  if (max_lag < 0 || n <= max_lag) throw InvalidArgument("block_cross_covariance: need n > max_lag >= 0");
  const std::size_t lags = static_cast<std::size_t>(max_lag) + 1;
  std::vector<std::vector<double>> per(lags, std::vector<double>(M, 0.0));
  parallel_for(M, threads, [&](std::size_t j) {
    std::vector<double> xi(static_cast<std::size_t>(n), 0.0), xc(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < spec.d; ++i) {
      const double w = spec.theta[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      const Path p = simulate_path(spec.coordinates[static_cast<std::size_t>(i)], coordinate_stream(stream, i).substream(j), n);
      auto& target = spec.in_tail(i) ? xi : xc;
      for (long k = 0; k < n; ++k) target[static_cast<std::size_t>(k)] += w * p.values[static_cast<std::size_t>(k)];
    }
    for (std::size_t h = 0; h < lags; ++h) {
      double s = 0.0;
      for (std::size_t k = 0; k + h < static_cast<std::size_t>(n); ++k) s += xi[k] * xc[k + h];
      per[h][j] = s / static_cast<double>(static_cast<std::size_t>(n) - h);
    }
  });
  std::vector<Estimate> out;
  for (const auto& v : per) out.push_back(batch_mean(v));
  return out;
}

std::vector<Estimate> martingale_difference_check(const HighDimSpec& spec, const InnovationStream& stream, long n,
                                                  std::size_t M, int threads) {
  spec.validate();
  std::vector<int> tail = spec.I;
  std::sort(tail.begin(), tail.end());
  if (tail.size() < 2) return {};
  const std::size_t pairs = tail.size() - 1;
  // Per replicate: sum x_prev*x_cur and sum x_prev^2 over the path.
  std::vector<std::vector<double>> cross(pairs, std::vector<double>(M)), sq(pairs, std::vector<double>(M));
  parallel_for(M, threads, [&](std::size_t j) {
    std::vector<Path> paths;
    for (int i : tail)
      paths.push_back(simulate_path(spec.coordinates[static_cast<std::size_t>(i)], coordinate_stream(stream, i).substream(j), n));
    for (std::size_t q = 0; q < pairs; ++q) {
      double c = 0.0, s = 0.0;
      for (long k = 0; k < n; ++k) {
        const double a = paths[q].values[static_cast<std::size_t>(k)], b = paths[q + 1].values[static_cast<std::size_t>(k)];
        c += a * b;
        s += a * a;
      }
      cross[q][j] = c / static_cast<double>(n);
      sq[q][j] = s / static_cast<double>(n);
    }
  });
  std::vector<Estimate> out;
  for (std::size_t q = 0; q < pairs; ++q) {
    const Estimate c = batch_mean(cross[q]);
    const Estimate s = batch_mean(sq[q]);
    if (!(s.value > 0.0)) {
      out.push_back({0.0, 0.0});
      continue;
    }
    out.push_back({c.value / s.value, c.se / s.value});
  }
  return out;
}

}  // namespace edgelab
