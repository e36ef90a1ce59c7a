#include "edgelab/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "edgelab/error.hpp"
#include "edgelab/quadrature.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

constexpr std::array<double, 5> kGl5Nodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                             0.9061798459386640};
constexpr std::array<double, 5> kGl5Weights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                               0.4786286704993665, 0.2369268850561891};

template <class F>
double gl5(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += kGl5Weights[i] * f(mid + half * kGl5Nodes[i]);
  return s * half;
}

// Root of G(x) = p on [lo, hi] given a sign change.
double crossing(const Cdf& G, double p, double lo, double hi) {
  double glo = G(lo) - p;
  for (int i = 0; i < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = G(mid) - p;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// int_lo^hi |p - G|^q with a split at a crossing.
double piece(const Cdf& G, double p, double q, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const auto f = [&](double x) {
    const double d = std::abs(p - G(x));
    return q == 1.0 ? d : std::pow(d, q);
  };
  const double a = G(lo) - p, b = G(hi) - p;
  if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
    const double c = crossing(G, p, lo, hi);
    return gl5(f, lo, c) + gl5(f, c, hi);
  }
  return gl5(f, lo, hi);
}

double tail_estimate(const Cdf& F, const Cdf& G, double X, double scale) {
  const double mass = (1.0 - F(X)) + (1.0 - G(X)) + F(-X) + G(-X);
  return std::abs(mass) * scale * scale / X;
}

std::vector<double> sorted_copy(std::span<const double> s) {
  if (s.empty()) throw InvalidArgument("metrics: empty sample");
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

DistReport empirical_integral(std::span<const double> sample, const Cdf& G, double q, const WindowPolicy& policy,
                              bool debias) {
  const auto s = sorted_copy(sample);
  const std::size_t M = s.size();
  const double dM = static_cast<double>(M);
  DistReport r;
  r.metric = q == 1.0 ? "w1" : "lq";
  r.q = q;
  double lo = std::min(-policy.sigmas * policy.scale, s.front());
  double hi = std::max(policy.sigmas * policy.scale, s.back());
  const auto pw = [q](double d) { return q == 1.0 ? std::abs(d) : std::pow(std::abs(d), q); };
  const auto tails = [&](double l, double h) {
    return (pw(G(l)) + pw(1.0 - G(h))) * policy.scale * policy.scale / std::max(std::abs(l), std::abs(h));
  };
  double noise = 0.0, bias = 0.0, body = 0.0;
  for (std::size_t i = 0; i + 1 < M; ++i) {
    const double len = s[i + 1] - s[i];
    if (len <= 0.0) continue;
    const double p = static_cast<double>(i + 1) / dM;
    body += piece(G, p, q, s[i], s[i + 1]);
    noise += std::sqrt(p * (1.0 - p)) * len;
    bias += p * (1.0 - p) * len;
  }
  double tail = tails(lo, hi);
  double value = 0.0;
  for (;;) {
    const auto left = [&](double x) { return pw(G(x)); };
    const auto right = [&](double x) { return pw(1.0 - G(x)); };
    const double ends = quad::adaptive(left, lo, s.front(), policy.tol).value +
                        quad::adaptive(right, s.back(), hi, policy.tol).value;
    value = body + ends;
    tail = tails(lo, hi);
    if (tail <= 0.1 * value || tail <= policy.tol) break;
    if (hi >= policy.max_sigmas * policy.scale) throw NumericalError("metrics: integration window hit its hard cap");
    lo *= 2.0;
    hi *= 2.0;
  }
  if (debias && q == 2.0) value = std::max(0.0, value - bias / (dM - 1.0));
  r.value = value;
  r.uncertainty = tail + policy.tol;
  r.noise = q == 1.0 ? std::sqrt(2.0 / std::numbers::pi) * noise / std::sqrt(dM) : bias / (dM - 1.0);
  r.window_lo = lo;
  r.window_hi = hi;
  return r;
}

DistReport analytic_integral(const Cdf& F, const Cdf& G, double q, const WindowPolicy& policy) {
  DistReport r;
  r.metric = q == 1.0 ? "w1" : "lq";
  r.q = q;
  double X = policy.sigmas * policy.scale;
  const auto f = [&](double x) {
    const double d = std::abs(F(x) - G(x));
    return q == 1.0 ? d : std::pow(d, q);
  };
  for (;;) {
    const double value = quad::adaptive(f, -X, X, policy.tol).value;
    double tail = tail_estimate(F, G, X, policy.scale);
    if (q != 1.0) tail = std::pow(tail / policy.scale, q) * policy.scale;
    if (tail <= 0.1 * value || tail <= policy.tol) {
      r.value = value;
      r.uncertainty = tail + policy.tol;
      break;
    }
    if (X >= policy.max_sigmas * policy.scale) throw NumericalError("metrics: integration window hit its hard cap");
    X *= 2.0;
  }
  r.window_lo = -X;
  r.window_hi = X;
  return r;
}

}  // namespace

std::string DistReport::csv_row() const {
  char buf[160];
  const std::string name = metric == "lq" ? "lq" + std::to_string(static_cast<int>(q)) : metric;
  std::snprintf(buf, sizeof buf, "%s,%ld,%.17g,%.17g", name.c_str(), n, value, uncertainty);
  return buf;
}

DistReport kolmogorov(std::span<const double> sample, const Cdf& target) {
  const auto s = sorted_copy(sample);
  const double M = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = target(s[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / M - F), std::abs(static_cast<double>(i) / M - F)});
  }
  DistReport r;
  r.metric = "kolmogorov";
  r.value = std::min(d, 1.0);
  r.noise = 0.8687 / std::sqrt(M);
  r.window_lo = s.front();
  r.window_hi = s.back();
  return r;
}

DistReport kolmogorov(const SampleSet& sample, const Cdf& target) {
  DistReport r = kolmogorov(sample.sums, target);
  r.n = sample.n;
  r.fingerprint = sample.spec_fingerprint;
  return r;
}

DistReport kolmogorov(const Cdf& F, const Cdf& G, double lo, double hi, int points) {
  if (!(hi > lo) || points < 3) throw InvalidArgument("kolmogorov: invalid grid");
  const double dx = (hi - lo) / (points - 1);
  std::vector<double> d(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = lo + i * dx;
    d[static_cast<std::size_t>(i)] = std::abs(F(x) - G(x));
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < d.size(); ++i)
    if ((i == 0 || d[i] >= d[i - 1]) && (i + 1 == d.size() || d[i] >= d[i + 1])) peaks.push_back(i);
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return d[a] > d[b]; });
  if (peaks.size() > 5) peaks.resize(5);
  double best = *std::max_element(d.begin(), d.end());
  const auto f = [&](double x) { return std::abs(F(x) - G(x)); };
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t p : peaks) {
    double a = std::max(lo, lo + (static_cast<double>(p) - 1.0) * dx);
    double b = std::min(hi, lo + (static_cast<double>(p) + 1.0) * dx);
    for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
      const double c = b - r * (b - a), e = a + r * (b - a);
      (f(c) > f(e) ? b : a) = f(c) > f(e) ? e : c;
    }
    best = std::max(best, f(0.5 * (a + b)));
  }
  DistReport rep;
  rep.metric = "kolmogorov";
  rep.value = std::min(best, 1.0);
  rep.window_lo = lo;
  rep.window_hi = hi;
  return rep;
}

DistReport wasserstein1(const Cdf& F, const Cdf& G, const WindowPolicy& policy) {
  return analytic_integral(F, G, 1.0, policy);
}

DistReport wasserstein1(std::span<const double> sample, const Cdf& G, const WindowPolicy& policy) {
  return empirical_integral(sample, G, 1.0, policy, false);
}

DistReport wasserstein1(const SampleSet& sample, const Cdf& G, const WindowPolicy& policy) {
  DistReport r = wasserstein1(std::span<const double>(sample.sums), G, policy);
  r.n = sample.n;
  r.fingerprint = sample.spec_fingerprint;
  return r;
}

DistReport lq_distance(const Cdf& F, const Cdf& G, double q, const WindowPolicy& policy) {
  if (!(q >= 1.0)) throw InvalidArgument("lq_distance: q must be >= 1");
  return analytic_integral(F, G, q, policy);
}

DistReport lq_distance(std::span<const double> sample, const Cdf& G, double q, const WindowPolicy& policy,
                       bool debias) {
  if (!(q >= 1.0)) throw InvalidArgument("lq_distance: q must be >= 1");
  return empirical_integral(sample, G, q, policy, debias);
}

RateFit fit_rate(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size()) throw InvalidArgument("fit_rate: size mismatch");
  if (ns.size() < 4) throw InvalidArgument("fit_rate: needs at least 4 points");
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!(values[i] > 0.0) || !(ns[i] > 0.0)) throw InvalidArgument("fit_rate: values must be positive");
  const std::size_t k = ns.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(ns[i]);
    my += std::log(values[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  if (sxx <= 0.0) throw InvalidArgument("fit_rate: n values must differ");
  RateFit fit;
  fit.ns.assign(ns.begin(), ns.end());
  fit.values.assign(values.begin(), values.end());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = std::log(values[i]) - (fit.intercept + fit.slope * std::log(ns[i]));
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(k));
  fit.slope_se = std::sqrt(ss / static_cast<double>(k - 2) / sxx);
  return fit;
}

std::string RateFit::to_json() const {
  nlohmann::ordered_json j;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["rms"] = rms;
  j["slope_se"] = slope_se;
  j["n"] = ns;
  j["values"] = values;
  return j.dump(2);
}

}  // namespace edgelab
