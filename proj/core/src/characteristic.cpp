// Berry-Esseen characteristics by FFT scans of the tail integral.
//
// For fixed b, T(x) = 2i Im I(x) with I(x) = int_a^B psi(xi) e^{-i xi x} dxi,
// psi = phi(xi)(1 - xi/b)/xi and B the point beyond which |phi| is
// negligible. psi is sampled on a uniform grid and replaced by its
// piecewise-linear interpolant, whose Fourier integral is exact:
//   I(x) = h e^{-iax} [ W(t) sum_k psi_k e^{-ikt} + (A(t) - W(t)) psi_0
//                       + (conj A(t) - W(t)) psi_K e^{-iKt} ],   t = h x,
//   W(t) = 2(1 - cos t)/t^2,  A(t) = (1 - cos t)/t^2 + i (sin t - t)/t^2.
// The sum is one zero-padded FFT; the largest local maxima are then
// polished by golden-section search on the same interpolant.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "edgelab/charfn.hpp"
#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

using cplx = std::complex<double>;

constexpr double kNegligible = 1e-18;
// Window half-width in units of 1/h; W(1) = 0.92.
constexpr double kThetaMax = 1.0;
constexpr double kInterpTolerance = 1e-2;

double W(double t) {
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return 1.0 - t2 / 12.0 + t2 * t2 / 360.0;
  }
  return 2.0 * (1.0 - std::cos(t)) / (t * t);
}

cplx A(double t) {
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return {0.5 - t2 / 24.0 + t2 * t2 / 720.0, -t / 6.0 + t * t2 / 120.0 - t * t2 * t2 / 5040.0};
  }
  return {(1.0 - std::cos(t)) / (t * t), (std::sin(t) - t) / (t * t)};
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

struct Grid {
  double a = 0.0;
  double h = 0.0;
  std::vector<cplx> psi;  // nodes a + k h, k = 0..K
};

void sample_psi(const CharFnSource& src, double b, double first, double step, std::span<cplx> out, int threads) {
  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (out.size() + chunk - 1) / chunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t hi = std::min(out.size(), (c + 1) * chunk);
    for (std::size_t k = c * chunk; k < hi; ++k) {
      const double xi = first + static_cast<double>(k) * step;
      out[k] = src(xi) * ((1.0 - xi / b) / xi);
    }
  });
}

// Exact Fourier integral of the interpolant at one x over the listed nodes.
cplx filon_direct(const Grid& g, const std::vector<std::size_t>& nodes, double x) {
  const double t = g.h * x;
  const std::size_t K = g.psi.size() - 1;
  // Runs of consecutive nodes advance the phase by one rotation each.
  const cplx rot = std::polar(1.0, -t);
  cplx s = 0.0, z = 0.0;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t k = nodes[i];
    z = (i > 0 && k == prev + 1) ? z * rot : std::polar(1.0, -static_cast<double>(k) * t);
    s += g.psi[k] * z;
    prev = k;
  }
  cplx v = W(t) * s + (A(t) - W(t)) * g.psi[0] + (std::conj(A(t)) - W(t)) * g.psi[K] * std::polar(1.0, -static_cast<double>(K) * t);
  return g.h * std::polar(1.0, -g.a * x) * v;
}

struct ScanRequest {
  double a = 0.0;
  double b = 0.0;
  double tau = 0.0;  // > 0: integrate |T| over [-tau, tau] instead of the sup
};

BScan scan_one(const CharFnSource& src, const ScanRequest& req, const CharacteristicOptions& opt) {
  BScan r;
  r.b = req.b;
  const double a = req.a, b = req.b;
  const double decay = src.decay_point(kNegligible);
  const double B = std::min(b, decay);
  const double tail = B < b ? 2.0 * kNegligible * std::log(b / std::max(B, a)) : 0.0;
  const double floor_term = req.tau > 0.0 ? 2.0 * req.tau / b : 1.0 / b;
  if (B <= a) {
    r.term = 0.0;
    r.error = req.tau > 0.0 ? 2.0 * req.tau * tail : tail;
    r.value = floor_term;
    return r;
  }

  // Frequency step: feature resolution, and enough x-range for the window.
  double x_target = opt.x_window > 0.0 ? opt.x_window : std::max(8.0 * src.scale(), 4.0 * std::numbers::pi * b / a);
  if (req.tau > 0.0) x_target = std::max(req.tau, opt.x_window > 0.0 ? opt.x_window : 0.0);
  const double h = std::min(src.resolution_hint(), kThetaMax / x_target);
  std::size_t K = static_cast<std::size_t>(std::ceil((B - a) / h));
  K = std::clamp<std::size_t>(K, 2, static_cast<std::size_t>(opt.max_nodes));
  r.window_reduced = kThetaMax * static_cast<double>(K) / (B - a) < x_target * (1.0 - 1e-12);

  Grid g;
  g.a = a;
  g.h = (B - a) / static_cast<double>(K);
  g.psi.resize(K + 1);
  sample_psi(src, b, a, g.h, g.psi, opt.threads);

  // Interpolation check against midpoints; halve the step while it fails.
  double interp_err = 0.0;
  for (int round = 0;; ++round) {
    std::vector<cplx> mid(K);
    sample_psi(src, b, a + 0.5 * g.h, g.h, mid, opt.threads);
    double peak = 0.0, worst = 0.0, l1 = 0.0;
    for (std::size_t k = 0; k <= K; ++k) peak = std::max(peak, std::abs(g.psi[k]));
    for (std::size_t k = 0; k < K; ++k) {
      const double d = std::abs(mid[k] - 0.5 * (g.psi[k] + g.psi[k + 1]));
      worst = std::max(worst, d);
      l1 += d;
    }
    interp_err = 2.0 * g.h * l1;
    r.resolved = worst <= kInterpTolerance * peak;
    const bool can_refine = 2 * K <= static_cast<std::size_t>(opt.max_nodes);
    if (r.resolved || !can_refine || round >= 8) {
      if (can_refine && round == 0) {
        // Merge the midpoints for free accuracy.
        std::vector<cplx> merged(2 * K + 1);
        for (std::size_t k = 0; k < K; ++k) {
          merged[2 * k] = g.psi[k];
          merged[2 * k + 1] = mid[k];
        }
        merged[2 * K] = g.psi[K];
        g.psi.swap(merged);
        K *= 2;
        g.h *= 0.5;
      }
      break;
    }
    std::vector<cplx> merged(2 * K + 1);
    for (std::size_t k = 0; k < K; ++k) {
      merged[2 * k] = g.psi[k];
      merged[2 * k + 1] = mid[k];
    }
    merged[2 * K] = g.psi[K];
    g.psi.swap(merged);
    K *= 2;
    g.h *= 0.5;
  }
  r.step = g.h;
  r.nodes = static_cast<long>(K + 1);
  r.x_window = kThetaMax / g.h;

  // Envelope bound 2 int |psi| >= sup |T|.
  double envelope = 0.0;
  for (std::size_t k = 0; k <= K; ++k) envelope += (k == 0 || k == K ? 0.5 : 1.0) * std::abs(g.psi[k]);
  envelope *= 2.0 * g.h;
  const double envelope_term = req.tau > 0.0 ? 2.0 * req.tau * envelope : envelope;
  r.error = interp_err + tail;
  if (!r.resolved || envelope_term <= opt.envelope_skip * floor_term) {
    r.envelope_only = true;
    r.term = envelope_term + (req.tau > 0.0 ? 2.0 * req.tau * tail : tail);
    r.value = r.term + floor_term;
    return r;
  }

  std::size_t N = next_pow2(static_cast<std::size_t>(std::ceil(opt.oversample * static_cast<double>(K + 1))));
  N = std::max(N, next_pow2(K + 1));
  if (N > static_cast<std::size_t>(opt.max_fft)) N = std::max(next_pow2(K + 1), static_cast<std::size_t>(opt.max_fft));
  r.fft_size = static_cast<long>(N);
  const double dx = 2.0 * std::numbers::pi / (static_cast<double>(N) * g.h);
  r.x_spacing = dx;

  fftw_complex* buf = fftw_alloc_complex(N);
  if (!buf) throw NumericalError("characteristic: FFT allocation failed");
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(N), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < N; ++k) {
    buf[k][0] = k <= K ? g.psi[k].real() : 0.0;
    buf[k][1] = k <= K ? g.psi[k].imag() : 0.0;
  }
  fftw_execute(plan);

  const std::size_t jmax = std::min(N / 2 - 1, static_cast<std::size_t>(std::floor(r.x_window / dx)));
  std::vector<double> xs, ts;  // x and |T(x)| in increasing x
  xs.reserve(2 * jmax + 1);
  ts.reserve(2 * jmax + 1);
  const auto T_at = [&](std::size_t idx, double x) {
    const double t = g.h * x;
    const cplx F(buf[idx][0], buf[idx][1]);
    const cplx v = W(t) * F + (A(t) - W(t)) * g.psi[0] +
                   (std::conj(A(t)) - W(t)) * g.psi[K] * std::polar(1.0, -static_cast<double>(K) * t);
    return 2.0 * std::abs((g.h * std::polar(1.0, -a * x) * v).imag());
  };
  for (std::size_t j = jmax; j >= 1; --j) {
    const double x = -static_cast<double>(j) * dx;
    xs.push_back(x);
    ts.push_back(T_at(N - j, x));
  }
  for (std::size_t j = 0; j <= jmax; ++j) {
    const double x = static_cast<double>(j) * dx;
    xs.push_back(x);
    ts.push_back(T_at(j, x));
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  if (req.tau > 0.0) {
    // Trapezoid over grid cells inside [-tau, tau], with linear end pieces.
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double lo = std::max(xs[i], -req.tau), hi = std::min(xs[i + 1], req.tau);
      if (hi <= lo) continue;
      const auto lerp = [&](double x) { return ts[i] + (ts[i + 1] - ts[i]) * (x - xs[i]) / (xs[i + 1] - xs[i]); };
      integral += 0.5 * (lerp(lo) + lerp(hi)) * (hi - lo);
    }
    r.term = integral;
    r.error = 2.0 * req.tau * (interp_err + tail);
    if (r.window_reduced) r.error += (req.tau - r.x_window) * envelope;
    r.value = integral + floor_term;
    return r;
  }

  // Sup: grid maximum, then golden-section polish of the largest local maxima.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const bool left = i == 0 || ts[i] >= ts[i - 1];
    const bool right = i + 1 == ts.size() || ts[i] >= ts[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t p, std::size_t q) { return ts[p] > ts[q]; });
  if (peaks.size() > static_cast<std::size_t>(opt.refine_maxima)) peaks.resize(static_cast<std::size_t>(opt.refine_maxima));
  double best = 0.0, best_x = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] > best) {
      best = ts[i];
      best_x = xs[i];
    }
  if (!peaks.empty() && best > 0.0) {
    double peak = 0.0;
    for (const auto& p : g.psi) peak = std::max(peak, std::abs(p));
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k <= K; ++k)
      if (std::abs(g.psi[k]) > 1e-13 * peak || k == 0 || k == K) support.push_back(k);
    const auto f = [&](double x) { return 2.0 * std::abs(filon_direct(g, support, x).imag()); };
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t p : peaks) {
      // A grid value this far below the best cannot overtake it at 4x oversampling.
      if (ts[p] < 0.5 * best) continue;
      double lo = xs[p] - dx, hi = xs[p] + dx;
      double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
      double fc = f(c), fd = f(d);
      for (int it = 0; it < 40 && hi - lo > 1e-5 * dx; ++it) {
        if (fc > fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - inv_phi * (hi - lo);
          fc = f(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + inv_phi * (hi - lo);
          fd = f(d);
        }
      }
      const double xm = 0.5 * (lo + hi), fm = f(xm);
      if (fm > best) {
        best = fm;
        best_x = xm;
      }
    }
  }
  r.term = best;
  r.x_at_sup = best_x;
  r.value = best + floor_term;
  return r;
}

CharacteristicResult run(const CharFnSource& src, double a, double tau, const CharacteristicOptions& opt) {
  if (!(a > 0.0)) throw InvalidArgument("characteristic: a must be positive");
  std::vector<double> grid = opt.b_grid;
  if (grid.empty()) {
    if (!(opt.B_max > 0.0)) throw InvalidArgument("characteristic: B_max or an explicit b-grid is required");
    grid = geometric_grid(a, opt.B_max, opt.b_points);
  }
  for (double b : grid)
    if (b < a) throw InvalidArgument("characteristic: b-grid must lie in [a, B_max]");
  CharacteristicResult res;
  res.a = a;
  res.tau = tau;
  res.noise_floor = src.noise_floor();
  res.value = std::numeric_limits<double>::infinity();
  for (double b : grid) {
    res.scans.push_back(scan_one(src, ScanRequest{a, b, tau}, opt));
    if (res.scans.back().value < res.value) {
      res.value = res.scans.back().value;
      res.argmin_b = b;
    }
  }
  const double floor = tau > 0.0 ? 2.0 * tau * res.noise_floor : res.noise_floor;
  res.below_floor = res.noise_floor > 0.0 && res.value < floor;
  return res;
}

}  // namespace

std::vector<double> geometric_grid(double a, double B_max, int points) {
  if (!(a > 0.0)) throw InvalidArgument("geometric_grid: a must be positive");
  if (B_max <= a || points <= 1) return {a};
  std::vector<double> g(static_cast<std::size_t>(points));
  const double ratio = std::log(B_max / a) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = a * std::exp(ratio * i);
  g.front() = a;
  g.back() = B_max;
  return g;
}

CharacteristicResult characteristic(const CharFnSource& source, double a, const CharacteristicOptions& options) {
  return run(source, a, 0.0, options);
}

CharacteristicResult integrated_characteristic(const CharFnSource& source, double a, double tau,
                                               const CharacteristicOptions& options) {
  if (!(tau > 0.0)) throw InvalidArgument("integrated_characteristic: tau must be positive");
  return run(source, a, tau, options);
}

std::string CharacteristicResult::to_json() const {
  nlohmann::ordered_json j;
  j["a"] = a;
  j["value"] = value;
  j["argmin_b"] = argmin_b;
  if (tau > 0.0) j["tau"] = tau;
  j["floor"] = noise_floor;
  j["below_floor"] = below_floor;
  auto scans_json = nlohmann::ordered_json::array();
  for (const auto& s : scans)
    scans_json.push_back({{"b", s.b},
                          {"term", s.term},
                          {"value", s.value},
                          {"x_at_sup", s.x_at_sup},
                          {"x_window", s.x_window},
                          {"x_spacing", s.x_spacing},
                          {"step", s.step},
                          {"nodes", s.nodes},
                          {"fft_size", s.fft_size},
                          {"error", s.error},
                          {"envelope_only", s.envelope_only},
                          {"resolved", s.resolved},
                          {"window_reduced", s.window_reduced}});
  j["scans"] = scans_json;
  return j.dump(2);
}

}  // namespace edgelab
