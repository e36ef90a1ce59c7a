#include "edgelab/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"

namespace edgelab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> doubling_coefficients(int digits) {
  std::vector<double> a(static_cast<std::size_t>(digits));
  for (int i = 0; i < digits; ++i) a[static_cast<std::size_t>(i)] = std::ldexp(1.0, -i - 1);
  return a;
}

double garch_stationary_variance(const GarchFamily& g) {
  const double s2 = g.law.variance();
  double denom = 1.0;
  for (double a : g.alpha) denom -= a;
  for (double b : g.beta) denom -= b * s2;
  return g.mu / denom;
}

void validate(const Family& family) {
  std::visit(Overloaded{
                 [](const IidFamily&) {},
                 [](const LinearFamily& f) {
                   if (f.coefficients.empty()) throw InvalidArgument("linear: empty coefficient list");
                   for (double a : f.coefficients)
                     if (!std::isfinite(a)) throw InvalidArgument("linear: non-finite coefficient");
                 },
                 [](const GarchFamily& g) {
                   if (!(g.mu > 0.0)) throw InvalidArgument("garch: mu must be positive");
                   for (double a : g.alpha)
                     if (a < 0.0) throw InvalidArgument("garch: alpha must be nonnegative");
                   for (double b : g.beta)
                     if (b < 0.0) throw InvalidArgument("garch: beta must be nonnegative");
                   const double c = garch_contraction(g);
                   if (!(c < 1.0))
                     throw InvalidArgument("garch: stationarity violated, contraction constant " + std::to_string(c) +
                                           " >= 1");
                 },
                 [](const IteratedMapFamily& f) {
                   if (f.map == IteratedMapFamily::Map::RandomCoefficient) {
                     const double c = f.rho * f.rho + f.gamma * f.gamma * f.law.variance();
                     if (!(c < 1.0)) throw InvalidArgument("iterated map: rho^2 + gamma^2 var(eps) must be < 1");
                   } else {
                     if (!(std::abs(f.rho) < 1.0)) throw InvalidArgument("iterated map: |rho| must be < 1");
                     if (!f.law.symmetric())
                       throw InvalidArgument("iterated map: tanh_ar needs a symmetric innovation law");
                   }
                 },
                 [](const DoublingFamily& f) {
                   if (f.digits < 1 || f.digits > 60) throw InvalidArgument("doubling: digits must be in 1..60");
                 },
                 [](const Example1Family& f) { SmoothingLaw(f.a, f.b); },
             },
             family);
}

long default_burn_in(const Family& family) {
  return std::visit(Overloaded{
                        [](const IidFamily&) { return 0L; },
                        [](const LinearFamily& f) { return 4L * static_cast<long>(f.coefficients.size()); },
                        [](const GarchFamily&) { return 512L; },
                        [](const IteratedMapFamily&) { return 512L; },
                        [](const DoublingFamily& f) { return 4L * f.digits; },
                        [](const Example1Family&) { return 4L; },
                    },
                    family);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Innovation eps_s at time s: s >= 1 on the present lane (index s - 1),
// s <= 0 on the past lane (index -s). Coupled copies read the
// independent lane for every s <= 0 (Tail) or only s = 0 (Single).
struct Timeline {
  InnovationStream present, past, copy;
  bool coupled = false;
  Coupling coupling = Coupling::Tail;

  Timeline(const InnovationStream& s, bool coupled_, Coupling c)
      : present(s.lane(InnovationStream::kPresent)),
        past(s.lane(InnovationStream::kPast)),
        copy(s.lane(InnovationStream::kCoupledPast)),
        coupled(coupled_),
        coupling(c) {}

  const InnovationStream& source(long s) const {
    if (s >= 1) return present;
    if (coupled && (coupling == Coupling::Tail || s == 0)) return copy;
    return past;
  }
  static std::uint64_t index(long s) { return s >= 1 ? static_cast<std::uint64_t>(s - 1) : static_cast<std::uint64_t>(-s); }

  double at(long s) const { return source(s).value(index(s)); }

  // eps_{s0}..eps_{s1} in time order.
  std::vector<double> window(long s0, long s1) const {
    std::vector<double> out(static_cast<std::size_t>(std::max(0L, s1 - s0 + 1)));
    long s = s0;
    std::size_t i = 0;
    for (; s <= std::min(s1, 0L); ++s, ++i) out[i] = at(s);
    if (s <= s1) present.fill(static_cast<std::uint64_t>(s - 1), std::span<double>(out).subspan(i));
    return out;
  }
};

double example1_h(const SmoothingLaw& g, const InnovationStream& lane_stream, std::uint64_t index) {
  Rng rng(mix64(lane_stream.key(), index), 256 + lane_stream.lane_id());
  return g.sample(rng);
}

// U component of eps_s is U_{s-1}; H component is H_s.
struct Example1Source {
  SmoothingLaw g;
  const Timeline& tl;
  double U(long s) const { return tl.at(s); }
  double H(long s) const { return example1_h(g, tl.source(s), Timeline::index(s)); }
  double X(long k) const { return U(k) + H(k) - H(k - 1); }
};

class Recursion {
 public:
  explicit Recursion(const Family& f) : family_(f) { reset(); }

  void reset() {
    if (const auto* g = std::get_if<GarchFamily>(&family_)) {
      const double v2 = garch_stationary_variance(*g);
      v2_.assign(g->alpha.size(), v2);
      y2_.assign(g->beta.size(), v2 * g->law.variance());
    } else {
      y_ = 0.0;
    }
  }

  double step(double eps) {
    if (const auto* g = std::get_if<GarchFamily>(&family_)) {
      double v2 = g->mu;
      for (std::size_t i = 0; i < g->alpha.size(); ++i) v2 += g->alpha[i] * v2_[i];
      for (std::size_t j = 0; j < g->beta.size(); ++j) v2 += g->beta[j] * y2_[j];
      const double y = eps * std::sqrt(v2);
      if (!v2_.empty()) {
        std::copy_backward(v2_.begin(), v2_.end() - 1, v2_.end());
        v2_[0] = v2;
      }
      if (!y2_.empty()) {
        std::copy_backward(y2_.begin(), y2_.end() - 1, y2_.end());
        y2_[0] = y * y;
      }
      return y;
    }
    const auto& f = std::get<IteratedMapFamily>(family_);
    if (f.map == IteratedMapFamily::Map::RandomCoefficient)
      y_ = (f.rho + f.gamma * eps) * y_ + eps;
    else
      y_ = f.rho * std::tanh(y_) + eps;
    return y_;
  }

 private:
  const Family& family_;
  std::vector<double> v2_, y2_;
  double y_ = 0.0;
};

// X_{t_first}..X_{t_last} on the given timeline.
std::vector<double> evaluate(const ProcessSpec& spec, const Timeline& tl, long t_first, long t_last) {
  const std::size_t count = static_cast<std::size_t>(t_last - t_first + 1);
  std::vector<double> x(count);
  const Family& family = spec.family();
  if (const auto* e = std::get_if<Example1Family>(&family)) {
    Example1Source src{SmoothingLaw(e->a, e->b), tl};
    for (std::size_t i = 0; i < count; ++i) x[i] = src.X(t_first + static_cast<long>(i));
    return x;
  }
  if (spec.is_linear()) {
    const auto a = spec.linear_coefficients();
    const long L = static_cast<long>(a.size()) - 1;
    const auto eps = tl.window(t_first - L, t_last);
    for (std::size_t i = 0; i < count; ++i) {
      double v = 0.0;
      for (long j = 0; j <= L; ++j) v += a[static_cast<std::size_t>(j)] * eps[i + static_cast<std::size_t>(L - j)];
      x[i] = v;
    }
    return x;
  }
  Recursion rec(family);
  const long m = spec.truncation_depth();
  if (m > 0) {
    const auto eps = tl.window(t_first - m, t_last);
    for (std::size_t i = 0; i < count; ++i) {
      rec.reset();
      double v = 0.0;
      for (long j = 0; j <= m; ++j) v = rec.step(eps[i + static_cast<std::size_t>(j)]);
      x[i] = v;
    }
    return x;
  }
  const long burn = spec.burn_in();
  const auto eps = tl.window(t_first - burn, t_last);
  for (long j = 0; j < burn; ++j) rec.step(eps[static_cast<std::size_t>(j)]);
  for (std::size_t i = 0; i < count; ++i) x[i] = rec.step(eps[static_cast<std::size_t>(burn) + i]);
  return x;
}

}  // namespace

double garch_contraction(const GarchFamily& g) {
  const std::size_t r = std::max(g.alpha.size(), g.beta.size());
  const double m2 = g.law.variance(), m4 = g.law.fourth_moment();
  double c = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double a = i < g.alpha.size() ? g.alpha[i] : 0.0;
    const double b = i < g.beta.size() ? g.beta[i] : 0.0;
    if (g.moment_q == 2.0)
      c += a + b * m2;
    else if (g.moment_q == 4.0)
      c += std::sqrt(a * a + 2.0 * a * b * m2 + b * b * m4);
    else
      throw InvalidArgument("garch: moment_q must be 2 or 4");
  }
  return c;
}

ProcessSpec::ProcessSpec(Family family, long burn_in) : family_(std::move(family)) {
  validate(family_);
  burn_in_ = burn_in < 0 ? default_burn_in(family_) : burn_in;
  const long mem = memory();
  if (mem >= 0 && burn_in_ < mem)
    throw InvalidArgument("burn_in " + std::to_string(burn_in_) + " is shorter than the memory length " +
                          std::to_string(mem));
}

long ProcessSpec::memory() const noexcept {
  return std::visit(Overloaded{
                        [](const IidFamily&) { return 0L; },
                        [](const LinearFamily& f) { return static_cast<long>(f.coefficients.size()) - 1; },
                        [this](const GarchFamily&) { return truncation_depth_ > 0 ? truncation_depth_ : -1L; },
                        [this](const IteratedMapFamily&) { return truncation_depth_ > 0 ? truncation_depth_ : -1L; },
                        [](const DoublingFamily& f) { return static_cast<long>(f.digits) - 1; },
                        [](const Example1Family&) { return 1L; },
                    },
                    family_);
}

InnovationLaw ProcessSpec::law() const {
  return std::visit(Overloaded{
                        [](const IidFamily& f) { return f.law; },
                        [](const LinearFamily& f) { return f.law; },
                        [](const GarchFamily& f) { return f.law; },
                        [](const IteratedMapFamily& f) { return f.law; },
                        [](const DoublingFamily&) { return InnovationLaw::rademacher(); },
                        [](const Example1Family&) { return InnovationLaw::rademacher(); },
                    },
                    family_);
}

std::string ProcessSpec::family_name() const {
  static const char* names[] = {"iid", "linear", "garch", "iterated_map", "doubling", "example1"};
  return names[family_.index()];
}

bool ProcessSpec::is_linear() const noexcept {
  return std::holds_alternative<IidFamily>(family_) || std::holds_alternative<LinearFamily>(family_) ||
         std::holds_alternative<DoublingFamily>(family_);
}

std::vector<double> ProcessSpec::linear_coefficients() const {
  if (std::holds_alternative<IidFamily>(family_)) return {1.0};
  if (const auto* f = std::get_if<LinearFamily>(&family_)) return f->coefficients;
  if (const auto* f = std::get_if<DoublingFamily>(&family_)) return doubling_coefficients(f->digits);
  throw InvalidArgument(family_name() + " is not a linear family");
}

std::string ProcessSpec::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_toml())));
  return buf;
}

ProcessSpec ProcessSpec::with_truncation(long depth, bool approximate) const {
  ProcessSpec out = *this;
  out.truncation_depth_ = depth;
  out.approximate_ = approximate;
  return out;
}

Path simulate_path(const ProcessSpec& spec, const InnovationStream& stream, long n) {
  if (n < 1) throw InvalidArgument("simulate_path: n must be positive");
  const Timeline tl(stream.with_law(spec.law()), false, Coupling::Tail);
  Path p;
  p.values = evaluate(spec, tl, 1, n);
  p.n = n;
  p.spec_fingerprint = spec.fingerprint();
  p.stream_fingerprint = stream.fingerprint();
  return p;
}

Example1Draws example1_draws(const Example1Family& family, const InnovationStream& stream, long n) {
  if (n < 1) throw InvalidArgument("example1_draws: n must be positive");
  const Timeline tl(stream.with_law(InnovationLaw::rademacher()), false, Coupling::Tail);
  const Example1Source src{SmoothingLaw(family.a, family.b), tl};
  Example1Draws d;
  d.U = tl.window(1, n);
  d.H.resize(static_cast<std::size_t>(n) + 1);
  for (long t = 0; t <= n; ++t) d.H[static_cast<std::size_t>(t)] = src.H(t);
  return d;
}

double simulate_normalized_sum(const ProcessSpec& spec, const InnovationStream& replicate_stream, long n) {
  if (n < 1) throw InvalidArgument("simulate_normalized_sum: n must be positive");
  const InnovationStream stream = replicate_stream.with_law(spec.law());
  const double root_n = std::sqrt(static_cast<double>(n));
  const Family& family = spec.family();

  if (const auto* e = std::get_if<Example1Family>(&family)) {
    // S_n = U_0 + ... + U_{n-1} + H_n - H_0.
    const Timeline tl(stream, false, Coupling::Tail);
    const Example1Source src{SmoothingLaw(e->a, e->b), tl};
    const double u_sum = tl.present.sum(0, static_cast<std::uint64_t>(n));
    return (u_sum + src.H(n) - src.H(0)) / root_n;
  }

  if (spec.is_linear()) {
    // S_n = sum_t c_t eps_t with c_t = sum of a_i over 1 <= t + i <= n.
    const auto a = spec.linear_coefficients();
    const long L = static_cast<long>(a.size()) - 1;
    std::vector<double> prefix(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) prefix[i + 1] = prefix[i] + a[i];
    const auto weight = [&](long t) {
      const long lo = std::max(0L, 1 - t), hi = std::min(L, n - t);
      return hi < lo ? 0.0 : prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    };
    const Timeline tl(stream, false, Coupling::Tail);
    double s = 0.0;
    const long interior_end = n - L;
    long t = 1;
    if (interior_end >= 1) {
      s = prefix.back() * tl.present.sum(0, static_cast<std::uint64_t>(interior_end));
      t = interior_end + 1;
    }
    const auto head = tl.window(t, n);
    for (std::size_t i = 0; i < head.size(); ++i) s += weight(t + static_cast<long>(i)) * head[i];
    if (L > 0) {
      const auto past = tl.window(1 - L, 0);
      for (std::size_t i = 0; i < past.size(); ++i) s += weight(1 - L + static_cast<long>(i)) * past[i];
    }
    return s / root_n;
  }

  const Timeline tl(stream, false, Coupling::Tail);
  const auto x = evaluate(spec, tl, 1, n);
  double s = 0.0;
  for (double v : x) s += v;
  return s / root_n;
}

SampleSet simulate_sample_set(const ProcessSpec& spec, const InnovationStream& stream, long n, std::size_t M,
                              int threads) {
  if (n < 1) throw InvalidArgument("simulate_sample_set: n must be positive");
  if (M < 1) throw InvalidArgument("simulate_sample_set: M must be positive");
  SampleSet out;
  out.sums.resize(M);
  parallel_for(M, threads, [&](std::size_t j) { out.sums[j] = simulate_normalized_sum(spec, stream.substream(j), n); });
  out.n = n;
  out.spec_fingerprint = spec.fingerprint();
  out.stream_fingerprint = stream.fingerprint();
  out.seed = stream.seed();
  return out;
}

std::pair<double, double> simulate_coupled_pair(const ProcessSpec& spec, const InnovationStream& stream, long k,
                                                Coupling coupling) {
  if (k < 0) throw InvalidArgument("simulate_coupled_pair: k must be nonnegative");
  const InnovationStream s = stream.with_law(spec.law());
  const Timeline original(s, false, coupling), coupled(s, true, coupling);
  return {evaluate(spec, original, k, k)[0], evaluate(spec, coupled, k, k)[0]};
}

ProcessSpec truncate_mdep(const ProcessSpec& spec, long m) {
  if (m < 1) throw InvalidArgument("truncate_mdep: m must be positive");
  const Family& family = spec.family();
  if (const auto* f = std::get_if<LinearFamily>(&family)) {
    if (static_cast<long>(f->coefficients.size()) <= m + 1) return spec;
    LinearFamily g = *f;
    g.coefficients.resize(static_cast<std::size_t>(m) + 1);
    return ProcessSpec(g, spec.burn_in());
  }
  if (const auto* f = std::get_if<DoublingFamily>(&family)) {
    if (f->digits <= m + 1) return spec;
    return ProcessSpec(DoublingFamily{static_cast<int>(m) + 1}, spec.burn_in());
  }
  if (std::holds_alternative<IidFamily>(family) || std::holds_alternative<Example1Family>(family)) return spec;
  // The random-coefficient recursion started from 0 is exactly the
  // conditional mean (the dropped part is a centered product times Y);
  // GARCH and tanh maps only approximate it.
  bool approximate = true;
  if (const auto* f = std::get_if<IteratedMapFamily>(&family))
    approximate = f->map != IteratedMapFamily::Map::RandomCoefficient;
  return spec.with_truncation(m, approximate);
}

SampleSet smooth_diamond(const SampleSet& sample, const SmoothingLaw& law, const InnovationStream& stream) {
  SampleSet out = sample;
  const double root_n = std::sqrt(static_cast<double>(sample.n));
  for (std::size_t j = 0; j < sample.sums.size(); ++j) {
    Rng rng = stream.substream(j).sequential(2);
    const double h_n = law.sample(rng);
    const double h_0 = law.sample(rng);
    out.sums[j] = sample.sums[j] + (h_n - h_0) / root_n;
  }
  out.stream_fingerprint = sample.stream_fingerprint + "+diamond(" + stream.fingerprint() + ")";
  return out;
}

Example1Family example1_defaults(double c_T, int b) {
  if (!(c_T > 0.0)) throw InvalidArgument("example1_defaults: c_T must be positive");
  return Example1Family{c_T / (2.0 * b), b};
}

}  // namespace edgelab
