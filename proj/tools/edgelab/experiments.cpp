#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <unordered_map>

#include "edgelab/charfn.hpp"
#include "edgelab/cumulants.hpp"
#include "edgelab/dependence.hpp"
#include "edgelab/edgeworth.hpp"
#include "edgelab/error.hpp"
#include "edgelab/highdim.hpp"
#include "edgelab/laws.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/normal.hpp"
#include "edgelab/quadrature.hpp"
#include "edgelab/rng.hpp"
#include "svg.hpp"

namespace edgelab::tools {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags. Rates and wasserstein share kTagSamples so both read the same replicates.
constexpr std::uint64_t kTagSamples = 0x73616d706c6573ULL;
constexpr std::uint64_t kTagWeak = 0x7765616bULL;
constexpr std::uint64_t kTagHighDim = 0x68696768ULL;
constexpr std::uint64_t kTagHighDimCheck = 0x68636865636bULL;
constexpr std::uint64_t kTagExample1 = 0x6578616d31ULL;
constexpr std::uint64_t kTagAudit = 0x6175646974ULL;
constexpr std::uint64_t kTagBuiltin = 0x6275696c74ULL;
constexpr std::uint64_t kTagTrunc = 0x7472756e63ULL;
constexpr std::uint64_t kTagTail = 0x7461696cULL;
constexpr std::uint64_t kTagSmoothing = 0x736d6f6f7468ULL;
constexpr std::uint64_t kTagGaussGamma = 0x67676c6177ULL;
constexpr std::uint64_t kTagFourth = 0x666f75727468ULL;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + "\n";
}

class Budget {
 public:
  explicit Budget(double seconds) : limit_(seconds), start_(std::chrono::steady_clock::now()) {}
  bool exhausted() const {
    if (limit_ <= 0.0) return false;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() > limit_;
  }

 private:
  double limit_;
  std::chrono::steady_clock::time_point start_;
};

InnovationStream make_stream(const ExperimentConfig& cfg, std::uint64_t tag, long n, const InnovationLaw& law) {
  return InnovationStream(cfg.seed, mix64(tag, static_cast<std::uint64_t>(n)), law);
}

std::optional<RateFit> try_fit(const std::vector<double>& ns, const std::vector<double>& values) {
  try {
    return fit_rate(ns, values);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

double slope_of(const std::optional<RateFit>& fit) { return fit ? fit->slope : kNaN; }

/// Records the slope as a metric and adds a legend-labelled line to the plot.
std::optional<RateFit> record_rate(Report& r, PlotSpec& plot, const std::string& name,
                                   const std::vector<double>& ns, const std::vector<double>& values) {
  auto fit = try_fit(ns, values);
  if (fit)
    r.metric("slope_" + name, fit->slope, fit->slope_se);
  else
    r.metric("slope_" + name, kNaN, kNaN);
  plot.series.push_back({name + (fit ? " (slope " + g4(fit->slope) + ")" : " (no fit)"), ns, values, false});
  return fit;
}

std::string metric_csv(const Report& r, const std::string& header_prefix = {}) {
  std::string out = header_prefix + "metric,n,value,uncertainty\n";
  for (const auto& m : r.metrics) out += csv_line({m.name, std::to_string(m.n), g17(m.value), g17(m.uncertainty)});
  return out;
}

ProcessSpec ma1_exponential() {
  return ProcessSpec(LinearFamily{{1.0, 0.5}, InnovationLaw::centered_exponential()});
}

ProcessSpec ma1_rademacher() { return ProcessSpec(LinearFamily{{1.0, 0.5}, InnovationLaw::rademacher()}); }

ProcessSpec geometric_linear(int terms, const InnovationLaw& law) {
  std::vector<double> a(terms);
  for (int i = 0; i < terms; ++i) a[i] = std::pow(0.7, i);
  return ProcessSpec(LinearFamily{a, law});
}

/// Exact finite-n cumulants for linear specs; sample moments otherwise.
CumulantSet finite_cumulants(const ProcessSpec& spec, long n, const SampleSet* sample) {
  if (spec.is_linear()) return finite_n_linear(spec.linear_coefficients(), spec.law(), n);
  if (sample == nullptr) throw InvalidArgument("finite-n cumulants of a nonlinear spec need a sample");
  return cumulants_from_sample(*sample);
}

/// Characteristic function of S_n/sqrt(n) when it is known in closed form.
std::optional<CharFnSource> analytic_source(const ProcessSpec& spec, long n) {
  if (!spec.is_linear()) return std::nullopt;
  const auto a = spec.linear_coefficients();
  if (a.size() == 1) return CharFnSource::iid(spec.law(), n);
  return CharFnSource::ma(a, spec.law(), n);
}

/// Exact CDF by Fourier inversion, memoized because the Kolmogorov scans
/// revisit the same grid.
Cdf exact_cdf(const CharFnSource& source) {
  auto cache = std::make_shared<std::unordered_map<double, double>>();
  return [source, cache](double x) {
    if (auto it = cache->find(x); it != cache->end()) return it->second;
    const double v = gil_pelaez_cdf(source, x, 1e-12);
    cache->emplace(x, v);
    return v;
  };
}

bool has_decaying_cf(const std::optional<CharFnSource>& src) {
  return src && std::isfinite(src->decay_point(1e-12));
}

Cdf gaussian_cdf(double s) {
  return [s](double x) { return normal_cdf(x / s); };
}

Cdf expansion_cdf(const EdgeworthExpansion& e) {
  return [e](double x) { return e.cdf(x); };
}

}  // namespace

double exp_double(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  const toml::Table* t = cfg.doc.section("experiment");
  return t ? toml::get_double(*t, key, fallback) : fallback;
}

long exp_int(const ExperimentConfig& cfg, const std::string& key, long fallback) {
  const toml::Table* t = cfg.doc.section("experiment");
  return t ? static_cast<long>(toml::get_int(*t, key, fallback)) : fallback;
}

std::vector<std::string> exp_strings(const ExperimentConfig& cfg, const std::string& key,
                                     const std::vector<std::string>& fallback) {
  const toml::Table* t = cfg.doc.section("experiment");
  if (!t || !t->count(key)) return fallback;
  std::vector<std::string> out;
  for (const auto& v : t->at(key).as_array()) out.push_back(v.as_string());
  return out;
}

std::vector<double> exp_doubles(const ExperimentConfig& cfg, const std::string& key,
                                const std::vector<double>& fallback) {
  const toml::Table* t = cfg.doc.section("experiment");
  if (!t || !t->count(key)) return fallback;
  return t->at(key).as_doubles();
}

// ---------------------------------------------------------------------------

Report run_transition(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  struct Source {
    std::string name;
    std::function<CharFnSource(long)> make;
    std::vector<double> ns, scaled;
  };
  std::vector<Source> sources = {
      {"lattice", [](long n) { return CharFnSource::lattice(n); }, {}, {}},
      {"exponential",
       [](long n) { return CharFnSource::iid(InnovationLaw::centered_exponential(), n); },
       {},
       {}},
  };
  if (cfg.process) {
    const ProcessSpec spec = *cfg.process;
    if (!spec.is_linear()) throw ConfigError("transition: [process] must be IID or linear");
    sources.push_back({"custom", [spec](long n) { return *analytic_source(spec, n); }, {}, {}});
  }

  // Wide b scans resolve the sup well before the default node cap.
  const long max_nodes = exp_int(cfg, "max_nodes", 1L << 18);
  if (max_nodes < 1024) throw ConfigError("max_nodes must be at least 1024");
  r.settings["max_nodes"] = std::to_string(max_nodes);
  std::string csv = "source,n,a,B_max,value,sqrt_n_value,argmin_b,window_reduced\n";
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const double T = cfg.c_T * root_n;
    CharacteristicOptions opt;
    opt.B_max = cfg.b_max_at(n);
    opt.threads = cfg.threads;
    opt.max_nodes = max_nodes;
    for (auto& s : sources) {
      const CharacteristicResult res = characteristic(s.make(n), T, opt);
      const bool reduced =
          std::any_of(res.scans.begin(), res.scans.end(), [](const BScan& b) { return b.window_reduced; });
      csv += csv_line({s.name, std::to_string(n), g17(T), g17(opt.B_max), g17(res.value), g17(root_n * res.value),
                       g17(res.argmin_b), reduced ? "1" : "0"});
      r.metric("sqrt_n_c_" + s.name, root_n * res.value, 0.0, n);
      s.ns.push_back(static_cast<double>(n));
      s.scaled.push_back(root_n * res.value);
    }
  }

  PlotSpec plot{"sqrt(n) times the Berry-Esseen characteristic", "n", "sqrt(n) c", true, true, {}};
  for (const auto& s : sources) record_rate(r, plot, s.name, s.ns, s.scaled);

  const auto& lat = sources[0].scaled;
  const auto& ex = sources[1].scaled;
  const double lat_min = lat.empty() ? kNaN : *std::min_element(lat.begin(), lat.end());
  const double lat_max = lat.empty() ? kNaN : *std::max_element(lat.begin(), lat.end());
  r.check("lattice_sqrt_n_c_min", lat_min >= 0.1, lat_min, 0.1, "no decay: stays above 0.1 at every n");
  r.check("lattice_sqrt_n_c_max", lat_max <= 10.0, lat_max, 10.0, "bounded by 10 at every n");
  const double drop = ex.size() >= 2 && ex.back() > 0.0 ? ex.front() / ex.back() : kNaN;
  const bool exact_zero = ex.size() >= 2 && ex.back() == 0.0 && ex.front() > 0.0;
  r.check("exponential_sqrt_n_c_drop", exact_zero || drop >= 4.0,
          exact_zero ? std::numeric_limits<double>::infinity() : drop, 4.0,
          "first/last ratio across the n range");

  r.files["transition.csv"] = csv;
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct RateSeries {
  std::vector<double> ns, mc_phi, mc_psi, ex_phi, ex_std, ex_aw;
};

}  // namespace

Report run_rates(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  const ProcessSpec spec = cfg.process.value_or(ma1_exponential());
  const auto variant = variant_from_string(cfg.variant);
  const int gp_points = static_cast<int>(exp_int(cfg, "gp_points", 801));
  if (gp_points < 11) throw ConfigError("gp_points must be at least 11");

  RateSeries rs;
  bool exact = true;
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const SampleSet sample =
        simulate_sample_set(spec, make_stream(cfg, kTagSamples, n, spec.law()), n, cfg.M, cfg.threads);
    const CumulantSet cs = finite_cumulants(spec, n, &sample);
    const double s = std::sqrt(cs.s_n_sq);
    const EdgeworthExpansion chosen(s, cs.kappa_n_cu, n, variant);
    const Cdf phi = gaussian_cdf(s);
    const DistReport mc_phi = kolmogorov(sample, phi);
    const DistReport mc_psi = kolmogorov(sample, expansion_cdf(chosen));
    r.metric("s_n", s, 0.0, n);
    r.metric("kappa_n", cs.kappa_n_cu, cs.kappa_n_cu_se, n);
    r.metric("kolmogorov_phi_mc", mc_phi.value, mc_phi.noise + mc_phi.uncertainty, n);
    r.metric("kolmogorov_psi_mc", mc_psi.value, mc_psi.noise + mc_psi.uncertainty, n);
    rs.ns.push_back(static_cast<double>(n));
    rs.mc_phi.push_back(mc_phi.value);
    rs.mc_psi.push_back(mc_psi.value);

    const auto src = analytic_source(spec, n);
    exact = exact && has_decaying_cf(src);
    if (exact) {
      const Cdf F = exact_cdf(*src);
      const EdgeworthExpansion e_std(s, cs.kappa_n_cu, n, EdgeworthExpansion::Variant::Standardized);
      const EdgeworthExpansion e_aw(s, cs.kappa_n_cu, n, EdgeworthExpansion::Variant::AsWritten);
      const DistReport k_phi = kolmogorov(F, phi, -8.0 * s, 8.0 * s, gp_points);
      const DistReport k_std = kolmogorov(F, expansion_cdf(e_std), -8.0 * s, 8.0 * s, gp_points);
      const DistReport k_aw = kolmogorov(F, expansion_cdf(e_aw), -8.0 * s, 8.0 * s, gp_points);
      r.metric("kolmogorov_phi_exact", k_phi.value, k_phi.uncertainty, n);
      r.metric("kolmogorov_psi_standardized_exact", k_std.value, k_std.uncertainty, n);
      r.metric("kolmogorov_psi_as_written_exact", k_aw.value, k_aw.uncertainty, n);
      rs.ex_phi.push_back(k_phi.value);
      rs.ex_std.push_back(k_std.value);
      rs.ex_aw.push_back(k_aw.value);
    }
  }

  PlotSpec plot{"Kolmogorov distance of S_n/sqrt(n)", "n", "distance", true, true, {}};
  const auto f_mc_phi = record_rate(r, plot, "kolmogorov_phi_mc", rs.ns, rs.mc_phi);
  const auto f_mc_psi = record_rate(r, plot, "kolmogorov_psi_mc", rs.ns, rs.mc_psi);
  std::optional<RateFit> f_phi = f_mc_phi, f_std = f_mc_psi, f_aw;
  std::string basis = "Monte Carlo sample";
  if (exact) {
    f_phi = record_rate(r, plot, "kolmogorov_phi_exact", rs.ns, rs.ex_phi);
    f_std = record_rate(r, plot, "kolmogorov_psi_standardized_exact", rs.ns, rs.ex_std);
    f_aw = record_rate(r, plot, "kolmogorov_psi_as_written_exact", rs.ns, rs.ex_aw);
    basis = "exact law by Fourier inversion";
  }
  const double sp = slope_of(f_phi), ss = slope_of(f_std);
  r.check("clt_rate_slope", sp >= -0.65 && sp <= -0.35, sp, -0.35, "in [-0.65, -0.35]; " + basis);
  r.check("edgeworth_rate_slope", ss <= -0.75, ss, -0.75, "standardized expansion; " + basis);
  if (f_aw) {
    const double sa = slope_of(f_aw);
    r.check("standardized_variant_ratified", ss <= sa + 0.05, ss, sa + 0.05,
            "standardized slope vs as-written slope " + g4(sa));
  }
  r.files["rates.csv"] = metric_csv(r);
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

Report run_wasserstein(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  const ProcessSpec spec = cfg.process.value_or(ma1_exponential());
  std::vector<double> ns, w1, root_w1, l2, ex_w1, ex_root_w1, ex_l2, icf;
  bool exact = true;
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const SampleSet sample =
        simulate_sample_set(spec, make_stream(cfg, kTagSamples, n, spec.law()), n, cfg.M, cfg.threads);
    const CumulantSet cs = finite_cumulants(spec, n, &sample);
    const double s = std::sqrt(cs.s_n_sq);
    const Cdf G = gaussian_cdf(s);
    WindowPolicy policy;
    policy.scale = s;
    const DistReport w = wasserstein1(sample, G, policy);
    const DistReport q = lq_distance(sample.sums, G, 2.0, policy, true);
    const double root_n = std::sqrt(static_cast<double>(n));
    r.metric("w1_mc", w.value, w.noise + w.uncertainty, n);
    r.metric("sqrt_n_w1_mc", root_n * w.value, root_n * (w.noise + w.uncertainty), n);
    r.metric("l2_debiased_mc", q.value, q.noise + q.uncertainty, n);
    ns.push_back(static_cast<double>(n));
    w1.push_back(w.value);
    root_w1.push_back(root_n * w.value);
    l2.push_back(q.value);

    const auto analytic = analytic_source(spec, n);
    exact = exact && has_decaying_cf(analytic);
    if (exact) {
      const Cdf F = exact_cdf(*analytic);
      policy.tol = 1e-9;
      const DistReport we = wasserstein1(F, G, policy);
      const DistReport qe = lq_distance(F, G, 2.0, policy);
      r.metric("w1_exact", we.value, we.uncertainty, n);
      r.metric("sqrt_n_w1_exact", root_n * we.value, root_n * we.uncertainty, n);
      r.metric("l2_exact", qe.value, qe.uncertainty, n);
      ex_w1.push_back(we.value);
      ex_root_w1.push_back(root_n * we.value);
      ex_l2.push_back(qe.value);
    }

    const CharFnSource src = analytic ? *analytic : CharFnSource::empirical(sample);
    CharacteristicOptions opt;
    opt.B_max = cfg.b_max_at(n);
    opt.threads = cfg.threads;
    const double tau = cfg.c_tau * std::sqrt(std::log(static_cast<double>(n)));
    const CharacteristicResult ic = integrated_characteristic(src, cfg.c_T * root_n, tau, opt);
    r.metric("integrated_characteristic", ic.value, ic.noise_floor, n);
    icf.push_back(ic.value);
  }

  PlotSpec plot{"Distances to the Gaussian law", "n", "distance", true, true, {}};
  std::optional<RateFit> f_w1 = record_rate(r, plot, "w1_mc", ns, w1);
  std::optional<RateFit> f_l2 = record_rate(r, plot, "l2_debiased_mc", ns, l2);
  std::vector<double> scaled = root_w1;
  std::string basis = "Monte Carlo sample";
  if (exact) {
    f_w1 = record_rate(r, plot, "w1_exact", ns, ex_w1);
    f_l2 = record_rate(r, plot, "l2_exact", ns, ex_l2);
    scaled = ex_root_w1;
    basis = "exact law by Fourier inversion";
  }
  record_rate(r, plot, "integrated_characteristic", ns, icf);

  const double hi = scaled.empty() ? kNaN : *std::max_element(scaled.begin(), scaled.end());
  const double lo = scaled.empty() ? kNaN : *std::min_element(scaled.begin(), scaled.end());
  r.check("sqrt_n_w1_bounded", hi / lo <= 3.0, hi / lo, 3.0, "max/min of sqrt(n) W1 across n; " + basis);
  r.check("w1_slope", slope_of(f_w1) <= -0.4, slope_of(f_w1), -0.4, "W1 to N(0, s_n^2); " + basis);
  r.check("l2_slope", slope_of(f_l2) <= -0.9, slope_of(f_l2), -0.9, "squared L2 distance; " + basis);
  r.files["wasserstein.csv"] = metric_csv(r);
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

Report run_weak(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  const ProcessSpec spec = cfg.process.value_or(ProcessSpec(IidFamily{InnovationLaw::rademacher()}));
  const auto names = exp_strings(cfg, "functions", {"sin", "cos", "bump", "holder"});
  const double freq = exp_double(cfg, "freq", 1.0);
  std::vector<TestFunction> fs;
  for (const auto& name : names) {
    TestFunction f = TestFunction::from_name(name);
    if (f.kind == TestFunction::Kind::Sin || f.kind == TestFunction::Kind::Cos) f.freq = freq;
    fs.push_back(f);
  }
  const auto variant = variant_from_string(cfg.variant);

  std::string csv = "function,n,gap,se,sqrt_n_gap\n";
  std::vector<std::vector<double>> scaled(fs.size());
  std::vector<double> ns, scaled_k;
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const SampleSet sample =
        simulate_sample_set(spec, make_stream(cfg, kTagWeak, n, spec.law()), n, cfg.M, cfg.threads);
    const CumulantSet cs = finite_cumulants(spec, n, &sample);
    const EdgeworthExpansion e(std::sqrt(cs.s_n_sq), cs.kappa_n_cu, n, variant);
    const double root_n = std::sqrt(static_cast<double>(n));
    const DistReport k = kolmogorov(sample, expansion_cdf(e));
    r.metric("sqrt_n_kolmogorov_psi", root_n * k.value, root_n * k.noise, n);
    r.check("sqrt_n_kolmogorov_psi", root_n * k.value >= 0.2, root_n * k.value, 0.2,
            "strong expansion fails at n=" + std::to_string(n));
    ns.push_back(static_cast<double>(n));
    scaled_k.push_back(root_n * k.value);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const WeakGap g = weak_gap(fs[i], sample, e);
      csv += csv_line({fs[i].name(), std::to_string(n), g17(g.gap), g17(g.se), g17(root_n * g.gap)});
      r.metric("sqrt_n_weak_gap_" + names[i], root_n * g.gap, root_n * g.se, n);
      scaled[i].push_back(root_n * g.gap);
      if (fs[i].kind == TestFunction::Kind::Sin)
        r.check("sqrt_n_weak_gap_sin", root_n * g.gap <= 0.05, root_n * g.gap, 0.05,
                "weak expansion holds at n=" + std::to_string(n) + " (se " + g4(root_n * g.se) + ")");
    }
  }

  PlotSpec plot{"Weak versus strong expansion error", "n", "sqrt(n) error", true, false, {}};
  plot.series.push_back({"kolmogorov to Psi", ns, scaled_k, false});
  for (std::size_t i = 0; i < fs.size(); ++i) plot.series.push_back({"weak gap " + names[i], ns, scaled[i], false});
  r.files["weak.csv"] = csv;
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

/// Finite-n variance and third cumulant of the projection when every
/// coordinate is linear; the coordinates are independent.
std::optional<std::pair<double, double>> projection_cumulants(const HighDimSpec& spec, long n) {
  if (spec.square_centered) return std::nullopt;
  double s2 = 0.0, k3 = 0.0;
  for (int i = 0; i < spec.d; ++i) {
    const ProcessSpec& c = spec.coordinates[i];
    if (!c.is_linear()) return std::nullopt;
    const CumulantSet cs = finite_n_linear(c.linear_coefficients(), c.law(), n);
    const double t = spec.theta[i];
    s2 += t * t * cs.s_n_sq;
    k3 += t * t * t * cs.kappa_n_cu;
  }
  return std::make_pair(s2, k3);
}

}  // namespace

Report run_highdim(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  HighDimSpec spec = cfg.highdim ? *cfg.highdim
                                 : build_theta(cfg.ns.front(), cfg.ns.back(), 0.5, 2.0, 0.05, 1.0, 33, 32, 1.0);
  spec.validate();
  const auto groups = rademacher_groups(spec);
  const bool exact = !groups.empty();
  const auto variant = variant_from_string(cfg.variant);
  const std::size_t M_check = static_cast<std::size_t>(exp_int(cfg, "M_check", 2000));

  std::vector<double> ns, proj, scalar, proj_mc;
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const auto band = tail_band(n, spec.alpha, spec.beta, spec.c, spec.C);
    r.metric("tail_band_lo", band.first, 0.0, n);
    r.metric("tail_band_hi", band.second, 0.0, n);
    r.metric("tail_mass", spec.tail_mass(), 0.0, n);

    const SampleSet sample =
        simulate_projection(spec, make_stream(cfg, kTagHighDim, n, InnovationLaw::rademacher()), n, cfg.M, cfg.threads);
    const auto pc = projection_cumulants(spec, n);
    const CumulantSet sc = pc ? CumulantSet{} : cumulants_from_sample(sample);
    const double s2 = pc ? pc->first : sc.s_n_sq;
    const double k3 = pc ? pc->second : sc.kappa_n_cu;
    const EdgeworthExpansion e(std::sqrt(s2), k3, n, variant);
    const DistReport mc = kolmogorov(sample, expansion_cdf(e));
    r.metric("kolmogorov_psi_projection_mc", mc.value, mc.noise, n);
    ns.push_back(static_cast<double>(n));
    proj_mc.push_back(mc.value);

    if (exact) {
      const DistReport ex = exact_rademacher_kolmogorov(groups, n, expansion_cdf(e));
      const EdgeworthExpansion e1(1.0, 0.0, n, variant);
      const DistReport one = exact_rademacher_kolmogorov({{1.0, 1}}, n, expansion_cdf(e1));
      r.metric("kolmogorov_psi_projection_exact", ex.value, ex.uncertainty, n);
      r.metric("kolmogorov_psi_scalar_exact", one.value, one.uncertainty, n);
      proj.push_back(ex.value);
      scalar.push_back(one.value);
    }
  }

  // Structural checks of the tail block, reported rather than asserted:
  // they are many simultaneous 3-SE tests and a few excursions are expected.
  {
    const long n0 = cfg.ns.front();
    const InnovationStream cs = make_stream(cfg, kTagHighDimCheck, n0, InnovationLaw::rademacher());
    const auto cross = block_cross_covariance(spec, cs, n0, M_check, 4, cfg.threads);
    int excursions = 0;
    for (std::size_t h = 0; h < cross.size(); ++h) {
      r.metric("cross_cov_lag" + std::to_string(h), cross[h].value, cross[h].se, n0);
      excursions += std::abs(cross[h].value) > 3.0 * cross[h].se;
    }
    if (spec.I.size() >= 2) {
      const auto mds = martingale_difference_check(spec, cs.substream(1), n0, M_check, cfg.threads);
      for (const auto& e : mds) excursions += std::abs(e.value) > 3.0 * e.se;
      double worst = 0.0;
      for (const auto& e : mds) worst = std::max(worst, e.se > 0.0 ? std::abs(e.value) / e.se : 0.0);
      r.metric("mds_max_abs_z", worst, 0.0, n0);
    }
    r.metric("structure_excursions_3se", excursions, 0.0, n0);
  }

  PlotSpec plot{"Kolmogorov distance of projections to Psi", "n", "distance", true, true, {}};
  std::optional<RateFit> f_proj, f_scalar;
  std::string basis;
  if (exact) {
    f_proj = record_rate(r, plot, "kolmogorov_psi_projection_exact", ns, proj);
    f_scalar = record_rate(r, plot, "kolmogorov_psi_scalar_exact", ns, scalar);
    basis = "exact Rademacher laws";
  }
  const auto f_mc = record_rate(r, plot, "kolmogorov_psi_projection_mc", ns, proj_mc);
  if (!exact) {
    f_proj = f_mc;
    basis = "Monte Carlo sample (no exact law for these coordinates)";
  }
  const double sp = slope_of(f_proj);
  r.check("projection_slope", sp <= -0.65, sp, -0.65, basis);
  if (exact) {
    const double ss = slope_of(f_scalar);
    r.check("projection_steeper_than_scalar", sp <= ss - 0.1, sp, ss - 0.1, "scalar lattice slope " + g4(ss));
  }
  r.files["highdim.csv"] = metric_csv(r);
  r.files["highdim_spec.toml"] = spec.to_toml();
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

Report run_example1(const ExperimentConfig& cfg) {
  Report r;
  Budget budget(cfg.budget_seconds);
  const int b = static_cast<int>(exp_int(cfg, "smoothing_b", 6));
  const int x_points = static_cast<int>(exp_int(cfg, "x_points", 401));
  if (x_points < 2) throw ConfigError("x_points must be at least 2");
  const Example1Family fam = example1_defaults(cfg.c_T, b);

  std::string csv = "n,b,max_abs_T,error\n";
  PlotSpec plot{"Tail integral on the compact spectrum", "b / T_n", "max |T|", true, false, {}};
  for (long n : cfg.ns) {
    if (budget.exhausted()) {
      r.partial = true;
      break;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const double T = cfg.c_T * root_n;
    const CharFnSource src = CharFnSource::example1(n, fam.a, fam.b);
    const double X = 8.0 * src.scale();
    std::vector<double> xs(x_points);
    for (int i = 0; i < x_points; ++i) xs[i] = -X + 2.0 * X * i / (x_points - 1);

    const std::vector<double> bs = {2.0 * T, 4.0 * T, 8.0 * T};
    double worst = 0.0;
    Series series{"n=" + std::to_string(n), {}, {}, false};
    for (double bb : bs) {
      const TailIntegralResult ti = tail_integral(src, T, bb, xs);
      double m = 0.0;
      for (const auto& v : ti.values) m = std::max(m, std::abs(v));
      worst = std::max(worst, m);
      csv += csv_line({std::to_string(n), g17(bb), g17(m), g17(ti.error)});
      r.metric("max_abs_T_b" + g4(bb / T) + "T", m, ti.error, n);
      series.x.push_back(bb / T);
      series.y.push_back(m);
    }
    plot.series.push_back(series);
    r.check("tail_integral_vanishes", worst <= 1e-8, worst, 1e-8, "b in {2T, 4T, 8T}, n=" + std::to_string(n));

    CharacteristicOptions opt;
    opt.b_grid = bs;
    opt.threads = cfg.threads;
    const CharacteristicResult c = characteristic(src, T, opt);
    const double cap = 1.0 / bs.back() + 1e-8;
    r.metric("characteristic", c.value, 0.0, n);
    r.check("characteristic_is_one_over_b", c.value <= cap, c.value, cap, "only the 1/b term survives");
    const double tau = cfg.c_tau * std::sqrt(std::log(static_cast<double>(n)));
    const CharacteristicResult ic = integrated_characteristic(src, T, tau, opt);
    r.metric("integrated_characteristic", ic.value, 0.0, n);
    r.metric("integrated_characteristic_floor", 2.0 * tau / bs.back(), 0.0, n);

    // Monte Carlo view of the process itself.
    const ProcessSpec spec(fam);
    const SampleSet sample =
        simulate_sample_set(spec, make_stream(cfg, kTagExample1, n, spec.law()), n, cfg.M, cfg.threads);
    const SmoothingLaw g(fam.a, fam.b);
    const double s = std::sqrt(1.0 + 2.0 * g.variance() / static_cast<double>(n));
    const EdgeworthExpansion e(s, 0.0, n, variant_from_string(cfg.variant));
    const DistReport k = kolmogorov(sample, expansion_cdf(e));
    r.metric("kolmogorov_psi_mc", k.value, k.noise, n);
  }
  r.files["example1.csv"] = csv;
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Builtin {
  std::string name;
  ProcessSpec spec;
};

std::vector<Builtin> builtin_specs() {
  IteratedMapFamily rc;
  rc.map = IteratedMapFamily::Map::RandomCoefficient;
  rc.rho = 0.5;
  rc.gamma = 0.2;
  IteratedMapFamily tanh_ar;
  tanh_ar.map = IteratedMapFamily::Map::TanhAr;
  tanh_ar.rho = 0.6;
  GarchFamily garch;
  garch.mu = 1.0;
  garch.alpha = {0.2};
  garch.beta = {0.1};
  return {
      {"iid_rademacher", ProcessSpec(IidFamily{InnovationLaw::rademacher()})},
      {"iid_normal", ProcessSpec(IidFamily{InnovationLaw::standard_normal()})},
      {"iid_exponential", ProcessSpec(IidFamily{InnovationLaw::centered_exponential()})},
      {"ma1_rademacher", ma1_rademacher()},
      {"ma1_exponential", ma1_exponential()},
      {"geometric_normal", geometric_linear(20, InnovationLaw::standard_normal())},
      {"garch11", ProcessSpec(garch)},
      {"random_coefficient", ProcessSpec(rc)},
      {"tanh_ar", ProcessSpec(tanh_ar)},
      {"doubling", ProcessSpec(DoublingFamily{16})},
      {"example1", ProcessSpec(example1_defaults())},
  };
}

/// 2 sigma^2 sum_{i >= k} a_i^2, the exact squared coupling distance.
double linear_lambda_sq(const ProcessSpec& spec, long k) {
  const auto a = spec.linear_coefficients();
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(k); i < a.size(); ++i) s += a[i] * a[i];
  return 2.0 * spec.law().variance() * s;
}

}  // namespace

Report run_audit(const ExperimentConfig& cfg) {
  Report r;
  const ProcessSpec spec = cfg.process.value_or(ma1_rademacher());
  const double p = exp_double(cfg, "p", 2.0);
  const long K = exp_int(cfg, "K", 12);
  const long n0 = cfg.ns.front();
  const long lag_window = exp_int(cfg, "lag_window", std::min(n0, 64L));
  const std::size_t M_builtin = static_cast<std::size_t>(exp_int(cfg, "M_builtin", 4000));
  const auto multipliers = exp_doubles(cfg, "tail_multipliers", {2.0, 3.0, 4.0});
  if (K < 1) throw ConfigError("K must be at least 1");

  // Assumption audit of the configured process.
  const AssumptionReport audit =
      assumption_report(spec, p, K, lag_window, cfg.M, make_stream(cfg, kTagAudit, 0, spec.law()), cfg.threads);
  r.files["audit.json"] = audit.to_json();
  r.files["audit.txt"] = audit.to_text();
  r.metric("a1_pass", audit.a1_pass);
  r.metric("a2_pass", audit.a2_pass);
  r.metric("a3_pass", audit.a3_pass);
  r.metric("a2_tail_increment", audit.a2_tail_increment);
  r.metric("longrun_variance", audit.longrun.sigma_sq, audit.longrun.sigma_sq_se);

  std::string dep = "spec,k,lambda,lambda_se,theta,theta_se\n";
  PlotSpec plot{"Functional dependence measure", "k", "lambda_k", false, true, {}};
  {
    Series s{"configured", {}, {}, false};
    for (std::size_t i = 0; i < audit.profile.k.size(); ++i) {
      const long k = audit.profile.k[i];
      const Estimate th = estimate_theta(spec, k, p, cfg.M, make_stream(cfg, kTagAudit, 1000 + k, spec.law()),
                                         cfg.threads);
      const Estimate& la = audit.profile.lambda[i];
      dep += csv_line({"configured", std::to_string(k), g17(la.value), g17(la.se), g17(th.value), g17(th.se)});
      r.metric("lambda_k" + std::to_string(k), la.value, la.se);
      if (k >= 1) {
        s.x.push_back(static_cast<double>(k));
        s.y.push_back(la.value);
      }
    }
    plot.series.push_back(s);
  }

  // lambda_1 against the coupling algebra of linear filters.
  if (spec.is_linear()) {
    const Estimate l1 =
        estimate_lambda(spec, 1, 2.0, cfg.M, make_stream(cfg, kTagAudit, 2001, spec.law()), cfg.threads);
    const double oracle = std::sqrt(linear_lambda_sq(spec, 1));
    const double dev = std::abs(l1.value - oracle);
    r.metric("lambda_1_oracle", oracle);
    r.check("lambda_1_matches_linear_oracle", dev <= 3.0 * l1.se, dev, 3.0 * l1.se,
            "estimate " + g4(l1.value) + " vs " + g4(oracle));
  }

  // IID coefficients vanish identically; the single swap never exceeds twice the tail swap.
  double iid_max = 0.0, excess_max = -std::numeric_limits<double>::infinity();
  std::string worst_spec;
  std::uint64_t tag = 0;
  for (const auto& b : builtin_specs()) {
    const bool iid = b.name.rfind("iid_", 0) == 0;
    for (long k : {1L, 2L, 4L}) {
      const InnovationStream st = make_stream(cfg, kTagBuiltin, static_cast<long>(++tag), b.spec.law());
      const Estimate la = estimate_lambda(b.spec, k, 2.0, M_builtin, st, cfg.threads);
      const Estimate th = estimate_theta(b.spec, k, 2.0, M_builtin, st.substream(1u << 30), cfg.threads);
      dep += csv_line({b.name, std::to_string(k), g17(la.value), g17(la.se), g17(th.value), g17(th.se)});
      const double excess = th.value - 2.0 * la.value - 3.0 * std::sqrt(th.se * th.se + 4.0 * la.se * la.se);
      if (excess > excess_max) {
        excess_max = excess;
        worst_spec = b.name + " k=" + std::to_string(k);
      }
      if (iid) {
        iid_max = std::max({iid_max, la.value, th.value});
        const Estimate l3 = estimate_lambda(b.spec, k, 3.0, M_builtin, st.substream(2), cfg.threads);
        iid_max = std::max(iid_max, l3.value);
      }
    }
  }
  r.check("iid_coefficients_zero", iid_max == 0.0, iid_max, 0.0, "k in {1,2,4}, p in {2,3}");
  r.check("theta_below_twice_lambda", excess_max <= 0.0, excess_max, 0.0, "worst case " + worst_spec);

  // m-dependent approximation of a geometric filter.
  const ProcessSpec geo = geometric_linear(40, InnovationLaw::standard_normal());
  const auto a = geo.linear_coefficients();
  std::string trunc = "m,gap,gap_se,bound\n";
  const long n_trunc = std::max(n0, 1L);
  for (long m : {4L, 8L, 16L}) {
    const Estimate gap = truncation_gap(geo, n_trunc, m, M_builtin,
                                        make_stream(cfg, kTagTrunc, m, geo.law()), cfg.threads);
    double tail = 0.0;
    for (std::size_t i = static_cast<std::size_t>(m) + 1; i < a.size(); ++i) tail += std::abs(a[i]);
    const double bound = 2.0 * std::sqrt(static_cast<double>(n_trunc)) * std::sqrt(geo.law().variance()) * tail;
    trunc += csv_line({std::to_string(m), g17(gap.value), g17(gap.se), g17(bound)});
    r.metric("truncation_gap_m" + std::to_string(m), gap.value, gap.se, n_trunc);
    r.check("truncation_gap_m" + std::to_string(m), gap.value - 3.0 * gap.se <= bound, gap.value - 3.0 * gap.se,
            bound, "geometric filter, n=" + std::to_string(n_trunc));
  }

  // Tail probabilities against the polynomial envelope.
  std::vector<double> xs;
  const double floor = std::sqrt(static_cast<double>(n0) * std::log(static_cast<double>(n0)));
  for (double mlt : multipliers) xs.push_back(mlt * floor);
  TailCheckOptions topt;
  const auto rows = tail_check(spec, n0, cfg.M, xs, make_stream(cfg, kTagTail, n0, spec.law()), topt, cfg.threads);
  std::string tail = "x,exceed,p_hat,wilson_lo,wilson_hi,envelope,below\n";
  for (const auto& row : rows) {
    tail += csv_line({g17(row.x), std::to_string(row.exceed), g17(row.p_hat), g17(row.wilson_lo),
                      g17(row.wilson_hi), g17(row.envelope), row.below ? "1" : "0"});
    r.metric("tail_p_hat_x" + g4(row.x), row.p_hat, row.wilson_hi - row.p_hat, n0);
  }
  const ProcessSpec normal(IidFamily{InnovationLaw::standard_normal()});
  const auto nrows =
      tail_check(normal, n0, cfg.M, xs, make_stream(cfg, kTagTail, n0 + 1, normal.law()), topt, cfg.threads);
  int above = 0;
  for (const auto& row : nrows) above += !row.below;
  r.check("gaussian_tail_below_envelope", above == 0, above, 0, "IID normal, every grid point");

  r.files["dependence.csv"] = dep;
  r.files["truncation.csv"] = trunc;
  r.files["tail.csv"] = tail;
  r.svg = render_svg(plot);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

/// Integral of f over [0, half_periods * pi/2 / scale] panel by panel.
template <class F>
double half_period_sum(F&& f, double scale, int half_periods) {
  const double h = 0.5 * std::numbers::pi / scale;
  double s = 0.0;
  for (int k = 0; k < half_periods; ++k) s += quad::composite(f, k * h, (k + 1) * h, 2);
  return s;
}

/// Mean of |sin|^b over a period.
double sin_power_mean(int b) {
  double c = 1.0;
  for (int i = 1; i <= b / 2; ++i) c = c * (b / 2 + i) / i;
  return c / std::pow(2.0, b);
}

struct LawRow {
  std::string check;
  double value, target, tolerance;
  bool passed;
};

}  // namespace

Report run_lawcheck(const ExperimentConfig& cfg) {
  Report r;
  std::vector<LawRow> rows;
  const auto add = [&](const std::string& name, double value, double target, double tol, const std::string& detail) {
    const bool ok = std::abs(value - target) <= tol;
    rows.push_back({name, value, target, tol, ok});
    r.check(name, ok, std::abs(value - target), tol, detail);
  };

  // Smoothing law.
  const int b = static_cast<int>(exp_int(cfg, "smoothing_b", 6));
  const Example1Family fam = example1_defaults(cfg.c_T, b);
  const SmoothingLaw g(fam.a, b);
  constexpr int kHalfPeriods = 4000;
  const double U = kHalfPeriods * 0.5 * std::numbers::pi;
  const double tail_u = sin_power_mean(b) / ((b - 1) * std::pow(U, b - 1));
  const double mass =
      2.0 * (half_period_sum([&](double x) { return g.density(x); }, fam.a, kHalfPeriods) + g.c_b() * tail_u);
  add("density_integrates_to_one", mass, 1.0, 1e-6, "quadrature over the real line");
  add("cf_at_zero", g.cf(0.0), 1.0, 1e-8, "");
  double beyond = 0.0;
  for (double f : {1.0 + 1e-9, 1.0001, 1.01, 1.5, 2.0, 10.0, 1000.0})
    beyond = std::max({beyond, std::abs(g.cf(f * g.cf_support())), std::abs(g.cf(-f * g.cf_support()))});
  add("cf_vanishes_beyond_support", beyond, 0.0, 1e-8, "");

  const auto ks_m = static_cast<std::size_t>(exp_int(cfg, "ks_samples", 100000));
  const auto draws = g.sample(InnovationStream(cfg.seed, mix64(kTagSmoothing, b), InnovationLaw::uniform()), ks_m);
  const DistReport ks = kolmogorov(draws, [&](double x) { return g.cdf(x); });
  const double ks_tol = 1.36 * std::sqrt(2.0 / static_cast<double>(ks_m));
  rows.push_back({"sampler_ks", ks.value, 0.0, ks_tol, ks.value <= ks_tol});
  r.check("sampler_ks", ks.value <= ks_tol, ks.value, ks_tol, std::to_string(ks_m) + " draws");

  if (b == 6) {
    const double integral =
        2.0 * (half_period_sum(
                   [](double u) {
                     const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
                     return std::pow(s, 6);
                   },
                   1.0, kHalfPeriods) +
               tail_u);
    add("c6_by_quadrature", 1.0 / integral, 20.0 / (11.0 * std::numbers::pi), 1e-8, "");
    add("c6_constant", g.c_b(), 20.0 / (11.0 * std::numbers::pi), 1e-8, "");
  }

  // Gauss-Gamma comparison law matched to a skewed MA(1) sum.
  const ProcessSpec ma = cfg.process && cfg.process->is_linear() ? *cfg.process : ma1_exponential();
  const long n_law = cfg.ns.front();
  const CumulantSet cs = finite_n_linear(ma.linear_coefficients(), ma.law(), n_law);
  const double kappa = cs.kappa_n_cu / std::pow(cs.s_n_sq, 1.5);
  const GaussGammaLaw L = fit_gauss_gamma(1.0, kappa, n_law);
  const auto ls = sample_Ln(L, InnovationStream(cfg.seed, mix64(kTagGaussGamma, n_law), InnovationLaw::uniform()),
                            cfg.M);
  {
    double m2 = 0.0, m3 = 0.0, q2 = 0.0, q3 = 0.0;
    for (double x : ls) {
      const double x2 = x * x, x3 = x2 * x;
      m2 += x2;
      m3 += x3;
      q2 += x2 * x2;
      q3 += x3 * x3;
    }
    const double M = static_cast<double>(ls.size());
    m2 /= M;
    m3 /= M;
    const double se2 = std::sqrt(std::max(0.0, q2 / M - m2 * m2) / M);
    const double se3 = std::sqrt(std::max(0.0, q3 / M - m3 * m3) / M);
    add("comparison_law_second_moment", m2, 1.0, 3.0 * se2, "M=" + std::to_string(ls.size()));
    add("comparison_law_third_moment", m3, kappa, 3.0 * se3, "M=" + std::to_string(ls.size()));
    r.metric("comparison_law_kappa_target", kappa);
  }

  // Closed-form long-run cumulants against exact enumeration.
  {
    const std::vector<ProcessSpec> linear = {
        ma1_exponential(),
        ProcessSpec(LinearFamily{{1.0, -0.4, 0.3, 0.2}, InnovationLaw::centered_exponential(2.0)}),
        geometric_linear(12, InnovationLaw::centered_exponential()),
        ProcessSpec(LinearFamily{{0.8, 0.6, -0.5}, InnovationLaw::custom({-1.0, 2.0}, {2.0 / 3.0, 1.0 / 3.0})}),
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < linear.size(); ++i) {
      const auto& sp = linear[i];
      const auto a = sp.linear_coefficients();
      const LongRunSet closed = longrun_linear(a, sp.law().variance(), sp.law().third_moment());
      const LongRunSet brute = longrun_bruteforce(sp, static_cast<long>(a.size()), 64,
                                                  InnovationStream(cfg.seed, i, sp.law()), BruteForceMethod::Exact);
      worst = std::max({worst, std::abs(closed.sigma_sq - brute.sigma_sq), std::abs(closed.kappa_cu - brute.kappa_cu)});
    }
    rows.push_back({"longrun_closed_vs_exact", worst, 0.0, 1e-10, worst <= 1e-10});
    r.check("longrun_closed_vs_exact", worst <= 1e-10, worst, 1e-10, "four linear filters");
  }

  // Fourth cumulant of S_n grows at most linearly in n.
  {
    const auto fn = exp_doubles(cfg, "fourth_n", {64.0, 256.0});
    if (fn.size() != 2 || !(fn[0] < fn[1])) throw ConfigError("fourth_n needs two increasing values");
    const auto Mf = static_cast<std::size_t>(exp_int(cfg, "M_fourth", 200000));
    FourthMomentCheck fc[2];
    for (int i = 0; i < 2; ++i) {
      const long n = static_cast<long>(fn[i]);
      fc[i] = check_fourth_moment(ma, n, Mf, make_stream(cfg, kTagFourth, n, ma.law()), cfg.threads);
      r.metric("fourth_moment_ratio", fc[i].r, fc[i].se, n);
    }
    const double cap = 2.0 * std::max(fc[0].r, 3.0 * std::max(fc[0].se, fc[1].se));
    rows.push_back({"fourth_moment_ratio", fc[1].r, 0.0, cap, fc[1].r <= cap});
    r.check("fourth_moment_ratio_not_growing", fc[1].r <= cap, fc[1].r, cap,
            "r(" + std::to_string(fc[1].n) + ") vs r(" + std::to_string(fc[0].n) + ")");
  }

  std::string csv = "check,value,target,tolerance,passed\n";
  for (const auto& row : rows)
    csv += csv_line({row.check, g17(row.value), g17(row.target), g17(row.tolerance), row.passed ? "1" : "0"});
  r.files["lawcheck.csv"] = csv;

  PlotSpec plot{"Smoothing law density", "x", "density", false, false, {}};
  Series dens{"g_{a,b}", {}, {}, false};
  const double X = 6.0 * std::sqrt(g.variance());
  for (int i = 0; i <= 200; ++i) {
    const double x = -X + 2.0 * X * i / 200.0;
    dens.x.push_back(x);
    dens.y.push_back(g.density(x));
  }
  plot.series.push_back(dens);
  r.svg = render_svg(plot);
  return r;
}

}  // namespace edgelab::tools
