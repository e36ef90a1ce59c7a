#include "presets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "edgelab/error.hpp"
#include "edgelab/edgeworth.hpp"
#include "experiments.hpp"
#include "json.hpp"

namespace edgelab::tools {

namespace {

struct PresetDefaults {
  std::vector<long> ns;
  std::size_t M;
  double B_max_power;
  bool rate_fit;
  std::set<std::string> extra_keys;
  Report (*run)(const ExperimentConfig&);
};

std::vector<long> powers_of_two(int lo, int hi) {
  std::vector<long> out;
  for (int e = lo; e <= hi; ++e) out.push_back(1L << e);
  return out;
}

const std::map<std::string, PresetDefaults>& defaults() {
  static const std::map<std::string, PresetDefaults> table = {
      {"transition", {powers_of_two(8, 13), 0, 1.0, true, {"max_nodes"}, run_transition}},
      {"rates", {powers_of_two(6, 11), 200000, 0.5, true, {"gp_points"}, run_rates}},
      {"wasserstein", {powers_of_two(6, 11), 200000, 0.5, true, {}, run_wasserstein}},
      {"weak", {{4096}, 1000000, 0.5, false, {"functions", "freq"}, run_weak}},
      {"highdim", {powers_of_two(8, 12), 20000, 0.5, true, {"M_check"}, run_highdim}},
      {"example1", {{1024}, 10000, 0.5, false, {"smoothing_b", "x_points"}, run_example1}},
      {"audit",
       {{1024}, 20000, 0.5, false, {"p", "K", "lag_window", "tail_multipliers", "M_builtin"}, run_audit}},
      {"lawcheck",
       {{256}, 1000000, 0.5, false, {"smoothing_b", "ks_samples", "fourth_n", "M_fourth"}, run_lawcheck}},
  };
  return table;
}

const std::set<std::string> kCommonKeys = {"n",           "M",           "c_T",     "c_tau",         "B_max",
                                           "B_max_scale", "B_max_power", "variant", "budget_seconds"};

const toml::Table* experiment_table(const toml::Document& doc) { return doc.section("experiment"); }

}  // namespace

double ExperimentConfig::b_max_at(long n) const {
  if (B_max > 0.0) return B_max;
  return B_max_scale * std::pow(static_cast<double>(n), B_max_power);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, d] : defaults()) v.push_back(name);
    return v;
  }();
  return names;
}

bool Report::passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return true;
}

void Report::check(const std::string& name, bool ok, double value, double threshold, const std::string& detail) {
  assertions.push_back({name, ok, value, threshold, detail});
}

void Report::metric(const std::string& name, double value, double uncertainty, long n) {
  metrics.push_back({name, n, value, uncertainty});
}

std::string Report::summary_json() const {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["seed"] = seed;
  j["passed"] = passed();
  j["partial"] = partial;
  j["settings"] = settings;
  auto as = nlohmann::ordered_json::array();
  for (const auto& a : assertions)
    as.push_back({{"name", a.name},
                  {"passed", a.passed},
                  {"value", a.value},
                  {"threshold", a.threshold},
                  {"detail", a.detail}});
  j["assertions"] = as;
  auto ms = nlohmann::ordered_json::array();
  for (const auto& m : metrics)
    ms.push_back({{"name", m.name}, {"n", m.n}, {"value", m.value}, {"uncertainty", m.uncertainty}});
  j["metrics"] = ms;
  return j.dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& preset, const std::string& toml_text, std::uint64_t seed,
                              int threads) {
  const auto it = defaults().find(preset);
  if (it == defaults().end()) throw ConfigError("unknown preset '" + preset + "'");
  const PresetDefaults& d = it->second;
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.ns = d.ns;
  cfg.M = d.M;
  cfg.B_max_power = d.B_max_power;
  try {
    cfg.doc = toml::parse(toml_text);
    static const std::set<std::string> sections = {"", "experiment", "process", "highdim", "highdim.I", "highdim.Ic"};
    for (const auto& [name, table] : cfg.doc.sections) {
      if (!sections.count(name)) throw ConfigError("unknown section [" + name + "]");
      if (name.empty() && !table.empty()) throw ConfigError("keys outside a section: use [experiment]");
    }
    if (const toml::Table* t = experiment_table(cfg.doc)) {
      for (const auto& [key, value] : *t)
        if (!kCommonKeys.count(key) && !d.extra_keys.count(key))
          throw ConfigError("unknown key '" + key + "' in [experiment] for preset " + preset);
      if (t->count("n")) {
        cfg.ns.clear();
        for (auto v : t->at("n").as_ints()) cfg.ns.push_back(static_cast<long>(v));
      }
      if (t->count("M")) {
        const auto m = t->at("M").as_int();
        if (m < 1) throw ConfigError("M must be positive");
        cfg.M = static_cast<std::size_t>(m);
      }
      cfg.c_T = toml::get_double(*t, "c_T", cfg.c_T);
      cfg.c_tau = toml::get_double(*t, "c_tau", cfg.c_tau);
      cfg.B_max = toml::get_double(*t, "B_max", cfg.B_max);
      cfg.B_max_scale = toml::get_double(*t, "B_max_scale", cfg.B_max_scale);
      cfg.B_max_power = toml::get_double(*t, "B_max_power", cfg.B_max_power);
      cfg.variant = toml::get_string(*t, "variant", cfg.variant);
      cfg.budget_seconds = toml::get_double(*t, "budget_seconds", 0.0);
    }
    if (cfg.ns.empty()) throw ConfigError("n-list is empty");
    for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
      if (cfg.ns[i] < 1) throw ConfigError("n values must be positive");
      if (i > 0 && cfg.ns[i] <= cfg.ns[i - 1]) throw ConfigError("n-list must be strictly increasing");
    }
    if (d.rate_fit && cfg.ns.size() < 4) throw ConfigError("rate-fitting presets need at least 4 n values");
    if (!(cfg.c_T > 0.0) || !(cfg.c_tau > 0.0)) throw ConfigError("c_T and c_tau must be positive");
    if (cfg.B_max < 0.0 || !(cfg.B_max_scale > 0.0)) throw ConfigError("B_max settings must be positive");
    if (!(cfg.budget_seconds >= 0.0)) throw ConfigError("budget_seconds must be >= 0");
    variant_from_string(cfg.variant);
    if (const toml::Table* p = cfg.doc.section("process")) cfg.process = ProcessSpec::from_table(*p);
    if (cfg.doc.section("highdim")) cfg.highdim = HighDimSpec::from_document(cfg.doc);
  } catch (const ConfigError&) {
    throw;
  } catch (const toml::ParseError& e) {
    throw ConfigError(std::string("TOML: ") + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Report run_preset(const ExperimentConfig& config) {
  const auto it = defaults().find(config.preset);
  if (it == defaults().end()) throw ConfigError("unknown preset '" + config.preset + "'");
  Report r;
  try {
    r = it->second.run(config);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const Infeasible& e) {
    throw ConfigError(e.what());
  }
  r.preset = config.preset;
  r.seed = config.seed;
  r.settings["c_T"] = toml::format_double(config.c_T);
  r.settings["c_tau"] = toml::format_double(config.c_tau);
  r.settings["variant"] = config.variant;
  r.settings["M"] = std::to_string(config.M);
  r.settings["B_max"] = config.B_max > 0.0 ? toml::format_double(config.B_max)
                                           : toml::format_double(config.B_max_scale) + " * n^" +
                                                 toml::format_double(config.B_max_power);
  std::string ns;
  for (long n : config.ns) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  r.settings["n"] = ns;
  return r;
}

void write_report(const Report& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << text;
  };
  put("summary.json", report.summary_json());
  for (const auto& [name, text] : report.files) put(name, text);
  put("rates.svg", report.svg);
}

std::string help_text() {
  return R"(Presets:
  transition   Berry-Esseen characteristic of lattice vs centered-exponential sums
  rates        Kolmogorov distance of S_n/sqrt(n) to the normal law and to the Edgeworth expansion
  wasserstein  W1 and L2 distances to the normal law, plus the integrated characteristic
  weak         weak Edgeworth gaps for bounded test functions on lattice sums
  highdim      projections of high-dimensional sums with a martingale-difference tail block
  example1     compact-spectrum smoothing: the tail integral vanishes identically
  audit        dependence coefficients, assumption audit, tail and truncation checks
  lawcheck     smoothing law, comparison law and cumulant identities

Config (TOML):
  [experiment]  n = [..], M, c_T, c_tau, B_max (absolute) or B_max_scale * n^B_max_power,
                variant = "standardized" | "as_written", budget_seconds (0 = unlimited)
                transition: max_nodes (frequency samples per scan, default 262144)
                rates: gp_points | weak: functions = ["sin","cos","bump","holder"], freq
                highdim: M_check | example1: smoothing_b, x_points
                audit: p, K, lag_window, tail_multipliers, M_builtin
                lawcheck: smoothing_b, ks_samples, fourth_n, M_fourth
  [process]     family = "iid" | "linear" | "garch" | "iterated_map" | "doubling" | "example1"
                with law, coefficients, mu, alpha, beta, moment_q, map, rho, gamma, digits, a, b,
                burn_in, truncation_depth
  [highdim]     d, I (1-based), theta, alpha, beta, c, C, n_min, n_max, square_centered
  [highdim.I] / [highdim.Ic]  process blocks for the tail block and the rest

Outputs (in --out):
  summary.json            {preset, seed, passed, partial, settings, assertions[], metrics[]}
  rates.svg               log-log chart with fitted slopes in the legend
  transition.csv          source,n,a,B_max,value,sqrt_n_value,argmin_b,window_reduced
  rates.csv               metric,n,value,uncertainty
  wasserstein.csv         metric,n,value,uncertainty
  weak.csv                function,n,gap,se,sqrt_n_gap
  highdim.csv             metric,n,value,uncertainty
  example1.csv            n,b,max_abs_T,error
  dependence.csv          spec,k,lambda,lambda_se,theta,theta_se
  tail.csv                x,exceed,p_hat,wilson_lo,wilson_hi,envelope,below
  truncation.csv          m,gap,gap_se,bound
  lawcheck.csv            check,value,target,tolerance,passed

Exit codes: 0 all assertions pass, 1 an assertion failed, 2 configuration error.
)";
}

}  // namespace edgelab::tools
