// Runs the presets at their default settings and prints one verdict per
// acceptance criterion. Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "presets.hpp"

using namespace edgelab::tools;

namespace {

struct Run {
  Report report;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string label;
  std::string preset;
  std::function<bool(const std::string&)> selects;
  double max_seconds;  // 0: no runtime limit
};

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::function<bool(const std::string&)> any_of(std::vector<std::string> prefixes) {
  return [prefixes](const std::string& name) {
    for (const auto& p : prefixes)
      if (starts_with(name, p)) return true;
    return false;
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  const auto all = [](const std::string&) { return true; };
  const std::vector<Criterion> criteria = {
      {1, "comparison-law moments", "lawcheck", any_of({"comparison_law_"}), 10.0},
      {2, "example1 tail integral vanishes", "example1", all, 5.0},
      {3, "lattice vs smooth transition", "transition", all, 60.0},
      {4, "Edgeworth rate beats CLT rate", "rates", all, 600.0},
      {5, "W1 rate", "wasserstein", any_of({"sqrt_n_w1_bounded", "w1_slope"}), 600.0},
      {6, "squared L2 rate", "wasserstein", any_of({"l2_slope"}), 0.0},
      {7, "weak expansion for lattice sums", "weak", all, 0.0},
      {8, "smoothing law", "lawcheck",
       any_of({"density_integrates", "cf_at_zero", "cf_vanishes", "sampler_ks", "c6_"}), 0.0},
      {9, "high-dimensional projection", "highdim", all, 600.0},
      {10, "cumulant oracles", "lawcheck", any_of({"longrun_closed_vs_exact", "fourth_moment_ratio"}), 0.0},
      {11, "dependence coefficients", "audit",
       any_of({"lambda_1_matches", "iid_coefficients_zero", "theta_below_twice_lambda"}), 0.0},
      {12, "m-dependent approximation", "audit", any_of({"truncation_gap_"}), 0.0},
  };

  std::map<std::string, Run> runs;
  const auto run_of = [&](const std::string& preset) -> const Run& {
    auto it = runs.find(preset);
    if (it != runs.end()) return it->second;
    Run r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.report = run_preset(parse_config(preset, "", seed, 0));
    } catch (const std::exception& e) {
      r.report.preset = preset;
      r.report.check("run_error", false, 0.0, 0.0, e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return runs.emplace(preset, std::move(r)).first->second;
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const Run& run = run_of(c.preset);
    bool ok = true;
    int matched = 0;
    std::string why;
    for (const auto& a : run.report.assertions) {
      if (a.name != "run_error" && !c.selects(a.name)) continue;
      ++matched;
      if (!a.passed) {
        ok = false;
        char buf[256];
        std::snprintf(buf, sizeof buf, " %s=%.6g (limit %.6g)", a.name.c_str(), a.value, a.threshold);
        why += buf;
        if (a.name == "run_error") why += " " + a.detail;
      }
    }
    if (matched == 0) {
      ok = false;
      why += " no assertions recorded";
    }
    if (run.report.partial) {
      ok = false;
      why += " partial run";
    }
    if (c.max_seconds > 0.0 && run.seconds > c.max_seconds) {
      ok = false;
      char buf[96];
      std::snprintf(buf, sizeof buf, " runtime %.1fs over %.0fs", run.seconds, c.max_seconds);
      why += buf;
    }
    if (!ok) ++failed;
    std::printf("%s criterion %2d: %s [%s, %d checks, %.1fs]%s\n", ok ? "PASS" : "FAIL", c.id, c.label.c_str(),
                c.preset.c_str(), matched, run.seconds, why.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
