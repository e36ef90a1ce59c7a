#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "presets.hpp"
#include "svg.hpp"
#include "json.hpp"

using namespace edgelab::tools;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("edgelab_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(parse_config("example1", "[experiment]\nn = []\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("example1", "[experiment]\nbogus = 3\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("example1", "[nowhere]\nn = [8]\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("example1", "n = [8]\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("rates", "[experiment]\nn = [64, 128, 256]\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("rates", "[experiment]\nn = [64, 32, 256, 512]\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("rates", "[experiment]\nM = 0\n", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("nope", "", 1, 1), ConfigError);
    CHECK_THROWS_AS(parse_config("example1", "[experiment\n", 1, 1), ConfigError);
    CHECK_NOTHROW(parse_config("rates", "[experiment]\nn = [64, 128, 256, 512]\n", 1, 1));
  }

  TEST_CASE("defaults are filled in") {
    const auto cfg = parse_config("transition", "", 9, 1);
    CHECK(cfg.seed == 9);
    CHECK(cfg.ns.size() >= 4);
    CHECK(cfg.c_T == 0.25);
    CHECK(cfg.variant == "standardized");
    CHECK(preset_names().size() == 8);
  }

  TEST_CASE("example1 run writes a complete and reproducible report") {
    const auto cfg = parse_config("example1", "", 5, 1);
    const auto report = run_preset(cfg);
    CHECK(report.passed());
    const auto dir = scratch("example1");
    write_report(report, dir.string());
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    for (const char* key : {"preset", "seed", "assertions", "metrics"}) CHECK(summary.contains(key));
    CHECK(summary["preset"] == "example1");
    CHECK(summary["seed"] == 5);
    CHECK(summary["assertions"].is_array());
    CHECK(std::filesystem::exists(dir / "rates.svg"));
    CHECK(std::filesystem::exists(dir / "example1.csv"));

    const auto again = scratch("example1_again");
    write_report(run_preset(parse_config("example1", "", 5, 1)), again.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      CHECK(slurp(entry.path()) == slurp(again / entry.path().filename()));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(again);
  }

  TEST_CASE("shipped configurations parse") {
    for (const auto& p : preset_names()) {
      const auto path = std::filesystem::path(EDGELAB_CONFIG_DIR) / (p + ".toml");
      REQUIRE_MESSAGE(std::filesystem::exists(path), path.string());
      const auto shipped = parse_config(p, slurp(path), 1, 1);
      const auto builtin = parse_config(p, "", 1, 1);
      CHECK_MESSAGE(shipped.ns == builtin.ns, p);
      CHECK_MESSAGE(shipped.M == builtin.M, p);
    }
  }

  TEST_CASE("svg uses plain primitives") {
    PlotSpec p;
    p.title = "t <&>";
    p.series.push_back({"a", {64, 128, 256}, {0.1, 0.05, 0.025}, false});
    p.series.push_back({"b", {64, 128, 256}, {0.0, 0.02, 0.01}, true});
    const auto svg = render_svg(p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("&lt;&amp;&gt;") != std::string::npos);
    const std::set<std::string> allowed = {"svg", "rect", "line", "path", "text", "g", "title"};
    const std::regex tag("<([a-zA-Z]+)");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it)
      CHECK_MESSAGE(allowed.count((*it)[1].str()), (*it)[1].str());
  }

  TEST_CASE("help documents every CSV header") {
    const auto h = help_text();
    for (const char* header :
         {"source,n,a,B_max,value,sqrt_n_value,argmin_b,window_reduced", "metric,n,value,uncertainty",
          "function,n,gap,se,sqrt_n_gap", "n,b,max_abs_T,error", "spec,k,lambda,lambda_se,theta,theta_se",
          "x,exceed,p_hat,wilson_lo,wilson_hi,envelope,below", "m,gap,gap_se,bound",
          "check,value,target,tolerance,passed"})
      CHECK_MESSAGE(h.find(header) != std::string::npos, header);
    for (const auto& p : preset_names()) CHECK(h.find(p) != std::string::npos);
  }

  TEST_CASE("small transition run") {
    const auto cfg = parse_config("transition", "[experiment]\nn = [16, 32, 64, 128]\n", 3, 1);
    const auto report = run_preset(cfg);
    CHECK(report.files.count("transition.csv") == 1);
    CHECK(!report.svg.empty());
    bool lattice = false;
    for (const auto& a : report.assertions)
      if (a.name.find("lattice") != std::string::npos) lattice = true;
    CHECK(lattice);
  }
}
