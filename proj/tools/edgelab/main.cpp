#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "edgelab/error.hpp"
#include "edgelab/parallel.hpp"
#include "json.hpp"
#include "presets.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace edgelab::tools;
  CLI::App app{"edgelab: Edgeworth expansion experiments for dependent sums"};
  app.footer(help_text());
  std::string preset, config_path, out_dir;
  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("preset", preset, "Experiment preset")->required()->check(CLI::IsMember(preset_names()));
  app.add_option("--config", config_path, "TOML configuration (defaults apply when omitted)");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0: EDGELAB_THREADS, then hardware)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) return fail("config", "cannot read " + config_path, 2);
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    const ExperimentConfig cfg = parse_config(preset, text, seed, edgelab::resolve_threads(threads));
    const Report report = run_preset(cfg);
    write_report(report, out_dir);
    for (const auto& a : report.assertions)
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " value=" << a.value << " threshold=" << a.threshold
                << (a.detail.empty() ? "" : " (" + a.detail + ")") << "\n";
    if (report.partial) std::cout << "partial: time budget exhausted\n";
    return report.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const edgelab::NumericalError& e) {
    return fail("numerical", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
}
