#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgelab/flat_toml.hpp"
#include "edgelab/highdim.hpp"
#include "edgelab/process.hpp"

namespace edgelab::tools {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Metric {
  std::string name;
  long n = 0;
  double value = 0.0;
  double uncertainty = 0.0;
};

struct Report {
  std::string preset;
  std::uint64_t seed = 0;
  std::vector<Assertion> assertions;
  std::vector<Metric> metrics;
  /// Effective constants and options, recorded for audit.
  std::map<std::string, std::string> settings;
  /// Extra artifacts: file name -> contents (CSV, JSON, text).
  std::map<std::string, std::string> files;
  std::string svg;
  /// The time budget ran out before every n was processed.
  bool partial = false;

  bool passed() const;
  void check(const std::string& name, bool ok, double value, double threshold, const std::string& detail = {});
  void metric(const std::string& name, double value, double uncertainty = 0.0, long n = 0);
  std::string summary_json() const;
};

struct ExperimentConfig {
  std::string preset;
  std::vector<long> ns;
  std::size_t M = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  double c_T = 0.25;
  double c_tau = 4.0;
  /// B_max = B_max_scale * n^B_max_power unless B_max > 0.
  double B_max = 0.0;
  double B_max_scale = 16.0;
  double B_max_power = 0.5;
  std::string variant = "standardized";
  double budget_seconds = 0.0;
  std::optional<ProcessSpec> process;
  std::optional<HighDimSpec> highdim;
  /// The parsed document, for preset-specific keys.
  toml::Document doc;

  double b_max_at(long n) const;
};

const std::vector<std::string>& preset_names();

/// Parses the TOML text and fills preset defaults. Throws ConfigError.
ExperimentConfig parse_config(const std::string& preset, const std::string& toml_text, std::uint64_t seed,
                              int threads);

/// Runs the preset. Config problems found late still throw ConfigError.
Report run_preset(const ExperimentConfig& config);

/// Writes summary.json, the CSV/JSON/text files and rates.svg into `dir`.
void write_report(const Report& report, const std::string& dir);

/// Text for `--help`: presets, config keys and CSV headers.
std::string help_text();

}  // namespace edgelab::tools
