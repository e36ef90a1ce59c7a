#pragma once

#include "presets.hpp"

namespace edgelab::tools {

Report run_transition(const ExperimentConfig& cfg);
Report run_rates(const ExperimentConfig& cfg);
Report run_wasserstein(const ExperimentConfig& cfg);
Report run_weak(const ExperimentConfig& cfg);
Report run_highdim(const ExperimentConfig& cfg);
Report run_example1(const ExperimentConfig& cfg);
Report run_audit(const ExperimentConfig& cfg);
Report run_lawcheck(const ExperimentConfig& cfg);

/// Optional [experiment] keys with a default.
double exp_double(const ExperimentConfig& cfg, const std::string& key, double fallback);
long exp_int(const ExperimentConfig& cfg, const std::string& key, long fallback);
std::vector<std::string> exp_strings(const ExperimentConfig& cfg, const std::string& key,
                                     const std::vector<std::string>& fallback);
std::vector<double> exp_doubles(const ExperimentConfig& cfg, const std::string& key,
                                const std::vector<double>& fallback);

}  // namespace edgelab::tools
