#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scootsense/binning.hpp"
#include "scootsense/detector.hpp"
#include "scootsense/metrics.hpp"

namespace scootsense::pipeline {

inline constexpr const char* kToolVersion = "scootsense 0.1.0";

enum class PemFormula { MemShare, TesShare };

// The config file is the single source of truth; CLI flags override
// individual keys. Relative paths resolve against the config file directory.
struct PipelineConfig {
  std::string network_path;
  std::string schedule_path;
  std::string provider_rules_path;   // optional: built-in defaults when empty
  std::string campus_polygons_path;  // optional
  std::string receptions_path;       // defaults to <out_dir>/receptions.jsonl
  std::string feedback_path;         // defaults to <out_dir>/feedback.csv
  std::string truth_path;            // defaults to <out_dir>/truth.csv
  std::string encounters_path;       // defaults to <out_dir>/encounters.csv
  std::string out_dir = "out";
  std::string timezone = "UTC";

  detect::DetectorParams detector;
  double snap_max_m = 25.0;
  double path_loss_exponent = 2.0;
  bins::HalfSplitRule split_rule = bins::HalfSplitRule::Floor;
  metrics::MemMode mem_mode = metrics::MemMode::MeanOfRatios;
  PemFormula pem_formula = PemFormula::MemShare;

  nlohmann::json sim = nlohmann::json::object();

  static PipelineConfig from_file(const std::string& path);  // throws ConfigError
  static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir);
  void apply_output_defaults();
};

void cmd_simulate(const PipelineConfig& config);
void cmd_detect(const PipelineConfig& config);
void cmd_filter_feedback(const PipelineConfig& config);
void cmd_analyze(const PipelineConfig& config);
void cmd_score(const PipelineConfig& config);

// Parses argv-style arguments (without the program name) and dispatches.
// Returns the process exit code: 0 ok, 1 data error, 2 config error.
int run_cli(const std::vector<std::string>& args);

}  // namespace scootsense::pipeline
