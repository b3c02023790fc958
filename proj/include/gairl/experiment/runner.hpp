#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gairl/eval/metrics.hpp"
#include "gairl/experiment/config.hpp"

namespace gairl::experiment {

struct RunArtifacts {
  std::uint64_t seed = 0;
  std::string directory;
  std::string run_csv;        // real_step,agent_step,iteration,phase,... one row per episode or ITP metric
  std::string itp_steps_csv;  // per ITP iteration losses, empty when disabled
  std::string report_json;    // deterministic RunReport
  std::string timing_json;    // wall-clock seconds per phase
  std::optional<std::string> error;
  orchestrator::RunReport report;
};

struct ExperimentResult {
  std::string config_snapshot;
  std::vector<RunArtifacts> runs;
  std::string summary_csv;
  std::string summary_json;

  bool all_succeeded() const;
};

/// One seeded GAIRL (or baseline) run writing its artifacts into `directory`.
RunArtifacts run_single(const ExperimentConfig& config, std::uint64_t seed, const std::string& directory);

/// Every seed of the configuration, at most `workers` at a time. Runs land in
/// <output_dir>/seed_<n>/; a failing run is recorded in the summary and does
/// not stop its siblings.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string report_to_json(const orchestrator::RunReport& report, const ExperimentConfig& config);

/// Paired per-seed values from two CSV files (rows matched through a "seed"
/// column when both have one, by position otherwise). Empty cells take
/// `missing_value` or raise.
eval::PairedSamples read_paired_columns(const std::string& x_path, const std::string& x_column,
                                        const std::string& y_path, const std::string& y_column,
                                        std::optional<double> missing_value);

}  // namespace gairl::experiment
