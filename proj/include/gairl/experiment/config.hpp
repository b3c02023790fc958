#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gairl/orchestrator/gairl_loop.hpp"

namespace gairl::experiment {

enum class Variant { baseline, gairl_mlp, gairl_wgangp };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Bad configuration file or value; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  env::EnvKind env = env::EnvKind::mountain_car;
  Variant variant = Variant::gairl_wgangp;
  std::size_t max_episode_steps = 0;  // 0: environment default
  orchestrator::PhaseSchedule schedule;
  orchestrator::ConvergenceCriterion convergence;
  rainbow::AgentConfig agent;
  imagination::ImaginationConfig imagination;
  memory::GairlMemoryConfig memory;
  std::vector<std::uint64_t> seeds = default_seeds();
  std::string output_dir = "runs";
  std::size_t workers = 1;
  /// Per-iteration generative losses in itp_steps.csv.
  bool log_itp_steps = true;
  /// Write the imagination memory of each run to memory.gmem at the end.
  bool dump_memory = false;

  static std::vector<std::uint64_t> default_seeds();
  /// Throws ConfigError naming the violated invariant.
  void validate() const;
  /// Loop configuration for this variant: the baseline drops the
  /// imagination phases and memory writes.
  orchestrator::LoopConfig loop_config() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved configuration, every field present, stable key order.
std::string dump_config(const ExperimentConfig& config);

}  // namespace gairl::experiment
