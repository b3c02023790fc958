#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gairl/env/environment.hpp"
#include "gairl/eval/metrics.hpp"
#include "gairl/imagination/imagination.hpp"
#include "gairl/memory/gairl_memory.hpp"
#include "gairl/rainbow/agent.hpp"

namespace gairl::orchestrator {

enum class Phase { mfp, itp, ibp };
std::string to_string(Phase p);

struct PhaseSchedule {
  std::uint64_t mfp_steps = 20000;  // real steps per MFP
  std::uint64_t itp_steps = 40000;  // imagination training iterations per ITP
  std::uint64_t ibp_steps = 60000;  // imagined steps per IBP
  std::size_t max_iterations = 50;

  bool baseline() const { return itp_steps == 0 && ibp_steps == 0; }
  void validate() const;
};

struct ConvergenceCriterion {
  std::size_t window = 100;
  std::size_t min_episodes = 100;
  /// Mean raw return the window must reach; none means the environment default.
  std::optional<double> threshold;

  double threshold_for(env::EnvKind kind) const;
};

/// -200 for MountainCar, -100 for Acrobot.
double default_convergence_threshold(env::EnvKind kind);

/// True iff at least `min_episodes` returns exist and the mean of the last
/// `window` of them reaches the threshold.
bool check_convergence(std::span<const double> episode_returns, env::EnvKind kind,
                       const ConvergenceCriterion& criterion = {});

struct LoopConfig {
  env::EnvKind env = env::EnvKind::mountain_car;
  std::size_t max_episode_steps = 0;  // 0: environment default
  PhaseSchedule schedule;
  rainbow::AgentConfig agent;
  imagination::ImaginationConfig imagination;
  memory::GairlMemoryConfig memory;
  ConvergenceCriterion convergence;
  /// Copy real transitions into the imagination memory during MFPs.
  bool memory_writes = true;

  std::size_t episode_cap() const;
  std::size_t rollout_cap() const;
  void validate() const;
};

struct PhaseLog {
  std::size_t iteration = 0;
  Phase phase = Phase::mfp;
  std::uint64_t steps = 0;          // steps actually run in this phase
  std::uint64_t real_step_end = 0;  // real-step counter when the phase ended
  std::uint64_t agent_step_end = 0;
  std::size_t episodes = 0;  // episodes completed within the phase
  double seconds = 0.0;
  std::optional<imagination::ImaginationMetrics> metrics;  // last ITP metrics
};

struct RunReport {
  std::uint64_t seed = 0;
  std::vector<PhaseLog> phases;
  std::optional<std::uint64_t> real_steps_to_convergence;
  std::uint64_t real_steps = 0;
  std::uint64_t agent_steps = 0;
  std::size_t real_episodes = 0;
  std::optional<double> final_mean100;
  double wall_seconds = 0.0;

  bool converged() const { return real_steps_to_convergence.has_value(); }
  /// Phase sequence as a string such as "MFP ITP IBP MFP".
  std::string phase_trace() const;
};

struct EpisodeRecord {
  std::size_t iteration = 0;
  Phase phase = Phase::mfp;
  std::uint64_t real_step = 0;
  std::uint64_t agent_step = 0;
  double episode_return = 0.0;
  bool truncated = false;
  std::optional<double> mean100;  // real episodes only
};

struct StepRecord {
  Phase phase = Phase::mfp;
  std::uint64_t agent_step = 0;
  int action = 0;
  double reward = 0.0;
  std::optional<double> loss;  // when a batch update ran on this step
};

struct LoopCallbacks {
  std::function<void(const EpisodeRecord&)> on_episode;
  std::function<void(const StepRecord&)> on_step;
  std::function<void(std::size_t iteration, const imagination::ImaginationMetrics&)> on_itp_metrics;
  std::function<void(std::size_t iteration, const imagination::ItpStepStats&)> on_itp_step;
};

/// An episode in progress against some environment.
struct EpisodeCursor {
  env::EnvState state;
  double episode_return = 0.0;
  bool active = false;
};

/// The agent's interaction loop, shared verbatim by the real and the
/// imagined phases: act, step, feed the agent, reset on episode end.
/// `on_transition` sees every transition with its truncation flag;
/// `on_episode_end` receives the episode return and whether it was a
/// truncation, and returns true to stop early.
struct InteractionHooks {
  std::function<void(const memory::Transition&, bool truncated)> on_transition;
  std::function<bool(double episode_return, bool truncated)> on_episode_end;
  std::function<void(const StepRecord&)> on_step;
};

std::uint64_t interact(rainbow::RainbowAgent& agent, env::Environment& environment, Rng& reset_rng,
                       EpisodeCursor& cursor, std::uint64_t steps, std::uint64_t& agent_step, Phase phase,
                       const InteractionHooks& hooks);

/// Algorithm state for one seeded run: MFP -> (ITP -> IBP) until the agent
/// converges on the real environment or the iteration budget runs out.
class GairlLoop {
 public:
  GairlLoop(LoopConfig config, std::uint64_t seed, LoopCallbacks callbacks = {});

  RunReport run();

  /// Individual phases; each returns its log entry. run_mfp stops early
  /// when convergence is reached at an episode end.
  PhaseLog run_mfp(std::uint64_t steps);
  PhaseLog run_itp(std::uint64_t steps);
  PhaseLog run_ibp(std::uint64_t steps);

  bool converged() const { return converged_at_.has_value(); }
  std::uint64_t real_steps() const { return real_steps_; }
  std::uint64_t agent_steps() const { return agent_steps_; }
  const std::vector<double>& real_returns() const { return real_returns_; }
  const RunReport& report() const { return report_; }

  rainbow::RainbowAgent& agent() { return agent_; }
  const memory::GairlMemory& memory() const { return memory_; }
  imagination::Imagination& imagination() { return imagination_; }
  const LoopConfig& config() const { return config_; }

 private:
  void finalize_report();

  LoopConfig config_;
  std::uint64_t seed_;
  LoopCallbacks callbacks_;
  env::ClassicControl env_;
  rainbow::RainbowAgent agent_;
  memory::GairlMemory memory_;
  imagination::Imagination imagination_;
  Rng env_reset_rng_;
  Rng itp_rng_;
  Rng ibp_reset_rng_;
  EpisodeCursor real_cursor_;
  std::uint64_t real_steps_ = 0;
  std::uint64_t agent_steps_ = 0;
  std::size_t iteration_ = 0;
  std::vector<double> real_returns_;
  std::optional<std::uint64_t> converged_at_;
  bool agent_left_real_env_ = false;
  RunReport report_;
};

/// Plain Rainbow on the real environment for at most `max_real_steps`
/// steps, stopping at convergence. Uses the same seed streams as GairlLoop.
RunReport run_standalone_rainbow(const LoopConfig& config, std::uint64_t max_real_steps, std::uint64_t seed,
                                 const LoopCallbacks& callbacks = {});

}  // namespace gairl::orchestrator
