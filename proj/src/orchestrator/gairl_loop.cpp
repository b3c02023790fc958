#include "gairl/orchestrator/gairl_loop.hpp"

#include <chrono>
#include <stdexcept>

namespace gairl::orchestrator {

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

env::EnvConfig env_config(const LoopConfig& c, std::uint64_t seed) {
  return {c.env, c.episode_cap(), derive_seed(seed, "env")};
}

PhaseLog start_log(std::size_t iteration, Phase phase) {
  PhaseLog log;
  log.iteration = iteration;
  log.phase = phase;
  return log;
}

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::mfp: return "MFP";
    case Phase::itp: return "ITP";
    case Phase::ibp: return "IBP";
  }
  return "?";
}

void PhaseSchedule::validate() const {
  if (mfp_steps == 0) throw std::invalid_argument("schedule: MFP length must be positive");
  if (ibp_steps > 0 && itp_steps == 0) throw std::invalid_argument("schedule: an IBP needs a preceding ITP");
}

double default_convergence_threshold(env::EnvKind kind) {
  return kind == env::EnvKind::mountain_car ? -200.0 : -100.0;
}

double ConvergenceCriterion::threshold_for(env::EnvKind kind) const {
  return threshold.value_or(default_convergence_threshold(kind));
}

bool check_convergence(std::span<const double> episode_returns, env::EnvKind kind, const ConvergenceCriterion& c) {
  if (episode_returns.empty() || episode_returns.size() < c.min_episodes) return false;
  return eval::mean_recent_reward(episode_returns, c.window) >= c.threshold_for(kind);
}

std::size_t LoopConfig::episode_cap() const {
  return max_episode_steps > 0 ? max_episode_steps : env::default_max_episode_steps(env);
}

std::size_t LoopConfig::rollout_cap() const {
  return imagination.rollout_step_cap > 0 ? imagination.rollout_step_cap : episode_cap();
}

void LoopConfig::validate() const {
  schedule.validate();
  agent.validate();
  imagination.validate();
  memory.validate();
  if (convergence.window == 0) throw std::invalid_argument("convergence window must be positive");
  if (!schedule.baseline() && !memory_writes)
    throw std::invalid_argument("imagination phases need memory writes enabled");
}

std::string RunReport::phase_trace() const {
  std::string s;
  for (const auto& p : phases) {
    if (!s.empty()) s += ' ';
    s += to_string(p.phase);
  }
  return s;
}

std::uint64_t interact(rainbow::RainbowAgent& agent, env::Environment& environment, Rng& reset_rng,
                       EpisodeCursor& cursor, std::uint64_t steps, std::uint64_t& agent_step, Phase phase,
                       const InteractionHooks& hooks) {
  std::uint64_t done = 0;
  while (done < steps) {
    if (!cursor.active) {
      cursor.state = environment.reset(reset_rng);
      cursor.episode_return = 0.0;
      cursor.active = true;
    }
    const int action = agent.select_action(cursor.state.normalized, agent_step, nn::Mode::train);
    env::StepResult r = environment.step(cursor.state, action);
    const memory::Transition t{cursor.state.normalized, action, r.reward_normalized, r.next_state.normalized,
                               r.terminal};
    const auto stats = agent.observe(t, r.truncated, agent_step);
    if (hooks.on_step) {
      StepRecord rec{phase, agent_step, action, r.reward_raw, std::nullopt};
      if (stats) rec.loss = stats->loss;
      hooks.on_step(rec);
    }
    ++agent_step;
    ++done;
    cursor.episode_return += r.reward_raw;
    if (hooks.on_transition) hooks.on_transition(t, r.truncated);
    if (r.terminal || r.truncated) {
      cursor.active = false;
      if (hooks.on_episode_end && hooks.on_episode_end(cursor.episode_return, r.truncated)) break;
    } else {
      cursor.state = std::move(r.next_state);
    }
  }
  return done;
}

GairlLoop::GairlLoop(LoopConfig config, std::uint64_t seed, LoopCallbacks callbacks)
    : config_((config.validate(), std::move(config))),
      seed_(seed),
      callbacks_(std::move(callbacks)),
      env_(env_config(config_, seed)),
      agent_(config_.agent, env_.state_size(), env_.action_count(), seed),
      memory_(config_.memory, derive_seed(seed, "gairl-memory")),
      imagination_(config_.imagination, env_.state_size(), env_.action_count(), derive_seed(seed, "imagination")),
      env_reset_rng_(make_rng(seed, "env-reset")),
      itp_rng_(make_rng(seed, "itp")),
      ibp_reset_rng_(make_rng(seed, "ibp-reset")) {
  report_.seed = seed;
}

PhaseLog GairlLoop::run_mfp(std::uint64_t steps) {
  const auto t0 = Clock::now();
  PhaseLog log = start_log(iteration_, Phase::mfp);
  if (agent_left_real_env_) {
    agent_.end_segment();
    agent_left_real_env_ = false;
  }
  eval::RecentMean recent(config_.convergence.window);
  InteractionHooks hooks;
  hooks.on_step = callbacks_.on_step;
  hooks.on_transition = [&](const memory::Transition& t, bool truncated) {
    ++real_steps_;
    if (config_.memory_writes) memory_.store(t, truncated);
  };
  hooks.on_episode_end = [&](double ret, bool truncated) {
    real_returns_.push_back(ret);
    ++log.episodes;
    const bool done = check_convergence(real_returns_, config_.env, config_.convergence);
    if (callbacks_.on_episode) {
      EpisodeRecord rec{iteration_, Phase::mfp, real_steps_, agent_steps_, ret, truncated,
                        eval::mean_recent_reward(real_returns_, config_.convergence.window)};
      callbacks_.on_episode(rec);
    }
    if (done && !converged_at_) converged_at_ = real_steps_;
    return done;
  };
  log.steps = interact(agent_, env_, env_reset_rng_, real_cursor_, steps, agent_steps_, Phase::mfp, hooks);
  log.real_step_end = real_steps_;
  log.agent_step_end = agent_steps_;
  log.seconds = seconds_since(t0);
  return log;
}

PhaseLog GairlLoop::run_itp(std::uint64_t steps) {
  const auto t0 = Clock::now();
  PhaseLog log = start_log(iteration_, Phase::itp);
  imagination::ItpStepCallback on_step;
  if (callbacks_.on_itp_step)
    on_step = [this](const imagination::ItpStepStats& s) { callbacks_.on_itp_step(iteration_, s); };
  const auto trace = imagination_.train(memory_, steps, itp_rng_, on_step);
  if (callbacks_.on_itp_metrics)
    for (const auto& m : trace) callbacks_.on_itp_metrics(iteration_, m);
  if (!trace.empty()) log.metrics = trace.back();
  log.steps = steps;
  log.real_step_end = real_steps_;
  log.agent_step_end = agent_steps_;
  log.seconds = seconds_since(t0);
  return log;
}

PhaseLog GairlLoop::run_ibp(std::uint64_t steps) {
  const auto t0 = Clock::now();
  PhaseLog log = start_log(iteration_, Phase::ibp);
  if (!imagination_.trained()) throw std::logic_error("IBP needs a trained imagination");
  agent_.end_segment();
  agent_left_real_env_ = true;
  imagination::ImaginedEnvironment imagined(imagination_, memory_, config_.env, config_.rollout_cap(),
                                            derive_seed(derive_seed(seed_, "ibp-noise"), std::to_string(iteration_)));
  EpisodeCursor cursor;
  InteractionHooks hooks;
  hooks.on_step = callbacks_.on_step;
  hooks.on_episode_end = [&](double ret, bool truncated) {
    ++log.episodes;
    if (callbacks_.on_episode)
      callbacks_.on_episode({iteration_, Phase::ibp, real_steps_, agent_steps_, ret, truncated, std::nullopt});
    return false;
  };
  log.steps = interact(agent_, imagined, ibp_reset_rng_, cursor, steps, agent_steps_, Phase::ibp, hooks);
  log.real_step_end = real_steps_;
  log.agent_step_end = agent_steps_;
  log.seconds = seconds_since(t0);
  return log;
}

RunReport GairlLoop::run() {
  const auto t0 = Clock::now();
  const auto& s = config_.schedule;
  for (; iteration_ < s.max_iterations && !converged(); ++iteration_) {
    report_.phases.push_back(run_mfp(s.mfp_steps));
    if (converged()) break;
    if (s.itp_steps > 0) report_.phases.push_back(run_itp(s.itp_steps));
    if (s.ibp_steps > 0) report_.phases.push_back(run_ibp(s.ibp_steps));
  }
  report_.wall_seconds = seconds_since(t0);
  finalize_report();
  return report_;
}

void GairlLoop::finalize_report() {
  report_.real_steps_to_convergence = converged_at_;
  report_.real_steps = real_steps_;
  report_.agent_steps = agent_steps_;
  report_.real_episodes = real_returns_.size();
  report_.final_mean100.reset();
  if (!real_returns_.empty()) report_.final_mean100 = eval::mean_recent_reward(real_returns_, config_.convergence.window);
}

RunReport run_standalone_rainbow(const LoopConfig& config, std::uint64_t max_real_steps, std::uint64_t seed,
                                 const LoopCallbacks& callbacks) {
  const auto t0 = Clock::now();
  config.agent.validate();
  env::ClassicControl environment(env_config(config, seed));
  rainbow::RainbowAgent agent(config.agent, environment.state_size(), environment.action_count(), seed);
  Rng reset_rng = make_rng(seed, "env-reset");
  EpisodeCursor cursor;
  std::uint64_t agent_step = 0;
  std::uint64_t real_step = 0;
  std::vector<double> returns;
  RunReport report;
  report.seed = seed;
  InteractionHooks hooks;
  hooks.on_step = callbacks.on_step;
  hooks.on_transition = [&](const memory::Transition&, bool) { ++real_step; };
  hooks.on_episode_end = [&](double ret, bool truncated) {
    returns.push_back(ret);
    const bool done = check_convergence(returns, config.env, config.convergence);
    if (callbacks.on_episode)
      callbacks.on_episode({0, Phase::mfp, real_step, agent_step, ret, truncated,
                            eval::mean_recent_reward(returns, config.convergence.window)});
    if (done) report.real_steps_to_convergence = real_step;
    return done;
  };
  PhaseLog log = start_log(0, Phase::mfp);
  log.steps = interact(agent, environment, reset_rng, cursor, max_real_steps, agent_step, Phase::mfp, hooks);
  log.episodes = returns.size();
  log.real_step_end = real_step;
  log.agent_step_end = agent_step;
  log.seconds = seconds_since(t0);
  report.phases.push_back(log);
  report.real_steps = real_step;
  report.agent_steps = agent_step;
  report.real_episodes = returns.size();
  if (!returns.empty()) report.final_mean100 = eval::mean_recent_reward(returns, config.convergence.window);
  report.wall_seconds = seconds_since(t0);
  return report;
}

}  // namespace gairl::orchestrator
