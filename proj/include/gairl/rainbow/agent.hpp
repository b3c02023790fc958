#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gairl/memory/prioritized_buffer.hpp"
#include "gairl/nn/optimizer.hpp"
#include "gairl/rainbow/distribution.hpp"
#include "gairl/rainbow/q_network.hpp"

namespace gairl::rainbow {

struct AgentConfig {
  std::vector<std::size_t> hidden_layers = {24, 24};
  double gamma = 0.99;
  double learning_rate = 5e-3;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 10000;
  bool epsilon_greedy = true;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::uint64_t epsilon_decay_start = 1000;
  std::uint64_t epsilon_decay_length = 10000;
  std::size_t n_step = 3;
  std::uint64_t update_period = 4;
  std::uint64_t target_sync_period = 500;
  bool noisy_nets = true;
  double noisy_sigma0 = 0.5;
  std::size_t atoms = 51;
  double v_min = 0.0;
  double v_max = 1.0;
  double gradient_clip = 1.0;
  double leaky_alpha = 0.2;
  double init_stddev = 0.02;
  double priority_alpha = 0.6;
  double priority_epsilon = 1e-5;
  double priority_beta_start = 0.4;
  double priority_beta_end = 1.0;
  std::uint64_t priority_beta_steps = 50000;

  void validate() const;
  Support support() const { return {v_min, v_max, atoms}; }
};

struct TrainStats {
  double loss = 0.0;  // importance-weighted mean cross-entropy
  double gradient_norm = 0.0;  // before clipping
  std::vector<double> sample_losses;
};

/// Rainbow-style agent: double Q-learning, dueling categorical heads, noisy
/// layers, n-step returns, prioritized replay and a periodically synced
/// target network. Learning is driven from observe(): every
/// `update_period` observed environment steps one batch update runs once the
/// buffer holds a full batch.
class RainbowAgent {
 public:
  RainbowAgent(AgentConfig config, std::size_t state_size, std::size_t action_count, std::uint64_t seed);

  int select_action(std::span<const double> state, std::uint64_t global_step, nn::Mode mode);
  double epsilon(std::uint64_t global_step) const;

  /// Feeds one environment transition. `truncated` marks an episode cut at
  /// its step cap: the window is flushed and bootstraps from next_state.
  std::optional<TrainStats> observe(const memory::Transition& t, bool truncated, std::uint64_t global_step);
  /// Flushes the n-step window as if the episode were truncated here.
  void end_segment();

  /// Samples a prioritized batch, learns from it and writes priorities back.
  TrainStats train_step(std::uint64_t global_step);
  /// One clipped SGD step on a given batch with the current noise.
  TrainStats learn(const memory::SampledBatch& batch);
  /// Weighted loss of a batch with the current noise, without updating.
  TrainStats evaluate_loss(const memory::SampledBatch& batch) const;

  /// Projected n-step target distributions (one row per transition) and the
  /// bootstrap actions chosen by the online network.
  nn::Matrix target_distributions(const std::vector<memory::Transition>& batch,
                                  std::vector<int>* bootstrap_actions = nullptr) const;

  void sync_target();
  void resample_noise();

  std::vector<double> action_distribution(std::span<const double> state, int action, nn::Mode mode) const;
  std::vector<double> expected_values(std::span<const double> state, nn::Mode mode) const;

  const AgentConfig& config() const { return config_; }
  const Support& support() const { return support_; }
  QNetwork& online() { return online_; }
  const QNetwork& online() const { return online_; }
  QNetwork& target() { return target_; }
  const QNetwork& target() const { return target_; }
  memory::PrioritizedBuffer& buffer() { return buffer_; }
  const memory::PrioritizedBuffer& buffer() const { return buffer_; }
  std::uint64_t update_count() const { return updates_; }
  std::uint64_t observed_steps() const { return observed_; }
  std::size_t state_size() const { return state_size_; }
  std::size_t action_count() const { return action_count_; }

  void save(const std::string& path) const;

 private:
  void emit_front();
  void flush_window();
  int greedy_from(const nn::Matrix& probs, std::size_t row) const;

  AgentConfig config_;
  std::size_t state_size_;
  std::size_t action_count_;
  Support support_;
  QNetwork online_;
  QNetwork target_;
  nn::OptimizerState optimizer_;
  memory::PrioritizedBuffer buffer_;
  std::deque<memory::Transition> window_;
  Rng action_rng_;
  Rng noise_rng_;
  Rng replay_rng_;
  std::uint64_t observed_ = 0;
  std::uint64_t updates_ = 0;
};

}  // namespace gairl::rainbow
