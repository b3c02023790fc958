#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gairl/env/environment.hpp"
#include "gairl/generative/gan.hpp"
#include "gairl/generative/regressor.hpp"
#include "gairl/memory/gairl_memory.hpp"
#include "gairl/rng.hpp"

namespace gairl::imagination {

enum class StateModelKind { mlp, wgangp };

std::string to_string(StateModelKind kind);
StateModelKind state_model_kind_from_string(const std::string& name);

/// Dimensions (condition, payload, input, output) are filled in by the
/// Imagination constructor; the remaining fields are the tunables.
struct ImaginationConfig {
  StateModelKind state_model = StateModelKind::wgangp;
  generative::GanConfig gan = generative::GanConfig::defaults(generative::GanFamily::wgangp);
  generative::RegressorConfig state_regressor = default_state_regressor();
  generative::RegressorConfig reward_model = default_reward_model();
  std::size_t batch_size = 256;
  std::size_t metrics_period = 1000;
  /// Imagined episodes are truncated after this many steps; 0 means the
  /// environment's own episode cap.
  std::size_t rollout_step_cap = 0;

  static generative::RegressorConfig default_state_regressor();
  static generative::RegressorConfig default_reward_model();
  void validate() const;
};

struct ImaginationMetrics {
  std::uint64_t itp_step = 0;
  double state_mae = 0.0;
  std::optional<double> reward_precision;
  std::optional<double> reward_recall;
  std::optional<double> wasserstein_estimate;  // wgangp only
};

/// Losses of one ITP iteration. The state-model fields that do not apply to
/// the configured model stay at zero.
struct ItpStepStats {
  std::uint64_t itp_step = 0;
  double critic_estimate = 0.0;
  double generator_loss = 0.0;
  double penalty = 0.0;
  double state_l1 = 0.0;
  double reward_l1 = 0.0;
};

using ItpStepCallback = std::function<void(const ItpStepStats&)>;

struct RewardPrediction {
  int reward = 0;    // 0 or 1
  double raw = 0.0;  // unrounded model output
};

/// Rounds half up and clamps to {0, 1}.
int round_reward(double raw);

/// Learned transition and reward functions over normalized states.
class Imagination {
 public:
  Imagination(ImaginationConfig config, std::size_t state_size, std::size_t action_count, std::uint64_t seed);

  /// Runs `steps` iterations on uniform batches of the training store,
  /// appending metrics on the test store every metrics_period cumulative
  /// steps. For the wgangp model one iteration is k critic updates and one
  /// generator update.
  std::vector<ImaginationMetrics> train(const memory::GairlMemory& mem, std::size_t steps, Rng& rng,
                                        const ItpStepCallback& on_step = {});

  /// Rows of state ++ one_hot(action).
  nn::Matrix conditions(const std::vector<const memory::Transition*>& batch) const;
  nn::Matrix condition(std::span<const double> state, int action) const;

  std::vector<double> predict_next_state(std::span<const double> state, int action, Rng& rng) const;
  RewardPrediction predict_reward(std::span<const double> state, int action) const;
  /// Batched forms; next states are clamped to [0,1].
  nn::Matrix predict_next_states(const nn::Matrix& conditions, Rng& rng) const;
  nn::Matrix predict_raw_rewards(const nn::Matrix& conditions) const;

  ImaginationMetrics evaluate(const memory::TransitionStore& test, Rng& rng) const;

  bool trained() const { return steps_ > 0; }
  std::uint64_t steps() const { return steps_; }
  std::size_t state_size() const { return state_size_; }
  std::size_t action_count() const { return action_count_; }
  const ImaginationConfig& config() const { return config_; }

  const generative::ConditionalGan& gan() const { return gan_; }
  generative::ConditionalGan& gan() { return gan_; }
  const generative::MlpRegressor& state_regressor() const { return state_regressor_; }
  const generative::MlpRegressor& reward_model() const { return reward_model_; }
  generative::MlpRegressor& reward_model() { return reward_model_; }

  /// Parameter tensors of every submodel, in GTEN format.
  void save(const std::string& path) const;
  void load_parameters(const std::string& path);

 private:
  void require_trained() const;

  ImaginationConfig config_;
  std::size_t state_size_;
  std::size_t action_count_;
  generative::ConditionalGan gan_;
  generative::MlpRegressor state_regressor_;
  generative::MlpRegressor reward_model_;
  std::uint64_t steps_ = 0;
};

/// The imagination behind the environment step interface. Episodes start
/// from states drawn out of the real-experience memory, end when the reward
/// model predicts the goal reward and are truncated at the rollout cap.
class ImaginedEnvironment final : public env::Environment {
 public:
  ImaginedEnvironment(const Imagination& im, const memory::GairlMemory& mem, env::EnvKind kind,
                      std::size_t rollout_step_cap, std::uint64_t seed);

  std::size_t state_size() const override { return im_.state_size(); }
  std::size_t action_count() const override { return im_.action_count(); }
  env::EnvState reset(Rng& rng) override;
  env::StepResult step(const env::EnvState& state, int action) override;

  std::size_t rollout_step_cap() const { return cap_; }

 private:
  env::EnvState make_state(std::vector<double> normalized, std::size_t elapsed) const;

  const Imagination& im_;
  const memory::GairlMemory& mem_;
  env::EnvKind kind_;
  std::size_t cap_;
  Rng noise_rng_;
};

}  // namespace gairl::imagination
