#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gairl/nn/network.hpp"
#include "gairl/nn/optimizer.hpp"
#include "gairl/rng.hpp"

namespace gairl::generative {

enum class GanFamily { gan, wgan, wgangp };

std::string to_string(GanFamily f);
GanFamily gan_family_from_string(const std::string& name);

struct GanConfig {
  GanFamily family = GanFamily::wgangp;
  std::size_t condition_dim = 0;
  std::size_t payload_dim = 1;
  std::size_t noise_dim = 0;
  std::vector<std::size_t> generator_hidden = {512, 512};
  std::vector<std::size_t> critic_hidden = {512, 512};
  double leaky_alpha = 0.2;
  double init_stddev = 0.1;
  std::size_t critic_steps = 10;
  double penalty_coefficient = 10.0;
  double clip_value = 0.01;
  nn::AdamSettings generator_optimizer{2e-4, 0.5, 0.9, 1e-8};
  nn::AdamSettings critic_optimizer{2e-4, 0.5, 0.9, 1e-8};

  /// Family defaults: the gradient-penalty model uses k=10 and Adam(0.5, 0.9);
  /// the original GAN k=1, the clipped WGAN k=5, both with Adam(0.9, 0.999).
  static GanConfig defaults(GanFamily family);
  void validate() const;
  nn::NetworkSpec generator_spec() const;
  nn::NetworkSpec critic_spec() const;
};

/// Paired condition/payload rows.
struct ConditionedBatch {
  nn::Matrix condition;  // B x condition_dim (may have zero columns)
  nn::Matrix payload;    // B x payload_dim

  std::size_t size() const { return payload.rows; }
};

using BatchSource = std::function<ConditionedBatch(Rng&)>;

struct GanStepStats {
  double critic_loss = 0.0;
  double generator_loss = 0.0;
  /// mean D(real) - mean D(fake) on the last critic batch; for the original
  /// GAN it is the same difference of discriminator probabilities
  double critic_estimate = 0.0;
  double penalty = 0.0;  // lambda-free gradient penalty, wgangp only
};

/// Conditional generator/critic pair. Generator input is noise ++ condition,
/// its tanh output is mapped onto [0,1]. Critic input is condition ++ payload.
class ConditionalGan {
 public:
  ConditionalGan() = default;
  ConditionalGan(GanConfig config, std::uint64_t seed);

  nn::Matrix generate(const nn::Matrix& noise, const nn::Matrix& condition) const;
  /// Draws N(0,1) noise rows when noise_dim > 0.
  nn::Matrix generate(const nn::Matrix& condition, Rng& rng) const;

  /// Critic output for condition ++ payload rows.
  nn::Matrix critic_output(const nn::Matrix& condition, const nn::Matrix& payload) const;

  /// Family-specific critic loss on fixed batches; `rng` only feeds the
  /// interpolation weights of the gradient penalty.
  double critic_loss(const ConditionedBatch& real, const nn::Matrix& fake_payload, Rng& rng,
                     double* penalty = nullptr, double* estimate = nullptr) const;

  /// mean over pairs of (||grad_payload D(x_hat)|| - 1)^2, x_hat = u real + (1-u) fake.
  double gradient_penalty(const ConditionedBatch& real, const nn::Matrix& fake_payload, Rng& rng) const;

  /// One critic update (including clipping for the WGAN family) against a
  /// given fake payload. Returns the loss before the update.
  GanStepStats critic_step(const ConditionedBatch& real, const nn::Matrix& fake_payload, Rng& rng);

  /// One generator update on the conditions of `batch`.
  double generator_step(const nn::Matrix& condition, Rng& rng);

  /// Generator parameter gradient of the generator loss.
  nn::GradientSet generator_gradient(const nn::Matrix& condition, Rng& rng, double* loss = nullptr) const;

  /// k critic steps, each on a fresh batch from `source`, then one
  /// generator step on the conditions of another fresh batch.
  GanStepStats train_step(const BatchSource& source, Rng& rng);
  /// Same schedule with one fixed batch reused for every step.
  GanStepStats train_step(const ConditionedBatch& batch, Rng& rng);

  const GanConfig& config() const { return config_; }
  nn::Mlp& generator() { return generator_; }
  const nn::Mlp& generator() const { return generator_; }
  nn::Mlp& critic() { return critic_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::OptimizerState& critic_optimizer() const { return critic_opt_; }

  /// Critic parameter gradient of critic_loss() for the given batches.
  nn::GradientSet critic_gradient(const ConditionedBatch& real, const nn::Matrix& fake_payload, Rng& rng,
                                  GanStepStats* stats = nullptr) const;

 private:
  nn::Matrix generator_input(const nn::Matrix& noise, const nn::Matrix& condition) const;
  nn::Matrix noise_rows(std::size_t rows, Rng& rng) const;

  GanConfig config_;
  nn::Mlp generator_;
  nn::Mlp critic_;
  nn::OptimizerState generator_opt_;
  nn::OptimizerState critic_opt_;
};

/// Horizontal concatenation; either side may have zero columns.
nn::Matrix concat_columns(const nn::Matrix& a, const nn::Matrix& b);

}  // namespace gairl::generative
