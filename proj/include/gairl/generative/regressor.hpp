#pragma once

#include <cstdint>

#include "gairl/nn/network.hpp"
#include "gairl/nn/optimizer.hpp"
#include "gairl/rng.hpp"

namespace gairl::generative {

struct RegressorConfig {
  std::size_t input_dim = 1;
  std::size_t output_dim = 1;
  std::vector<std::size_t> hidden = {512, 512};
  double leaky_alpha = 0.2;
  double dropout = 0.0;
  double init_stddev = 0.1;
  nn::OutputActivation output_activation = nn::OutputActivation::linear;
  nn::AdamSettings optimizer{2e-4, 0.9, 0.999, 1e-8};

  void validate() const;
  nn::NetworkSpec spec() const;
};

/// Feed-forward regressor trained with the mean absolute error.
class MlpRegressor {
 public:
  MlpRegressor() = default;
  MlpRegressor(RegressorConfig config, std::uint64_t seed);

  /// One Adam step on the L1 loss; returns the loss before the step.
  double train_step(const nn::Matrix& inputs, const nn::Matrix& targets, Rng& rng);
  nn::Matrix predict(const nn::Matrix& inputs) const;
  double l1_loss(const nn::Matrix& inputs, const nn::Matrix& targets) const;

  const RegressorConfig& config() const { return config_; }
  const nn::Mlp& network() const { return net_; }
  nn::Mlp& network() { return net_; }

 private:
  RegressorConfig config_;
  nn::Mlp net_;
  nn::OptimizerState optimizer_;
};

}  // namespace gairl::generative
