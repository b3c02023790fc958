#include "gairl/generative/regressor.hpp"

#include <cmath>
#include <stdexcept>

namespace gairl::generative {

using nn::Matrix;

void RegressorConfig::validate() const {
  if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("regressor dimensions must be positive");
  nn::validate(optimizer);
  spec().validate();
}

nn::NetworkSpec RegressorConfig::spec() const {
  nn::NetworkSpec s;
  s.layer_sizes = {input_dim};
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.begin(), hidden.end());
  s.layer_sizes.push_back(output_dim);
  s.leaky_alpha = leaky_alpha;
  s.dropout = dropout;
  s.init_stddev = init_stddev;
  s.output_activation = output_activation;
  return s;
}

MlpRegressor::MlpRegressor(RegressorConfig config, std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      net_(config_.spec(), seed),
      optimizer_(config_.optimizer, net_.parameters()) {}

double MlpRegressor::train_step(const Matrix& inputs, const Matrix& targets, Rng& rng) {
  nn::ForwardCache cache;
  const Matrix out = net_.forward(inputs, nn::Mode::train, &rng, &cache);
  if (!out.same_shape(targets)) throw std::invalid_argument("regressor: target shape mismatch");
  const double n = static_cast<double>(out.size());
  double loss = 0.0;
  Matrix g(out.rows, out.cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.data[i] - targets.data[i];
    loss += std::abs(d);
    g.data[i] = d > 0.0 ? 1.0 / n : (d < 0.0 ? -1.0 / n : 0.0);
  }
  optimizer_.step(net_.parameters(), net_.backward(cache, g));
  return loss / n;
}

Matrix MlpRegressor::predict(const Matrix& inputs) const { return net_.forward(inputs, nn::Mode::eval); }

double MlpRegressor::l1_loss(const Matrix& inputs, const Matrix& targets) const {
  const Matrix out = predict(inputs);
  if (!out.same_shape(targets)) throw std::invalid_argument("regressor: target shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) loss += std::abs(out.data[i] - targets.data[i]);
  return loss / static_cast<double>(out.size());
}

}  // namespace gairl::generative
