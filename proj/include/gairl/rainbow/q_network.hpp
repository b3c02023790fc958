#pragma once

#include <cstdint>
#include <vector>

#include "gairl/nn/matrix.hpp"
#include "gairl/nn/network.hpp"
#include "gairl/rng.hpp"

namespace gairl::rainbow {

struct QNetworkShape {
  std::size_t state_size = 2;
  std::size_t action_count = 2;
  std::vector<std::size_t> hidden_layers = {24, 24};
  std::size_t atoms = 51;
  double leaky_alpha = 0.2;
  double init_stddev = 0.02;
  double noisy_sigma0 = 0.5;

  void validate() const;
};

/// Dueling categorical Q-network. Hidden layers are dense except the last,
/// which is a factorized-Gaussian noisy layer like both heads:
///   logits(a, i) = V(i) + A(a, i) - mean_a' A(a', i)
///   p(a, .) = softmax(logits(a, .))
/// Output rows hold the action distributions back to back (a * atoms + i).
class QNetwork {
 public:
  struct Cache {
    std::vector<nn::Matrix> inputs;  // input of each affine layer
    std::vector<nn::Matrix> pre;     // hidden pre-activations
    nn::Matrix probs;
    bool noisy = false;
  };

  QNetwork() = default;
  QNetwork(QNetworkShape shape, std::uint64_t seed);

  /// Draws fresh factorized noise for every noisy layer.
  void resample_noise(Rng& rng);
  void clear_noise();

  /// Train mode applies the current noise; eval mode uses the means only.
  nn::Matrix forward(const nn::Matrix& states, nn::Mode mode, Cache* cache = nullptr) const;

  /// Gradient of sum(logit_gradient . logits) for the pass recorded in `cache`.
  nn::GradientSet backward(const Cache& cache, const nn::Matrix& logit_gradient) const;

  const QNetworkShape& shape() const { return shape_; }
  nn::NetworkParameters& parameters() { return params_; }
  const nn::NetworkParameters& parameters() const { return params_; }

 private:
  struct Layer {
    bool noisy;
    std::size_t offset;  // first tensor in params_: dense W,b / noisy muW,sigmaW,mub,sigmab
    std::size_t in;
    std::size_t out;
  };
  struct Noise {
    nn::Matrix weight;  // out x in
    nn::Matrix bias;    // out x 1
  };

  nn::Matrix effective_weight(const Layer& layer, bool noisy) const;
  std::vector<double> effective_bias(const Layer& layer, bool noisy) const;
  nn::Matrix affine(const Layer& layer, const nn::Matrix& x, bool noisy) const;

  QNetworkShape shape_;
  std::vector<Layer> layers_;  // hidden..., value head, advantage head
  nn::NetworkParameters params_;
  std::vector<Noise> noise_;   // per layer; empty matrices for dense layers
};

}  // namespace gairl::rainbow
