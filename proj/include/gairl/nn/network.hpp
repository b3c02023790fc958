#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gairl/nn/matrix.hpp"
#include "gairl/rng.hpp"

namespace gairl::nn {

enum class HiddenActivation { leaky_relu };
enum class OutputActivation { linear, tanh, sigmoid };
enum class Mode { train, eval };

std::string to_string(OutputActivation a);
OutputActivation output_activation_from_string(const std::string& name);

struct NetworkSpec {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  HiddenActivation hidden_activation = HiddenActivation::leaky_relu;
  double leaky_alpha = 0.2;
  OutputActivation output_activation = OutputActivation::linear;
  double dropout = 0.0;  // hidden layers only
  double init_stddev = 0.02;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Weights ~ N(0, init_stddev^2), zero biases. Layout: W0, b0, W1, b1, ...
/// with W_l shaped (out x in) and b_l shaped (out x 1).
NetworkParameters init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Everything backward() needs from the matching forward() call.
struct ForwardCache {
  std::vector<Matrix> inputs;        // input to each layer
  std::vector<Matrix> preactivations;
  std::vector<Matrix> dropout_masks; // per hidden layer; empty when dropout is off
  Matrix output;
};

double leaky_relu(double x, double alpha);
/// Derivative with the x = 0 convention fixed to 1.
double leaky_relu_derivative(double x, double alpha);

/// Batched forward pass; each row of `input` is one sample. `rng` is only
/// touched in train mode with dropout enabled.
Matrix forward(const NetworkSpec& spec, const NetworkParameters& params, const Matrix& input,
               Mode mode, Rng* rng = nullptr, ForwardCache* cache = nullptr);

std::vector<double> forward(const NetworkSpec& spec, const NetworkParameters& params,
                            std::span<const double> input, Mode mode, Rng* rng = nullptr);

/// Exact reverse-mode gradient of sum_over_rows(output_gradient . output)
/// with respect to every parameter. When `input_gradient` is non-null it
/// receives the gradient with respect to the network input.
GradientSet backward(const NetworkSpec& spec, const NetworkParameters& params,
                     const ForwardCache& cache, const Matrix& output_gradient,
                     Matrix* input_gradient = nullptr);

/// A network bundled with its architecture.
class Mlp {
 public:
  Mlp() = default;
  Mlp(NetworkSpec spec, std::uint64_t seed);
  Mlp(NetworkSpec spec, NetworkParameters params);

  const NetworkSpec& spec() const { return spec_; }
  const NetworkParameters& parameters() const { return params_; }
  NetworkParameters& parameters() { return params_; }

  Matrix forward(const Matrix& input, Mode mode, Rng* rng = nullptr,
                 ForwardCache* cache = nullptr) const {
    return nn::forward(spec_, params_, input, mode, rng, cache);
  }
  GradientSet backward(const ForwardCache& cache, const Matrix& output_gradient,
                       Matrix* input_gradient = nullptr) const {
    return nn::backward(spec_, params_, cache, output_gradient, input_gradient);
  }

 private:
  NetworkSpec spec_;
  NetworkParameters params_;
};

}  // namespace gairl::nn
