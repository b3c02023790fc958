#pragma once

#include <vector>

#include "gairl/nn/network.hpp"

namespace gairl::nn {

/// Backward chain of a scalar-output network with linear output, kept so
/// the input gradient itself can be differentiated with respect to the
/// weights (double backpropagation).
struct InputGradientTrace {
  std::vector<Matrix> e;  // e[l]: d output / d preactivation of layer l, one row per sample
  Matrix input_gradient;  // d output / d input, one row per sample
};

/// Per-sample gradient of the scalar output with respect to the input.
InputGradientTrace input_gradient(const NetworkSpec& spec, const NetworkParameters& params,
                                  const ForwardCache& cache);

/// Gradient with respect to the parameters of sum(v .* input_gradient).
/// Hidden activations are piecewise linear, so the activation pattern is
/// locally constant and bias gradients vanish.
GradientSet input_gradient_vjp(const NetworkSpec& spec, const NetworkParameters& params,
                               const ForwardCache& cache, const InputGradientTrace& trace, const Matrix& v);

}  // namespace gairl::nn
