#include "gairl/nn/input_gradient.hpp"

#include <stdexcept>

#include "gairl/nn/kernels.hpp"

namespace gairl::nn {

namespace {

void require_scalar_linear(const NetworkSpec& spec, const ForwardCache& cache) {
  if (spec.output_size() != 1 || spec.output_activation != OutputActivation::linear)
    throw std::invalid_argument("input gradient needs a scalar network with linear output");
  if (!cache.dropout_masks.empty()) throw std::invalid_argument("input gradient does not support dropout");
  if (cache.preactivations.size() != spec.layer_count())
    throw std::invalid_argument("input gradient: cache does not belong to this network");
}

}  // namespace

InputGradientTrace input_gradient(const NetworkSpec& spec, const NetworkParameters& params,
                                  const ForwardCache& cache) {
  require_scalar_linear(spec, cache);
  const std::size_t layers = spec.layer_count();
  const std::size_t rows = cache.output.rows;
  InputGradientTrace trace;
  trace.e.resize(layers);
  trace.e[layers - 1] = Matrix(rows, 1, 1.0);
  for (std::size_t l = layers; l-- > 0;) {
    Matrix g;
    kernels::matmul_nn(trace.e[l], params[2 * l], g);
    if (l == 0) {
      trace.input_gradient = std::move(g);
      break;
    }
    const Matrix& z = cache.preactivations[l - 1];
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] *= leaky_relu_derivative(z.data[i], spec.leaky_alpha);
    trace.e[l - 1] = std::move(g);
  }
  return trace;
}

GradientSet input_gradient_vjp(const NetworkSpec& spec, const NetworkParameters& params,
                               const ForwardCache& cache, const InputGradientTrace& trace, const Matrix& v) {
  require_scalar_linear(spec, cache);
  if (!v.same_shape(trace.input_gradient)) throw std::invalid_argument("input_gradient_vjp: shape mismatch");
  const std::size_t layers = spec.layer_count();
  GradientSet grads = params.zeros_like();
  Matrix g_bar = v;
  for (std::size_t l = 0; l < layers; ++l) {
    kernels::matmul_tn(trace.e[l], g_bar, grads[2 * l]);
    if (l + 1 == layers) break;
    Matrix e_bar;
    kernels::matmul_nt(g_bar, params[2 * l], e_bar);
    const Matrix& z = cache.preactivations[l];
    for (std::size_t i = 0; i < e_bar.size(); ++i) e_bar.data[i] *= leaky_relu_derivative(z.data[i], spec.leaky_alpha);
    g_bar = std::move(e_bar);
  }
  return grads;
}

}  // namespace gairl::nn
