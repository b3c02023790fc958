#include "gairl/nn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "gairl/nn/kernels.hpp"

namespace gairl::nn {

bool TensorList::same_layout(const TensorList& o) const {
  if (tensors.size() != o.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i)
    if (!tensors[i].same_shape(o.tensors[i])) return false;
  return true;
}

TensorList TensorList::zeros_like() const {
  TensorList z;
  z.tensors.reserve(tensors.size());
  for (const auto& t : tensors) z.tensors.emplace_back(t.rows, t.cols);
  return z;
}

double TensorList::squared_norm() const {
  double s = 0.0;
  for (const auto& t : tensors)
    for (double v : t.data) s += v * v;
  return s;
}

bool TensorList::all_finite() const {
  for (const auto& t : tensors)
    for (double v : t.data)
      if (!std::isfinite(v)) return false;
  return true;
}

std::size_t TensorList::element_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

std::string to_string(OutputActivation a) {
  switch (a) {
    case OutputActivation::linear: return "linear";
    case OutputActivation::tanh: return "tanh";
    case OutputActivation::sigmoid: return "sigmoid";
  }
  return "linear";
}

OutputActivation output_activation_from_string(const std::string& name) {
  if (name == "linear") return OutputActivation::linear;
  if (name == "tanh") return OutputActivation::tanh;
  if (name == "sigmoid") return OutputActivation::sigmoid;
  throw std::invalid_argument("unknown output activation '" + name + "'");
}

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("network spec needs at least an input and an output layer");
  for (auto n : layer_sizes)
    if (n == 0) throw std::invalid_argument("network spec has a zero-width layer");
  if (!(leaky_alpha > 0.0 && leaky_alpha < 1.0))
    throw std::invalid_argument("leaky_alpha must lie in (0, 1)");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw std::invalid_argument("dropout must lie in [0, 1)");
  if (!(init_stddev >= 0.0) || !std::isfinite(init_stddev))
    throw std::invalid_argument("init_stddev must be a finite non-negative number");
}

NetworkParameters init_network(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  NetworkParameters params;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    Matrix w(spec.layer_sizes[l + 1], spec.layer_sizes[l]);
    for (double& v : w.data) v = spec.init_stddev * normal(rng);
    params.tensors.push_back(std::move(w));
    params.tensors.emplace_back(spec.layer_sizes[l + 1], 1);
  }
  return params;
}

double leaky_relu(double x, double alpha) { return x >= 0.0 ? x : alpha * x; }

double leaky_relu_derivative(double x, double alpha) { return x >= 0.0 ? 1.0 : alpha; }

namespace {

void check_layout(const NetworkSpec& spec, const NetworkParameters& params) {
  if (params.size() != 2 * spec.layer_count())
    throw std::invalid_argument("parameter count does not match the network spec");
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto& w = params[2 * l];
    const auto& b = params[2 * l + 1];
    if (w.rows != spec.layer_sizes[l + 1] || w.cols != spec.layer_sizes[l] ||
        b.rows != spec.layer_sizes[l + 1] || b.cols != 1)
      throw std::invalid_argument("parameter shapes do not match the network spec");
  }
}

void apply_output_activation(OutputActivation act, Matrix& m) {
  switch (act) {
    case OutputActivation::linear: break;
    case OutputActivation::tanh:
      for (double& v : m.data) v = std::tanh(v);
      break;
    case OutputActivation::sigmoid:
      for (double& v : m.data) v = 1.0 / (1.0 + std::exp(-v));
      break;
  }
}

}  // namespace

Matrix forward(const NetworkSpec& spec, const NetworkParameters& params, const Matrix& input,
               Mode mode, Rng* rng, ForwardCache* cache) {
  check_layout(spec, params);
  if (input.cols != spec.input_size())
    throw std::invalid_argument("forward: input width " + std::to_string(input.cols) +
                                " does not match network input " +
                                std::to_string(spec.input_size()));
  const bool use_dropout = mode == Mode::train && spec.dropout > 0.0;
  if (use_dropout && rng == nullptr)
    throw std::invalid_argument("forward: train-mode dropout needs an rng");
  if (cache) {
    cache->inputs.clear();
    cache->preactivations.clear();
    cache->dropout_masks.clear();
  }

  Matrix x = input;
  const std::size_t layers = spec.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = params[2 * l];
    const Matrix& b = params[2 * l + 1];
    Matrix z;
    kernels::matmul_nt(x, w, z);
    for (std::size_t r = 0; r < z.rows; ++r) {
      auto row = z.row(r);
      for (std::size_t j = 0; j < z.cols; ++j) row[j] += b.data[j];
    }
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->preactivations.push_back(z);
    }
    if (l + 1 < layers) {
      for (double& v : z.data) v = leaky_relu(v, spec.leaky_alpha);
      if (use_dropout) {
        const double keep = 1.0 - spec.dropout;
        Matrix mask(z.rows, z.cols);
        std::bernoulli_distribution bern(keep);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          mask.data[i] = bern(*rng) ? 1.0 / keep : 0.0;
          z.data[i] *= mask.data[i];
        }
        if (cache) cache->dropout_masks.push_back(std::move(mask));
      }
    } else {
      apply_output_activation(spec.output_activation, z);
    }
    x = std::move(z);
  }
  if (cache) cache->output = x;
  return x;
}

std::vector<double> forward(const NetworkSpec& spec, const NetworkParameters& params,
                            std::span<const double> input, Mode mode, Rng* rng) {
  return forward(spec, params, Matrix::from_row(input), mode, rng).data;
}

GradientSet backward(const NetworkSpec& spec, const NetworkParameters& params,
                     const ForwardCache& cache, const Matrix& output_gradient,
                     Matrix* input_gradient) {
  check_layout(spec, params);
  const std::size_t layers = spec.layer_count();
  if (cache.inputs.size() != layers || cache.preactivations.size() != layers)
    throw std::invalid_argument("backward: cache does not belong to this network");
  if (!output_gradient.same_shape(cache.output))
    throw std::invalid_argument("backward: output gradient shape does not match the cache");
  const bool has_dropout = !cache.dropout_masks.empty();
  if (has_dropout && cache.dropout_masks.size() != layers - 1)
    throw std::invalid_argument("backward: stale dropout masks in cache");

  GradientSet grads = params.zeros_like();

  Matrix delta = output_gradient;
  switch (spec.output_activation) {
    case OutputActivation::linear: break;
    case OutputActivation::tanh:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const double y = cache.output.data[i];
        delta.data[i] *= 1.0 - y * y;
      }
      break;
    case OutputActivation::sigmoid:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const double y = cache.output.data[i];
        delta.data[i] *= y * (1.0 - y);
      }
      break;
  }

  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& x = cache.inputs[l];
    if (x.rows != delta.rows || x.cols != spec.layer_sizes[l] || delta.cols != spec.layer_sizes[l + 1])
      throw std::invalid_argument("backward: cache does not belong to this network");
    kernels::matmul_tn(delta, x, grads[2 * l]);
    Matrix& gb = grads[2 * l + 1];
    for (std::size_t r = 0; r < delta.rows; ++r) {
      auto row = delta.row(r);
      for (std::size_t j = 0; j < delta.cols; ++j) gb.data[j] += row[j];
    }
    if (l == 0 && input_gradient == nullptr) break;
    Matrix prev;
    kernels::matmul_nn(delta, params[2 * l], prev);
    if (l == 0) {
      *input_gradient = std::move(prev);
      break;
    }
    const Matrix& z = cache.preactivations[l - 1];
    for (std::size_t i = 0; i < prev.size(); ++i) {
      prev.data[i] *= leaky_relu_derivative(z.data[i], spec.leaky_alpha);
      if (has_dropout) prev.data[i] *= cache.dropout_masks[l - 1].data[i];
    }
    delta = std::move(prev);
  }
  return grads;
}

Mlp::Mlp(NetworkSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), params_(init_network(spec_, seed)) {}

Mlp::Mlp(NetworkSpec spec, NetworkParameters params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  check_layout(spec_, params_);
}

}  // namespace gairl::nn
