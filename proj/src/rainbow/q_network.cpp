#include "gairl/rainbow/q_network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gairl/nn/kernels.hpp"

namespace gairl::rainbow {

using nn::Matrix;

void QNetworkShape::validate() const {
  if (state_size == 0 || action_count == 0) throw std::invalid_argument("q-network needs states and actions");
  if (hidden_layers.empty()) throw std::invalid_argument("q-network needs at least one hidden layer");
  for (auto h : hidden_layers)
    if (h == 0) throw std::invalid_argument("q-network hidden layer of width 0");
  if (atoms < 2) throw std::invalid_argument("q-network needs at least 2 atoms");
  if (!(leaky_alpha > 0.0 && leaky_alpha < 1.0)) throw std::invalid_argument("leaky_alpha must lie in (0, 1)");
  if (!(init_stddev >= 0.0)) throw std::invalid_argument("init_stddev must be >= 0");
  if (!(noisy_sigma0 >= 0.0)) throw std::invalid_argument("noisy sigma0 must be >= 0");
}

namespace {

double scaled_noise(double x) { return (x < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(x)); }

void add_bias_rows(Matrix& z, const std::vector<double>& b) {
  for (std::size_t r = 0; r < z.rows; ++r) {
    auto row = z.row(r);
    for (std::size_t j = 0; j < z.cols; ++j) row[j] += b[j];
  }
}

}  // namespace

QNetwork::QNetwork(QNetworkShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
  shape_.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::size_t in = shape_.state_size;
  auto add_layer = [&](std::size_t out, bool noisy) {
    layers_.push_back({noisy, params_.size(), in, out});
    Matrix w(out, in);
    for (double& v : w.data) v = shape_.init_stddev * normal(rng);
    params_.tensors.push_back(std::move(w));
    if (noisy) {
      const double sigma = shape_.noisy_sigma0 / std::sqrt(static_cast<double>(in));
      params_.tensors.emplace_back(out, in, sigma);
      params_.tensors.emplace_back(out, 1);
      params_.tensors.emplace_back(out, 1, sigma);
    } else {
      params_.tensors.emplace_back(out, 1);
    }
  };
  for (std::size_t l = 0; l < shape_.hidden_layers.size(); ++l) {
    add_layer(shape_.hidden_layers[l], l + 1 == shape_.hidden_layers.size());
    in = shape_.hidden_layers[l];
  }
  add_layer(shape_.atoms, true);
  add_layer(shape_.atoms * shape_.action_count, true);

  noise_.resize(layers_.size());
  clear_noise();
}

void QNetwork::clear_noise() {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (!layers_[l].noisy) continue;
    noise_[l].weight = Matrix(layers_[l].out, layers_[l].in);
    noise_[l].bias = Matrix(layers_[l].out, 1);
  }
}

void QNetwork::resample_noise(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (!layer.noisy) continue;
    std::vector<double> e_in(layer.in), e_out(layer.out);
    for (double& v : e_in) v = scaled_noise(normal(rng));
    for (double& v : e_out) v = scaled_noise(normal(rng));
    Noise& n = noise_[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      for (std::size_t i = 0; i < layer.in; ++i) n.weight(o, i) = e_out[o] * e_in[i];
      n.bias.data[o] = e_out[o];
    }
  }
}

Matrix QNetwork::effective_weight(const Layer& layer, bool noisy) const {
  Matrix w = params_[layer.offset];
  if (layer.noisy && noisy) {
    const Matrix& sigma = params_[layer.offset + 1];
    const Matrix& eps = noise_[&layer - layers_.data()].weight;
    for (std::size_t i = 0; i < w.size(); ++i) w.data[i] += sigma.data[i] * eps.data[i];
  }
  return w;
}

std::vector<double> QNetwork::effective_bias(const Layer& layer, bool noisy) const {
  const std::size_t bias_index = layer.offset + (layer.noisy ? 2 : 1);
  std::vector<double> b = params_[bias_index].data;
  if (layer.noisy && noisy) {
    const Matrix& sigma = params_[layer.offset + 3];
    const Matrix& eps = noise_[&layer - layers_.data()].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += sigma.data[i] * eps.data[i];
  }
  return b;
}

Matrix QNetwork::affine(const Layer& layer, const Matrix& x, bool noisy) const {
  Matrix z;
  nn::kernels::matmul_nt(x, effective_weight(layer, noisy), z);
  add_bias_rows(z, effective_bias(layer, noisy));
  return z;
}

Matrix QNetwork::forward(const Matrix& states, nn::Mode mode, Cache* cache) const {
  if (states.cols != shape_.state_size)
    throw std::invalid_argument("q-network: state width " + std::to_string(states.cols) + " != " +
                                std::to_string(shape_.state_size));
  const bool noisy = mode == nn::Mode::train;
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->noisy = noisy;
  }
  const std::size_t hidden = shape_.hidden_layers.size();
  Matrix h = states;
  for (std::size_t l = 0; l < hidden; ++l) {
    Matrix z = affine(layers_[l], h, noisy);
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->pre.push_back(z);
    }
    for (double& v : z.data) v = nn::leaky_relu(v, shape_.leaky_alpha);
    h = std::move(z);
  }
  const Matrix value = affine(layers_[hidden], h, noisy);
  const Matrix adv = affine(layers_[hidden + 1], h, noisy);
  if (cache) cache->inputs.push_back(std::move(h));

  const std::size_t n = shape_.atoms, na = shape_.action_count;
  Matrix probs(states.rows, na * n);
  std::vector<double> mean_adv(n);
  for (std::size_t r = 0; r < states.rows; ++r) {
    auto a_row = adv.row(r);
    auto v_row = value.row(r);
    auto out = probs.row(r);
    std::fill(mean_adv.begin(), mean_adv.end(), 0.0);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t i = 0; i < n; ++i) mean_adv[i] += a_row[a * n + i];
    for (double& m : mean_adv) m /= static_cast<double>(na);
    for (std::size_t a = 0; a < na; ++a) {
      double mx = -INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        const double logit = v_row[i] + a_row[a * n + i] - mean_adv[i];
        out[a * n + i] = logit;
        mx = std::max(mx, logit);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        out[a * n + i] = std::exp(out[a * n + i] - mx);
        sum += out[a * n + i];
      }
      for (std::size_t i = 0; i < n; ++i) out[a * n + i] /= sum;
    }
  }
  if (cache) cache->probs = probs;
  return probs;
}

nn::GradientSet QNetwork::backward(const Cache& cache, const Matrix& logit_gradient) const {
  const std::size_t hidden = shape_.hidden_layers.size();
  if (cache.inputs.size() != hidden + 1 || cache.pre.size() != hidden || !logit_gradient.same_shape(cache.probs))
    throw std::invalid_argument("q-network backward: cache does not match this network");
  const std::size_t n = shape_.atoms, na = shape_.action_count;
  const std::size_t rows = logit_gradient.rows;

  Matrix dv(rows, n), da(rows, na * n);
  for (std::size_t r = 0; r < rows; ++r) {
    auto g = logit_gradient.row(r);
    auto v = dv.row(r);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t i = 0; i < n; ++i) v[i] += g[a * n + i];
    auto d = da.row(r);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t i = 0; i < n; ++i) d[a * n + i] = g[a * n + i] - v[i] / static_cast<double>(na);
  }

  nn::GradientSet grads = params_.zeros_like();
  // accumulates parameter gradients of one layer and returns dL/dx
  auto layer_backward = [&](std::size_t l, const Matrix& delta, bool need_input_grad) {
    const Layer& layer = layers_[l];
    const Matrix& x = cache.inputs[std::min(l, hidden)];
    Matrix gw;
    nn::kernels::matmul_tn(delta, x, gw);
    std::vector<double> gb(layer.out, 0.0);
    for (std::size_t r = 0; r < delta.rows; ++r) {
      auto row = delta.row(r);
      for (std::size_t j = 0; j < layer.out; ++j) gb[j] += row[j];
    }
    if (layer.noisy) {
      Matrix& mu_w = grads[layer.offset];
      Matrix& sig_w = grads[layer.offset + 1];
      Matrix& mu_b = grads[layer.offset + 2];
      Matrix& sig_b = grads[layer.offset + 3];
      const Noise& eps = noise_[l];
      for (std::size_t i = 0; i < gw.size(); ++i) {
        mu_w.data[i] += gw.data[i];
        if (cache.noisy) sig_w.data[i] += gw.data[i] * eps.weight.data[i];
      }
      for (std::size_t j = 0; j < layer.out; ++j) {
        mu_b.data[j] += gb[j];
        if (cache.noisy) sig_b.data[j] += gb[j] * eps.bias.data[j];
      }
    } else {
      Matrix& w = grads[layer.offset];
      Matrix& b = grads[layer.offset + 1];
      for (std::size_t i = 0; i < gw.size(); ++i) w.data[i] += gw.data[i];
      for (std::size_t j = 0; j < layer.out; ++j) b.data[j] += gb[j];
    }
    Matrix dx;
    if (need_input_grad) nn::kernels::matmul_nn(delta, effective_weight(layer, cache.noisy), dx);
    return dx;
  };

  Matrix dh = layer_backward(hidden, dv, true);
  const Matrix dh_adv = layer_backward(hidden + 1, da, true);
  for (std::size_t i = 0; i < dh.size(); ++i) dh.data[i] += dh_adv.data[i];
  for (std::size_t l = hidden; l-- > 0;) {
    const Matrix& z = cache.pre[l];
    for (std::size_t i = 0; i < dh.size(); ++i) dh.data[i] *= nn::leaky_relu_derivative(z.data[i], shape_.leaky_alpha);
    dh = layer_backward(l, dh, l > 0);
  }
  return grads;
}

}  // namespace gairl::rainbow
