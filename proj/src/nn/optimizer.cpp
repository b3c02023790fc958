#include "gairl/nn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gairl::nn {

void validate(const OptimizerSettings& settings) {
  if (const auto* sgd = std::get_if<SgdSettings>(&settings)) {
    if (!(sgd->learning_rate > 0.0)) throw std::invalid_argument("sgd learning rate must be > 0");
    return;
  }
  const auto& adam = std::get<AdamSettings>(settings);
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("adam learning rate must be > 0");
  if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0)) throw std::invalid_argument("adam beta1 must lie in (0, 1)");
  if (!(adam.beta2 > 0.0 && adam.beta2 < 1.0)) throw std::invalid_argument("adam beta2 must lie in (0, 1)");
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
}

OptimizerState::OptimizerState(OptimizerSettings settings, const TensorList& like)
    : settings_(settings) {
  validate(settings_);
  if (std::holds_alternative<AdamSettings>(settings_)) {
    m_ = like.zeros_like();
    v_ = like.zeros_like();
  }
}

void OptimizerState::step(TensorList& params, const TensorList& grads) {
  if (!params.same_layout(grads))
    throw std::invalid_argument("optimizer step: gradient layout does not match parameters");
  if (const auto* sgd = std::get_if<SgdSettings>(&settings_)) {
    for (std::size_t t = 0; t < params.size(); ++t) {
      auto& p = params[t].data;
      const auto& g = grads[t].data;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= sgd->learning_rate * g[i];
    }
    ++steps_;
    return;
  }
  const auto& adam = std::get<AdamSettings>(settings_);
  if (!params.same_layout(m_))
    throw std::invalid_argument("optimizer step: moment accumulators do not match parameters");
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(adam.beta1, t);
  const double c2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k].data;
    auto& m = m_[k].data;
    auto& v = v_[k].data;
    const auto& g = grads[k].data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= adam.learning_rate * mhat / (std::sqrt(vhat) + adam.epsilon);
    }
  }
}

double clip_gradients(GradientSet& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_gradients: max_norm must be > 0");
  if (!grads.all_finite()) throw std::domain_error("clip_gradients: non-finite gradient entry");
  const double norm = std::sqrt(grads.squared_norm());
  // the slack keeps clip(clip(g)) == clip(g) bit for bit
  if (norm > max_norm * (1.0 + 1e-12)) {
    const double scale = max_norm / norm;
    for (auto& t : grads.tensors)
      for (double& v : t.data) v *= scale;
  }
  return norm;
}

void clamp_parameters(TensorList& params, double limit) {
  for (auto& t : params.tensors)
    for (double& v : t.data) v = std::clamp(v, -limit, limit);
}

void axpy(TensorList& params, double scale, const TensorList& other) {
  if (!params.same_layout(other)) throw std::invalid_argument("axpy: layout mismatch");
  for (std::size_t t = 0; t < params.size(); ++t)
    for (std::size_t i = 0; i < params[t].size(); ++i) params[t].data[i] += scale * other[t].data[i];
}

}  // namespace gairl::nn
