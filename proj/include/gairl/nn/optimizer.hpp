#pragma once

#include <cstdint>
#include <variant>

#include "gairl/nn/matrix.hpp"

namespace gairl::nn {

struct SgdSettings {
  double learning_rate = 5e-3;
};

struct AdamSettings {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using OptimizerSettings = std::variant<SgdSettings, AdamSettings>;

void validate(const OptimizerSettings& settings);

/// Optimizer kind plus its per-parameter accumulators.
class OptimizerState {
 public:
  OptimizerState() = default;
  OptimizerState(OptimizerSettings settings, const TensorList& like);

  /// One descent step: params <- params - update(grads). Throws on a shape
  /// mismatch between params, grads and the accumulators.
  void step(TensorList& params, const TensorList& grads);

  const OptimizerSettings& settings() const { return settings_; }
  std::uint64_t step_count() const { return steps_; }
  const TensorList& first_moment() const { return m_; }
  const TensorList& second_moment() const { return v_; }

 private:
  OptimizerSettings settings_{SgdSettings{}};
  TensorList m_;
  TensorList v_;
  std::uint64_t steps_ = 0;
};

/// Rescales `grads` in place so the global L2 norm is at most `max_norm`.
/// Returns the norm before clipping. Throws on non-finite entries.
double clip_gradients(GradientSet& grads, double max_norm);

/// Clamps every entry of every tensor into [-limit, limit].
void clamp_parameters(TensorList& params, double limit);

/// params += scale * other (layouts must match)
void axpy(TensorList& params, double scale, const TensorList& other);

}  // namespace gairl::nn
