#include "gairl/imagination/imagination.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gairl/eval/metrics.hpp"
#include "gairl/nn/serialize.hpp"

namespace gairl::imagination {

using memory::Transition;
using nn::Matrix;

namespace {

constexpr std::size_t kEvalChunk = 1024;

}  // namespace

std::string to_string(StateModelKind kind) { return kind == StateModelKind::mlp ? "mlp" : "wgangp"; }

StateModelKind state_model_kind_from_string(const std::string& name) {
  if (name == "mlp") return StateModelKind::mlp;
  if (name == "wgangp") return StateModelKind::wgangp;
  throw std::invalid_argument("unknown state model kind: " + name);
}

generative::RegressorConfig ImaginationConfig::default_state_regressor() {
  generative::RegressorConfig c;
  c.hidden = {512, 512};
  return c;
}

generative::RegressorConfig ImaginationConfig::default_reward_model() {
  generative::RegressorConfig c;
  c.hidden = {64, 64};
  c.dropout = 0.25;
  return c;
}

void ImaginationConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("imagination batch size must be positive");
  if (metrics_period == 0) throw std::invalid_argument("imagination metrics period must be positive");
}

int round_reward(double raw) {
  if (std::isnan(raw)) throw std::domain_error("reward model produced NaN");
  return raw >= 0.5 ? 1 : 0;
}

Imagination::Imagination(ImaginationConfig config, std::size_t state_size, std::size_t action_count,
                         std::uint64_t seed)
    : config_(std::move(config)), state_size_(state_size), action_count_(action_count) {
  config_.validate();
  if (state_size_ == 0 || action_count_ == 0) throw std::invalid_argument("imagination needs states and actions");
  const std::size_t cond = state_size_ + action_count_;
  if (config_.state_model == StateModelKind::wgangp) {
    config_.gan.condition_dim = cond;
    config_.gan.payload_dim = state_size_;
    gan_ = generative::ConditionalGan(config_.gan, derive_seed(seed, "imagination-state-model"));
  } else {
    config_.state_regressor.input_dim = cond;
    config_.state_regressor.output_dim = state_size_;
    state_regressor_ = generative::MlpRegressor(config_.state_regressor, derive_seed(seed, "imagination-state-model"));
  }
  config_.reward_model.input_dim = cond;
  config_.reward_model.output_dim = 1;
  reward_model_ = generative::MlpRegressor(config_.reward_model, derive_seed(seed, "imagination-reward-model"));
}

Matrix Imagination::condition(std::span<const double> state, int action) const {
  if (state.size() != state_size_) throw std::invalid_argument("imagination: state size mismatch");
  if (action < 0 || static_cast<std::size_t>(action) >= action_count_)
    throw std::out_of_range("imagination: action out of range");
  Matrix m(1, state_size_ + action_count_);
  std::copy(state.begin(), state.end(), m.data.begin());
  m.data[state_size_ + static_cast<std::size_t>(action)] = 1.0;
  return m;
}

Matrix Imagination::conditions(const std::vector<const Transition*>& batch) const {
  const std::size_t width = state_size_ + action_count_;
  Matrix m(batch.size(), width);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const Matrix row = condition(batch[r]->state, batch[r]->action);
    std::copy(row.data.begin(), row.data.end(), m.data.begin() + static_cast<std::ptrdiff_t>(r * width));
  }
  return m;
}

std::vector<ImaginationMetrics> Imagination::train(const memory::GairlMemory& mem, std::size_t steps, Rng& rng,
                                                   const ItpStepCallback& on_step) {
  std::vector<ImaginationMetrics> trace;
  if (steps == 0) return trace;
  if (mem.train_store().empty()) throw std::length_error("imagination: training store is empty");

  const std::size_t batch = config_.batch_size;
  auto draw = [&](Rng& r, Matrix* payload, Matrix* reward) {
    const auto ts = mem.sample_training_batch(batch, r);
    std::vector<const Transition*> ptrs;
    ptrs.reserve(ts.size());
    for (const auto& t : ts) ptrs.push_back(&t);
    if (payload) {
      *payload = Matrix(ts.size(), state_size_);
      for (std::size_t i = 0; i < ts.size(); ++i)
        std::copy(ts[i].next_state.begin(), ts[i].next_state.end(),
                  payload->data.begin() + static_cast<std::ptrdiff_t>(i * state_size_));
    }
    if (reward) {
      *reward = Matrix(ts.size(), 1);
      for (std::size_t i = 0; i < ts.size(); ++i) reward->data[i] = ts[i].reward;
    }
    return conditions(ptrs);
  };

  for (std::size_t s = 0; s < steps; ++s) {
    ItpStepStats stats;
    if (config_.state_model == StateModelKind::wgangp) {
      const auto g = gan_.train_step(
          [&](Rng& r) {
            generative::ConditionedBatch b;
            b.condition = draw(r, &b.payload, nullptr);
            return b;
          },
          rng);
      stats.critic_estimate = g.critic_estimate;
      stats.generator_loss = g.generator_loss;
      stats.penalty = g.penalty;
    } else {
      Matrix next;
      const Matrix cond = draw(rng, &next, nullptr);
      stats.state_l1 = state_regressor_.train_step(cond, next, rng);
    }
    Matrix reward;
    const Matrix cond = draw(rng, nullptr, &reward);
    stats.reward_l1 = reward_model_.train_step(cond, reward, rng);
    ++steps_;
    stats.itp_step = steps_;
    if (on_step) on_step(stats);
    if (steps_ % config_.metrics_period == 0 && !mem.test_store().empty()) trace.push_back(evaluate(mem.test_store(), rng));
  }
  return trace;
}

Matrix Imagination::predict_next_states(const Matrix& cond, Rng& rng) const {
  require_trained();
  Matrix out = config_.state_model == StateModelKind::wgangp ? gan_.generate(cond, rng) : state_regressor_.predict(cond);
  for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Matrix Imagination::predict_raw_rewards(const Matrix& cond) const {
  require_trained();
  return reward_model_.predict(cond);
}

std::vector<double> Imagination::predict_next_state(std::span<const double> state, int action, Rng& rng) const {
  return predict_next_states(condition(state, action), rng).data;
}

RewardPrediction Imagination::predict_reward(std::span<const double> state, int action) const {
  const double raw = predict_raw_rewards(condition(state, action)).data[0];
  return {round_reward(raw), raw};
}

ImaginationMetrics Imagination::evaluate(const memory::TransitionStore& test, Rng& rng) const {
  require_trained();
  if (test.empty()) throw std::length_error("imagination: test store is empty");
  ImaginationMetrics m;
  m.itp_step = steps_;
  double abs_sum = 0.0;
  double critic_gap = 0.0;
  std::vector<int> predicted, actual;
  predicted.reserve(test.size());
  actual.reserve(test.size());
  for (std::size_t begin = 0; begin < test.size(); begin += kEvalChunk) {
    const std::size_t end = std::min(test.size(), begin + kEvalChunk);
    std::vector<const Transition*> ptrs;
    for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&test[i]);
    const Matrix cond = conditions(ptrs);
    Matrix truth(ptrs.size(), state_size_);
    for (std::size_t i = 0; i < ptrs.size(); ++i)
      std::copy(ptrs[i]->next_state.begin(), ptrs[i]->next_state.end(),
                truth.data.begin() + static_cast<std::ptrdiff_t>(i * state_size_));
    const Matrix next = predict_next_states(cond, rng);
    for (std::size_t i = 0; i < next.size(); ++i) abs_sum += std::abs(next.data[i] - truth.data[i]);
    if (config_.state_model == StateModelKind::wgangp) {
      const Matrix real_score = gan_.critic_output(cond, truth);
      const Matrix fake_score = gan_.critic_output(cond, gan_.generate(cond, rng));
      for (std::size_t i = 0; i < ptrs.size(); ++i) critic_gap += real_score.data[i] - fake_score.data[i];
    }
    const Matrix raw = predict_raw_rewards(cond);
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      predicted.push_back(round_reward(raw.data[i]));
      actual.push_back(ptrs[i]->reward >= 0.5 ? 1 : 0);
    }
  }
  m.state_mae = abs_sum / static_cast<double>(test.size() * state_size_);
  const auto pr = eval::precision_recall(predicted, actual);
  m.reward_precision = pr.precision;
  m.reward_recall = pr.recall;
  if (config_.state_model == StateModelKind::wgangp) m.wasserstein_estimate = critic_gap / static_cast<double>(test.size());
  return m;
}

void Imagination::require_trained() const {
  if (!trained()) throw std::logic_error("imagination model has not been trained");
}

void Imagination::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  nn::TensorList all;
  auto append = [&all](const nn::TensorList& t) { all.tensors.insert(all.tensors.end(), t.tensors.begin(), t.tensors.end()); };
  if (config_.state_model == StateModelKind::wgangp) {
    append(gan_.generator().parameters());
    append(gan_.critic().parameters());
  } else {
    append(state_regressor_.network().parameters());
  }
  append(reward_model_.network().parameters());
  nn::write_tensors(out, all);
}

void Imagination::load_parameters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  const nn::TensorList all = nn::read_tensors(in);
  std::size_t offset = 0;
  auto take = [&](nn::TensorList& dst) {
    for (auto& t : dst.tensors) {
      if (offset >= all.tensors.size() || !all.tensors[offset].same_shape(t))
        throw std::runtime_error("imagination checkpoint does not match the configured models");
      t = all.tensors[offset++];
    }
  };
  if (config_.state_model == StateModelKind::wgangp) {
    take(gan_.generator().parameters());
    take(gan_.critic().parameters());
  } else {
    take(state_regressor_.network().parameters());
  }
  take(reward_model_.network().parameters());
  if (offset != all.tensors.size()) throw std::runtime_error("imagination checkpoint has extra tensors");
  steps_ = std::max<std::uint64_t>(steps_, 1);
}

ImaginedEnvironment::ImaginedEnvironment(const Imagination& im, const memory::GairlMemory& mem, env::EnvKind kind,
                                         std::size_t rollout_step_cap, std::uint64_t seed)
    : im_(im), mem_(mem), kind_(kind), cap_(rollout_step_cap), noise_rng_(derive_seed(seed, "imagined-env-noise")) {
  if (cap_ == 0) throw std::invalid_argument("rollout step cap must be >= 1");
  if (im_.state_size() != env::state_size(kind_) || im_.action_count() != env::action_count(kind_))
    throw std::invalid_argument("imagination dimensions do not match the environment");
}

env::EnvState ImaginedEnvironment::make_state(std::vector<double> normalized, std::size_t elapsed) const {
  env::EnvState s;
  s.raw = env::denormalize_state(normalized, kind_);
  s.normalized = std::move(normalized);
  s.elapsed_steps = elapsed;
  return s;
}

env::EnvState ImaginedEnvironment::reset(Rng& rng) { return make_state(mem_.sample_initial_state(rng), 0); }

env::StepResult ImaginedEnvironment::step(const env::EnvState& state, int action) {
  const Matrix cond = im_.condition(state.normalized, action);
  env::StepResult r;
  const int reward = round_reward(im_.predict_raw_rewards(cond).data[0]);
  r.next_state = make_state(im_.predict_next_states(cond, noise_rng_).data, state.elapsed_steps + 1);
  r.reward_normalized = reward;
  r.reward_raw = reward - 1.0;
  r.terminal = reward == 1;
  r.truncated = !r.terminal && r.next_state.elapsed_steps >= cap_;
  return r;
}

}  // namespace gairl::imagination
