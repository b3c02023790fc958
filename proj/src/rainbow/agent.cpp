#include "gairl/rainbow/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gairl/nn/serialize.hpp"

namespace gairl::rainbow {

using memory::Transition;
using nn::Matrix;

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("agent gamma must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("agent learning rate must be > 0");
  if (batch_size == 0) throw std::invalid_argument("agent batch size must be positive");
  if (buffer_capacity < batch_size) throw std::invalid_argument("agent buffer smaller than one batch");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw std::invalid_argument("agent epsilon values must lie in [0, 1]");
  if (n_step == 0) throw std::invalid_argument("agent n_step must be >= 1");
  if (update_period == 0 || target_sync_period == 0) throw std::invalid_argument("agent periods must be >= 1");
  if (!(gradient_clip > 0.0)) throw std::invalid_argument("agent gradient clip must be > 0");
  support().validate();
  memory::PrioritizedConfig{buffer_capacity, priority_alpha, priority_epsilon, priority_beta_start,
                            priority_beta_end, priority_beta_steps}
      .validate();
}

namespace {

QNetworkShape network_shape(const AgentConfig& c, std::size_t state_size, std::size_t action_count) {
  QNetworkShape s;
  s.state_size = state_size;
  s.action_count = action_count;
  s.hidden_layers = c.hidden_layers;
  s.atoms = c.atoms;
  s.leaky_alpha = c.leaky_alpha;
  s.init_stddev = c.init_stddev;
  s.noisy_sigma0 = c.noisy_sigma0;
  return s;
}

Matrix stack_rows(const std::vector<Transition>& batch, bool next) {
  const std::size_t d = (next ? batch.front().next_state : batch.front().state).size();
  Matrix m(batch.size(), d);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto& v = next ? batch[r].next_state : batch[r].state;
    if (v.size() != d) throw std::invalid_argument("batch rows differ in state size");
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

RainbowAgent::RainbowAgent(AgentConfig config, std::size_t state_size, std::size_t action_count,
                           std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      state_size_(state_size),
      action_count_(action_count),
      support_(config_.support()),
      online_(network_shape(config_, state_size, action_count), derive_seed(seed, "agent-init")),
      target_(online_),
      optimizer_(nn::SgdSettings{config_.learning_rate}, online_.parameters()),
      buffer_(memory::PrioritizedConfig{config_.buffer_capacity, config_.priority_alpha, config_.priority_epsilon,
                                        config_.priority_beta_start, config_.priority_beta_end,
                                        config_.priority_beta_steps}),
      action_rng_(make_rng(seed, "agent-action")),
      noise_rng_(make_rng(seed, "agent-noise")),
      replay_rng_(make_rng(seed, "agent-replay")) {}

double RainbowAgent::epsilon(std::uint64_t global_step) const {
  if (global_step < config_.epsilon_decay_start) return config_.epsilon_start;
  if (config_.epsilon_decay_length == 0) return config_.epsilon_end;
  const double frac = static_cast<double>(global_step - config_.epsilon_decay_start) /
                      static_cast<double>(config_.epsilon_decay_length);
  if (frac >= 1.0) return config_.epsilon_end;
  return config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * frac;
}

int RainbowAgent::greedy_from(const Matrix& probs, std::size_t row) const {
  const std::size_t n = support_.atoms;
  auto p = probs.row(row);
  int best = 0;
  double best_value = -INFINITY;
  for (std::size_t a = 0; a < action_count_; ++a) {
    const double q = expected_value(p.subspan(a * n, n), support_);
    if (q > best_value) {
      best_value = q;
      best = static_cast<int>(a);
    }
  }
  return best;
}

int RainbowAgent::select_action(std::span<const double> state, std::uint64_t global_step, nn::Mode mode) {
  if (state.size() != state_size_) throw std::invalid_argument("select_action: state size mismatch");
  if (mode == nn::Mode::train) {
    if (config_.epsilon_greedy && uniform01(action_rng_) < epsilon(global_step))
      return static_cast<int>(uniform_index(action_rng_, action_count_));
    if (config_.noisy_nets) online_.resample_noise(noise_rng_);
  }
  return greedy_from(online_.forward(Matrix::from_row(state), mode), 0);
}

std::vector<double> RainbowAgent::action_distribution(std::span<const double> state, int action,
                                                      nn::Mode mode) const {
  const Matrix probs = online_.forward(Matrix::from_row(state), mode);
  const auto row = probs.row(0).subspan(static_cast<std::size_t>(action) * support_.atoms, support_.atoms);
  return {row.begin(), row.end()};
}

std::vector<double> RainbowAgent::expected_values(std::span<const double> state, nn::Mode mode) const {
  const Matrix probs = online_.forward(Matrix::from_row(state), mode);
  std::vector<double> q(action_count_);
  for (std::size_t a = 0; a < action_count_; ++a)
    q[a] = expected_value(probs.row(0).subspan(a * support_.atoms, support_.atoms), support_);
  return q;
}

void RainbowAgent::emit_front() {
  Transition agg = window_.front();
  agg.reward = 0.0;
  double discount = 1.0;
  for (const auto& t : window_) {
    agg.reward += discount * t.reward;
    discount *= config_.gamma;
  }
  agg.next_state = window_.back().next_state;
  agg.terminal = window_.back().terminal;
  agg.horizon = static_cast<std::uint32_t>(window_.size());
  buffer_.push(std::move(agg));
}

void RainbowAgent::flush_window() {
  while (!window_.empty()) {
    emit_front();
    window_.pop_front();
  }
}

void RainbowAgent::end_segment() { flush_window(); }

std::optional<TrainStats> RainbowAgent::observe(const Transition& t, bool truncated, std::uint64_t global_step) {
  if (t.state.size() != state_size_ || t.next_state.size() != state_size_)
    throw std::invalid_argument("observe: state size mismatch");
  if (t.action < 0 || static_cast<std::size_t>(t.action) >= action_count_)
    throw std::invalid_argument("observe: action out of range");
  if (!window_.empty() && window_.back().next_state != t.state)
    throw std::logic_error("observe: transition does not continue the current episode");
  window_.push_back(t);
  window_.back().horizon = 1;
  if (t.terminal || truncated) {
    flush_window();
  } else if (window_.size() == config_.n_step) {
    emit_front();
    window_.pop_front();
  }
  ++observed_;
  if (observed_ % config_.update_period == 0 && buffer_.size() >= config_.batch_size) return train_step(global_step);
  return std::nullopt;
}

void RainbowAgent::resample_noise() {
  if (!config_.noisy_nets) return;
  online_.resample_noise(noise_rng_);
  target_.resample_noise(noise_rng_);
}

void RainbowAgent::sync_target() { target_.parameters() = online_.parameters(); }

Matrix RainbowAgent::target_distributions(const std::vector<Transition>& batch,
                                          std::vector<int>* bootstrap_actions) const {
  if (batch.empty()) throw std::invalid_argument("target_distributions: empty batch");
  const std::size_t n = support_.atoms;
  const Matrix next = stack_rows(batch, true);
  const Matrix online_next = online_.forward(next, nn::Mode::train);
  const Matrix target_next = target_.forward(next, nn::Mode::train);
  const std::vector<double> z = support_.values();

  Matrix out(batch.size(), n);
  if (bootstrap_actions) bootstrap_actions->assign(batch.size(), 0);
  std::vector<double> shifted(n);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const Transition& t = batch[r];
    const int a_star = greedy_from(online_next, r);
    if (bootstrap_actions) (*bootstrap_actions)[r] = a_star;
    const double discount = t.terminal ? 0.0 : std::pow(config_.gamma, static_cast<double>(t.horizon));
    for (std::size_t i = 0; i < n; ++i) shifted[i] = t.terminal ? t.reward : t.reward + discount * z[i];
    const auto probs = target_next.row(r).subspan(static_cast<std::size_t>(a_star) * n, n);
    const auto m = project_distribution(probs, shifted, support_);
    std::copy(m.begin(), m.end(), out.row(r).begin());
  }
  return out;
}

namespace {

struct BatchLoss {
  TrainStats stats;
  Matrix logit_gradient;
};

BatchLoss batch_loss(const Matrix& probs, const Matrix& targets, const memory::SampledBatch& batch,
                     std::size_t atoms) {
  const std::size_t rows = batch.transitions.size();
  BatchLoss out;
  out.logit_gradient = Matrix(probs.rows, probs.cols);
  out.stats.sample_losses.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t a = static_cast<std::size_t>(batch.transitions[r].action);
    const auto p = probs.row(r).subspan(a * atoms, atoms);
    const auto m = targets.row(r);
    const double w = batch.weights.empty() ? 1.0 : batch.weights[r];
    double ce = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
      if (m[i] > 0.0) ce -= m[i] * std::log(std::max(p[i], 1e-300));
      out.logit_gradient(r, a * atoms + i) = w * (p[i] - m[i]) / static_cast<double>(rows);
    }
    out.stats.sample_losses[r] = ce;
    out.stats.loss += w * ce / static_cast<double>(rows);
  }
  return out;
}

}  // namespace

TrainStats RainbowAgent::evaluate_loss(const memory::SampledBatch& batch) const {
  const Matrix targets = target_distributions(batch.transitions);
  const Matrix probs = online_.forward(stack_rows(batch.transitions, false), nn::Mode::train);
  return batch_loss(probs, targets, batch, support_.atoms).stats;
}

TrainStats RainbowAgent::learn(const memory::SampledBatch& batch) {
  const Matrix targets = target_distributions(batch.transitions);
  QNetwork::Cache cache;
  const Matrix probs = online_.forward(stack_rows(batch.transitions, false), nn::Mode::train, &cache);
  BatchLoss bl = batch_loss(probs, targets, batch, support_.atoms);
  nn::GradientSet grads = online_.backward(cache, bl.logit_gradient);
  bl.stats.gradient_norm = nn::clip_gradients(grads, config_.gradient_clip);
  optimizer_.step(online_.parameters(), grads);
  ++updates_;
  if (updates_ % config_.target_sync_period == 0) sync_target();
  return std::move(bl.stats);
}

TrainStats RainbowAgent::train_step(std::uint64_t global_step) {
  resample_noise();
  const memory::SampledBatch batch = buffer_.sample(config_.batch_size, global_step, replay_rng_);
  TrainStats stats = learn(batch);
  buffer_.update_priorities(batch.indices, stats.sample_losses);
  return stats;
}

void RainbowAgent::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  nn::write_tensors(out, online_.parameters());
}

}  // namespace gairl::rainbow
