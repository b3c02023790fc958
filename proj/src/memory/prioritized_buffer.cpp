#include "gairl/memory/prioritized_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gairl::memory {

void PrioritizedConfig::validate() const {
  if (capacity == 0) throw std::invalid_argument("buffer capacity must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("prioritisation alpha must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("prioritisation epsilon must be > 0");
  if (!(beta_start >= 0.0 && beta_end >= 0.0)) throw std::invalid_argument("prioritisation beta must be >= 0");
}

PrioritizedBuffer::PrioritizedBuffer(PrioritizedConfig config)
    : config_(config), tree_((config.validate(), config.capacity)) {
  items_.resize(config_.capacity);
  priorities_.assign(config_.capacity, 0.0);
}

void PrioritizedBuffer::push(Transition t) {
  items_[next_] = std::move(t);
  priorities_[next_] = max_priority_;
  tree_.set(next_, std::pow(max_priority_, config_.alpha));
  next_ = (next_ + 1) % config_.capacity;
  size_ = std::min(size_ + 1, config_.capacity);
}

double PrioritizedBuffer::beta(std::uint64_t global_step) const {
  if (config_.beta_steps == 0) return config_.beta_end;
  const double frac = std::min(1.0, static_cast<double>(global_step) / static_cast<double>(config_.beta_steps));
  return config_.beta_start + (config_.beta_end - config_.beta_start) * frac;
}

double PrioritizedBuffer::probability(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("buffer index out of range");
  return tree_.get(index) / tree_.total();
}

SampledBatch PrioritizedBuffer::sample(std::size_t batch_size, std::uint64_t global_step, Rng& rng) const {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (size_ < batch_size) throw std::length_error("not enough transitions in buffer to sample a batch");
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch_size);
  const double b = beta(global_step);

  SampledBatch out;
  out.transitions.reserve(batch_size);
  out.weights.reserve(batch_size);
  out.indices.reserve(batch_size);
  double max_weight = 0.0;
  for (std::size_t i = 0; i < batch_size; ++i) {
    const double mass = (static_cast<double>(i) + uniform01(rng)) * segment;
    std::size_t idx = tree_.find_prefix(mass);
    if (idx >= size_) idx = size_ - 1;
    const double p = tree_.get(idx) / total;
    const double w = std::pow(static_cast<double>(size_) * p, -b);
    max_weight = std::max(max_weight, w);
    out.indices.push_back(idx);
    out.transitions.push_back(items_[idx]);
    out.weights.push_back(w);
  }
  for (double& w : out.weights) w /= max_weight;
  return out;
}

void PrioritizedBuffer::update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors) {
  if (indices.size() != td_errors.size()) throw std::invalid_argument("indices and td errors differ in length");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size_) throw std::out_of_range("priority index out of range");
    if (!std::isfinite(td_errors[i])) throw std::domain_error("non-finite td error");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double p = std::abs(td_errors[i]) + config_.epsilon;
    priorities_[indices[i]] = p;
    tree_.set(indices[i], std::pow(p, config_.alpha));
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace gairl::memory
