#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gairl/memory/sum_tree.hpp"
#include "gairl/memory/transition.hpp"
#include "gairl/rng.hpp"

namespace gairl::memory {

struct PrioritizedConfig {
  std::size_t capacity = 10000;
  double alpha = 0.6;
  double epsilon = 1e-5;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::size_t beta_steps = 50000;

  void validate() const;
};

struct SampledBatch {
  std::vector<Transition> transitions;
  std::vector<double> weights;  // importance weights, max-normalized within the batch
  std::vector<std::size_t> indices;
};

/// Proportional prioritized replay over a ring of the N most recent tuples.
class PrioritizedBuffer {
 public:
  explicit PrioritizedBuffer(PrioritizedConfig config);

  /// New tuples enter with the largest priority seen so far (1 initially).
  void push(Transition t);

  /// Stratified draw: the priority mass is cut into batch_size equal
  /// segments and one index is drawn from each.
  SampledBatch sample(std::size_t batch_size, std::uint64_t global_step, Rng& rng) const;

  /// p_i = |td_i| + epsilon
  void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors);

  double beta(std::uint64_t global_step) const;
  /// p_i^alpha / sum_j p_j^alpha
  double probability(std::size_t index) const;
  double priority(std::size_t index) const { return priorities_.at(index); }
  double max_priority() const { return max_priority_; }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return config_.capacity; }
  const Transition& at(std::size_t index) const { return items_.at(index); }
  const SumTree& tree() const { return tree_; }
  const PrioritizedConfig& config() const { return config_; }

 private:
  PrioritizedConfig config_;
  std::vector<Transition> items_;
  std::vector<double> priorities_;
  SumTree tree_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace gairl::memory
