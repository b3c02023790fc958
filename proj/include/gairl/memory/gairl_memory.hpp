#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gairl/memory/transition.hpp"
#include "gairl/rng.hpp"

namespace gairl::memory {

/// Ring of transitions with oldest-first eviction.
class TransitionStore {
 public:
  explicit TransitionStore(std::size_t capacity = 0) : capacity_(capacity) {}

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  std::size_t non_terminal_count() const { return non_terminal_; }
  /// index 0 is the oldest stored transition
  const Transition& operator[](std::size_t i) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // slot of the oldest item once the ring is full
  std::size_t non_terminal_ = 0;
};

struct GairlMemoryConfig {
  std::size_t capacity = 200000;
  double train_fraction = 0.8;
  bool oversample_terminals = true;

  void validate() const;
  std::size_t train_capacity() const;
  std::size_t test_capacity() const;
};

/// Real-environment experience for imagination training: a train/test split
/// with terminal transitions replicated round(mean episode length) times.
class GairlMemory {
 public:
  GairlMemory(GairlMemoryConfig config, std::uint64_t seed);

  /// Stores one real transition. `episode_truncated` marks the last step of
  /// an episode that hit its step cap; it only affects the episode-length
  /// statistics.
  void store(const Transition& t, bool episode_truncated = false);

  std::vector<Transition> sample_training_batch(std::size_t batch_size, Rng& rng) const;
  /// `state` of a uniformly drawn non-terminal training transition.
  std::vector<double> sample_initial_state(Rng& rng) const;

  const TransitionStore& train_store() const { return train_; }
  const TransitionStore& test_store() const { return test_; }
  double mean_episode_length() const { return mean_episode_length_; }
  std::size_t completed_episodes() const { return completed_episodes_; }
  std::size_t total_stored() const { return train_.size() + test_.size(); }
  const GairlMemoryConfig& config() const { return config_; }

  /// Flat record file: header "GMEM" u32(version=1) u32(d) u64(train) u64(test),
  /// then train records followed by test records, each
  /// f64[d] state, i32 action, f64 reward, f64[d] next_state, u8 terminal.
  void dump(const std::string& path) const;
  static GairlMemory load(const std::string& path, GairlMemoryConfig config, std::uint64_t seed);

 private:
  void assign(const Transition& t);

  GairlMemoryConfig config_;
  Rng split_rng_;
  TransitionStore train_;
  TransitionStore test_;
  double mean_episode_length_ = 0.0;
  std::size_t completed_episodes_ = 0;
  std::size_t current_episode_length_ = 0;
};

/// Round half up: 200.4 -> 200, 200.5 -> 201.
std::size_t round_half_up(double x);

}  // namespace gairl::memory
