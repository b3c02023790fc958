#include "gairl/memory/gairl_memory.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gairl/binary_io.hpp"

namespace gairl::memory {

std::size_t round_half_up(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("round_half_up expects a finite non-negative value");
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

void TransitionStore::push(Transition t) {
  if (capacity_ == 0) throw std::logic_error("transition store has zero capacity");
  const bool nt = !t.terminal;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    if (!items_[head_].terminal) --non_terminal_;
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  if (nt) ++non_terminal_;
}

const Transition& TransitionStore::operator[](std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("transition store index out of range");
  return items_[(head_ + i) % items_.size()];
}

void GairlMemoryConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("memory split fraction must be in (0,1)");
  if (train_capacity() == 0 || test_capacity() == 0) throw std::invalid_argument("memory capacity too small for the split");
}

std::size_t GairlMemoryConfig::train_capacity() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(capacity) * train_fraction));
}

std::size_t GairlMemoryConfig::test_capacity() const {
  const std::size_t train = train_capacity();
  return capacity > train ? capacity - train : 0;
}

GairlMemory::GairlMemory(GairlMemoryConfig config, std::uint64_t seed)
    : config_((config.validate(), config)),
      split_rng_(seed),
      train_(config_.train_capacity()),
      test_(config_.test_capacity()) {}

void GairlMemory::assign(const Transition& t) {
  if (uniform01(split_rng_) < config_.train_fraction) {
    train_.push(t);
  } else {
    test_.push(t);
  }
}

void GairlMemory::store(const Transition& t, bool episode_truncated) {
  validate_environment_transition(t);
  assign(t);
  ++current_episode_length_;
  if (!t.terminal && !episode_truncated) return;

  ++completed_episodes_;
  mean_episode_length_ += (static_cast<double>(current_episode_length_) - mean_episode_length_) /
                          static_cast<double>(completed_episodes_);
  current_episode_length_ = 0;
  if (t.terminal && config_.oversample_terminals) {
    const std::size_t replicas = round_half_up(mean_episode_length_);
    for (std::size_t r = 0; r < replicas; ++r) assign(t);
  }
}

std::vector<Transition> GairlMemory::sample_training_batch(std::size_t batch_size, Rng& rng) const {
  if (train_.empty()) throw std::length_error("training store is empty");
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(train_[uniform_index(rng, train_.size())]);
  return batch;
}

std::vector<double> GairlMemory::sample_initial_state(Rng& rng) const {
  if (train_.non_terminal_count() == 0) throw std::length_error("no non-terminal transition to start from");
  for (;;) {
    const Transition& t = train_[uniform_index(rng, train_.size())];
    if (!t.terminal) return t.state;
  }
}

namespace {

void write_record(std::ostream& out, const Transition& t) {
  for (double v : t.state) binary::put<double>(out, v);
  binary::put<std::int32_t>(out, t.action);
  binary::put<double>(out, t.reward);
  for (double v : t.next_state) binary::put<double>(out, v);
  binary::put<std::uint8_t>(out, t.terminal ? 1 : 0);
}

Transition read_record(std::istream& in, std::size_t d) {
  Transition t;
  t.state.resize(d);
  for (double& v : t.state) v = binary::get<double>(in);
  t.action = binary::get<std::int32_t>(in);
  t.reward = binary::get<double>(in);
  t.next_state.resize(d);
  for (double& v : t.next_state) v = binary::get<double>(in);
  t.terminal = binary::get<std::uint8_t>(in) != 0;
  return t;
}

}  // namespace

void GairlMemory::dump(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::size_t d = 0;
  if (!train_.empty()) d = train_[0].state.size();
  else if (!test_.empty()) d = test_[0].state.size();
  binary::put_magic(out, "GMEM");
  binary::put<std::uint32_t>(out, 1);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  binary::put<std::uint64_t>(out, train_.size());
  binary::put<std::uint64_t>(out, test_.size());
  for (std::size_t i = 0; i < train_.size(); ++i) write_record(out, train_[i]);
  for (std::size_t i = 0; i < test_.size(); ++i) write_record(out, test_[i]);
  if (!out) throw std::runtime_error("failed writing " + path);
}

GairlMemory GairlMemory::load(const std::string& path, GairlMemoryConfig config, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  binary::expect_magic(in, "GMEM");
  if (binary::get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported memory dump version");
  const std::size_t d = binary::get<std::uint32_t>(in);
  const auto n_train = binary::get<std::uint64_t>(in);
  const auto n_test = binary::get<std::uint64_t>(in);
  GairlMemory mem(config, seed);
  for (std::uint64_t i = 0; i < n_train; ++i) mem.train_.push(read_record(in, d));
  for (std::uint64_t i = 0; i < n_test; ++i) mem.test_.push(read_record(in, d));
  return mem;
}

}  // namespace gairl::memory
