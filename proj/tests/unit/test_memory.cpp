#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

#include "gairl/memory/gairl_memory.hpp"
#include "gairl/memory/prioritized_buffer.hpp"

using namespace gairl;
using namespace gairl::memory;

namespace {

// Upper 5% points of the chi-square distribution.
constexpr double kChi2Df7 = 14.067;
constexpr double kChi2Df9 = 16.919;

Transition make_t(double tag, bool terminal = false) {
  Transition t;
  t.state = {tag, 0.5};
  t.next_state = {tag, 0.25};
  t.action = 1;
  t.reward = terminal ? 1.0 : 0.0;
  t.terminal = terminal;
  return t;
}

double chi_square(const std::vector<double>& counts, double expected) {
  double s = 0.0;
  for (double c : counts) s += (c - expected) * (c - expected) / expected;
  return s;
}

double leaf_sum(const SumTree& tree, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += tree.get(i);
  return s;
}

}  // namespace

TEST(SumTree, RootMatchesLeafSumUnderRandomUpdates) {
  SumTree tree(37);
  Rng rng(3);
  for (int k = 0; k < 5000; ++k) {
    tree.set(uniform_index(rng, 37), uniform01(rng) * 10.0);
    ASSERT_NEAR(tree.total(), leaf_sum(tree, 37), 1e-9);
  }
}

TEST(SumTree, ExhaustiveDescentOnEightLeaves) {
  SumTree tree(8);
  const std::vector<double> p = {0.3, 1.7, 0.0, 2.2, 0.05, 0.9, 4.0, 0.6};
  for (std::size_t i = 0; i < p.size(); ++i) tree.set(i, p[i]);
  double prefix = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      for (double frac : {0.01, 0.5, 0.99}) EXPECT_EQ(tree.find_prefix(prefix + frac * p[i]), i) << i;
    }
    prefix += p[i];
  }
  EXPECT_EQ(tree.find_prefix(prefix * 2.0), 7u);
}

TEST(SumTree, NeverLandsOnEmptyLeaf) {
  SumTree tree(5);
  tree.set(1, 2.0);
  for (double m : {0.0, 1.0, 2.0, 3.5, 100.0}) EXPECT_EQ(tree.find_prefix(m), 1u);
}

TEST(PrioritizedBuffer, PushIntoEmptyHasPriorityOne) {
  PrioritizedBuffer buf({.capacity = 4});
  buf.push(make_t(0.1));
  EXPECT_EQ(buf.size(), 1u);
  EXPECT_EQ(buf.priority(0), 1.0);
}

TEST(PrioritizedBuffer, RingEvictsOldest) {
  PrioritizedBuffer buf({.capacity = 4});
  for (int i = 0; i < 5; ++i) buf.push(make_t(i / 10.0));
  EXPECT_EQ(buf.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NE(buf.at(i).state[0], 0.0);
}

TEST(PrioritizedBuffer, RootIsSumOfPushedPriorities) {
  PrioritizedBuffer buf({.capacity = 16, .alpha = 1.0});
  Rng rng(5);
  std::vector<std::size_t> idx;
  std::vector<double> td;
  for (int k = 0; k < 10; ++k) {
    buf.push(make_t(0.1));
    if (k % 3 == 2) {
      idx = {uniform_index(rng, buf.size())};
      td = {uniform01(rng) * 3.0};
      buf.update_priorities(idx, td);
    }
    double brute = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) brute += std::pow(buf.priority(i), 1.0);
    ASSERT_NEAR(buf.tree().total(), brute, 1e-9);
  }
}

TEST(PrioritizedBuffer, PriorityFromTdError) {
  PrioritizedBuffer buf({.capacity = 4});
  buf.push(make_t(0.1));
  buf.push(make_t(0.2));
  const std::vector<std::size_t> idx = {0, 1};
  const std::vector<double> td = {0.0, -0.5};
  buf.update_priorities(idx, td);
  EXPECT_EQ(buf.priority(0), 1e-5);
  EXPECT_DOUBLE_EQ(buf.priority(1), 0.50001);
  EXPECT_EQ(buf.max_priority(), 1.0);
  const std::vector<std::size_t> bad = {2};
  const std::vector<double> one = {0.0};
  EXPECT_THROW(buf.update_priorities(bad, one), std::out_of_range);
}

TEST(PrioritizedBuffer, MaxPriorityTrackerFeedsNewPushes) {
  PrioritizedBuffer buf({.capacity = 4});
  buf.push(make_t(0.1));
  const std::vector<std::size_t> idx = {0};
  const std::vector<double> td = {2.5};
  buf.update_priorities(idx, td);
  buf.push(make_t(0.2));
  EXPECT_DOUBLE_EQ(buf.priority(1), 2.5 + 1e-5);
}

TEST(PrioritizedBuffer, UniformPrioritiesSampleUniformly) {
  PrioritizedBuffer buf({.capacity = 8});
  for (int i = 0; i < 8; ++i) buf.push(make_t(i / 10.0));
  Rng rng(11);
  std::vector<double> counts(8, 0.0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) counts[buf.sample(1, 0, rng).indices[0]] += 1.0;
  EXPECT_LT(chi_square(counts, draws / 8.0), kChi2Df7);
}

TEST(PrioritizedBuffer, ThreeToOnePrioritiesWithAlphaOne) {
  PrioritizedBuffer buf({.capacity = 2, .alpha = 1.0});
  buf.push(make_t(0.1));
  buf.push(make_t(0.2));
  const std::vector<std::size_t> idx = {0, 1};
  const std::vector<double> td = {3.0 - 1e-5, 1.0 - 1e-5};
  buf.update_priorities(idx, td);
  Rng rng(2);
  std::size_t hits = 0;
  const std::size_t draws = 100000;
  for (std::size_t k = 0; k < draws; ++k) hits += buf.sample(1, 0, rng).indices[0] == 0;
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.75, 0.01);
  EXPECT_NEAR(buf.probability(0), 0.75, 1e-12);
}

TEST(PrioritizedBuffer, BetaOneUniformWeightsAreOne) {
  PrioritizedBuffer buf({.capacity = 8});
  for (int i = 0; i < 8; ++i) buf.push(make_t(0.1));
  Rng rng(1);
  const auto batch = buf.sample(8, 50000, rng);
  for (double w : batch.weights) EXPECT_DOUBLE_EQ(w, 1.0);
}

TEST(PrioritizedBuffer, BetaSchedule) {
  PrioritizedBuffer buf({});
  EXPECT_DOUBLE_EQ(buf.beta(0), 0.4);
  EXPECT_DOUBLE_EQ(buf.beta(25000), 0.7);
  EXPECT_DOUBLE_EQ(buf.beta(50000), 1.0);
  EXPECT_DOUBLE_EQ(buf.beta(90000), 1.0);
}

TEST(PrioritizedBuffer, ImportanceWeightsMatchFormula) {
  PrioritizedBuffer buf({.capacity = 4});
  for (int i = 0; i < 4; ++i) buf.push(make_t(0.1));
  const std::vector<std::size_t> idx = {0, 1, 2, 3};
  const std::vector<double> td = {0.1, 0.7, 2.0, 0.3};
  buf.update_priorities(idx, td);
  Rng rng(9);
  const auto batch = buf.sample(4, 10000, rng);
  const double b = buf.beta(10000);
  double wmax = 0.0;
  std::vector<double> w;
  for (auto i : batch.indices) {
    w.push_back(std::pow(4.0 * buf.probability(i), -b));
    wmax = std::max(wmax, w.back());
  }
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(batch.weights[k], w[k] / wmax, 1e-12);
}

TEST(PrioritizedBuffer, InsufficientItemsThrow) {
  PrioritizedBuffer buf({.capacity = 8});
  buf.push(make_t(0.1));
  Rng rng(1);
  EXPECT_THROW(buf.sample(2, 0, rng), std::length_error);
}

TEST(GairlMemory, RoundHalfUp) {
  EXPECT_EQ(round_half_up(200.4), 200u);
  EXPECT_EQ(round_half_up(200.5), 201u);
  EXPECT_EQ(round_half_up(0.49), 0u);
}

TEST(GairlMemory, NonTerminalStoredOnce) {
  GairlMemory mem({.capacity = 100}, 1);
  mem.store(make_t(0.3));
  EXPECT_EQ(mem.total_stored(), 1u);
}

TEST(GairlMemory, TerminalReplicatedByMeanEpisodeLength) {
  GairlMemory mem({.capacity = 10000}, 4);
  // four episodes of 200 then one of 202: mean 200.4 after the fifth
  const std::vector<int> lengths = {200, 200, 200, 200, 202};
  std::size_t expected = 0;
  for (std::size_t e = 0; e < lengths.size(); ++e) {
    for (int s = 0; s + 1 < lengths[e]; ++s) mem.store(make_t(0.2));
    const std::size_t before = mem.total_stored();
    mem.store(make_t(0.9, true));
    expected = mem.total_stored() - before - 1;
  }
  EXPECT_DOUBLE_EQ(mem.mean_episode_length(), 200.4);
  EXPECT_EQ(expected, 200u);
}

TEST(GairlMemory, TruncatedEpisodesCountTowardsMean) {
  GairlMemory mem({.capacity = 1000}, 4);
  for (int s = 0; s < 9; ++s) mem.store(make_t(0.2));
  mem.store(make_t(0.2), true);
  EXPECT_EQ(mem.total_stored(), 10u);
  EXPECT_DOUBLE_EQ(mem.mean_episode_length(), 10.0);
  for (int s = 0; s < 3; ++s) mem.store(make_t(0.2));
  mem.store(make_t(0.9, true));  // mean (10 + 4) / 2 = 7
  EXPECT_EQ(mem.total_stored(), 14u + 7u);
}

TEST(GairlMemory, OversamplingSwitch) {
  GairlMemory mem({.capacity = 1000, .oversample_terminals = false}, 4);
  mem.store(make_t(0.2));
  mem.store(make_t(0.9, true));
  EXPECT_EQ(mem.total_stored(), 2u);
}

TEST(GairlMemory, SplitFraction) {
  GairlMemory mem({.capacity = 200000}, 17);
  for (int i = 0; i < 100000; ++i) mem.store(make_t(0.5));
  const double frac = static_cast<double>(mem.train_store().size()) / 100000.0;
  EXPECT_NEAR(frac, 0.8, 0.01);
}

TEST(GairlMemory, CapacitiesAndEviction) {
  GairlMemoryConfig cfg;
  EXPECT_EQ(cfg.train_capacity(), 160000u);
  EXPECT_EQ(cfg.test_capacity(), 40000u);
  GairlMemory mem({.capacity = 10}, 3);
  for (int i = 0; i < 200; ++i) mem.store(make_t(i / 200.0));
  EXPECT_EQ(mem.train_store().size(), 8u);
  EXPECT_EQ(mem.test_store().size(), 2u);
  // oldest-first: the train store holds strictly increasing tags ending near the last stored
  for (std::size_t i = 1; i < 8; ++i) EXPECT_LT(mem.train_store()[i - 1].state[0], mem.train_store()[i].state[0]);
}

TEST(GairlMemory, SingletonBatch) {
  GairlMemory mem({.capacity = 100, .train_fraction = 0.99}, 5);
  Rng rng(1);
  while (mem.train_store().empty()) mem.store(make_t(0.3));
  const Transition only = mem.train_store()[0];
  ASSERT_EQ(mem.train_store().size(), 1u);
  for (const auto& t : mem.sample_training_batch(32, rng)) EXPECT_EQ(t, only);
}

TEST(GairlMemory, UniformBatchSampling) {
  GairlMemory mem({.capacity = 100, .train_fraction = 0.5}, 5);
  while (mem.train_store().size() < 10) mem.store(make_t(mem.total_stored() / 100.0));
  Rng rng(8);
  std::vector<double> counts(10, 0.0);
  for (int k = 0; k < 1000; ++k) {
    for (const auto& t : mem.sample_training_batch(100, rng)) {
      for (std::size_t i = 0; i < 10; ++i) {
        if (t == mem.train_store()[i]) {
          counts[i] += 1.0;
          break;
        }
      }
    }
  }
  EXPECT_LT(chi_square(counts, 10000.0), kChi2Df9);
}

TEST(GairlMemory, InitialStateSkipsTerminals) {
  GairlMemory mem({.capacity = 10000}, 6);
  for (int e = 0; e < 20; ++e) {
    for (int s = 0; s < 5; ++s) mem.store(make_t(0.1 * (s % 3)));
    mem.store(make_t(0.95, true));
  }
  Rng rng(2);
  for (int k = 0; k < 2000; ++k) EXPECT_NE(mem.sample_initial_state(rng)[0], 0.95);
}

TEST(GairlMemory, EmptyStoreThrows) {
  GairlMemory mem({.capacity = 100}, 6);
  Rng rng(2);
  EXPECT_THROW(mem.sample_training_batch(1, rng), std::length_error);
  EXPECT_THROW(mem.sample_initial_state(rng), std::length_error);
}

TEST(GairlMemory, RejectsInvalidTransitions) {
  GairlMemory mem({.capacity = 100}, 6);
  Transition t = make_t(0.2);
  t.reward = 1.0;
  t.terminal = false;
  EXPECT_NO_THROW(mem.store(t));
  t.terminal = true;
  t.reward = 0.0;
  EXPECT_THROW(mem.store(t), std::invalid_argument);
  t = make_t(1.5);
  EXPECT_THROW(mem.store(t), std::invalid_argument);
}

TEST(GairlMemory, DumpLoadRoundTrip) {
  GairlMemory mem({.capacity = 500}, 12);
  for (int e = 0; e < 10; ++e) {
    for (int s = 0; s < 7; ++s) mem.store(make_t(s / 7.0));
    mem.store(make_t(0.99, true));
  }
  const auto path = std::filesystem::temp_directory_path() / "gairl_mem_roundtrip.bin";
  mem.dump(path.string());
  const auto back = GairlMemory::load(path.string(), {.capacity = 500}, 1);
  ASSERT_EQ(back.train_store().size(), mem.train_store().size());
  ASSERT_EQ(back.test_store().size(), mem.test_store().size());
  for (std::size_t i = 0; i < mem.train_store().size(); ++i) EXPECT_EQ(back.train_store()[i], mem.train_store()[i]);
  for (std::size_t i = 0; i < mem.test_store().size(); ++i) EXPECT_EQ(back.test_store()[i], mem.test_store()[i]);
  const std::size_t record = 2 * 8 + 4 + 8 + 2 * 8 + 1;
  EXPECT_EQ(std::filesystem::file_size(path), 4 + 4 + 4 + 8 + 8 + record * mem.total_stored());
  std::filesystem::remove(path);
}
