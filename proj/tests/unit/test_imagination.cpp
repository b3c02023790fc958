#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "gairl/imagination/imagination.hpp"

using namespace gairl;
using namespace gairl::imagination;
using env::EnvKind;

namespace {

ImaginationConfig small_config(StateModelKind kind) {
  ImaginationConfig c;
  c.state_model = kind;
  c.gan.generator_hidden = {32, 32};
  c.gan.critic_hidden = {32, 32};
  c.gan.critic_steps = 2;
  c.state_regressor.hidden = {32, 32};
  c.state_regressor.optimizer.learning_rate = 2e-3;
  c.reward_model.hidden = {16, 16};
  c.batch_size = 32;
  c.metrics_period = 50;
  return c;
}

// Energy-pumping with random actions mixed in, so episodes reach the goal.
memory::GairlMemory collect_mountain_car(std::size_t steps, std::uint64_t seed, bool oversample = true) {
  memory::GairlMemoryConfig mc;
  mc.capacity = steps * 4;
  mc.oversample_terminals = oversample;
  memory::GairlMemory mem(mc, seed);
  env::ClassicControl e({EnvKind::mountain_car, 300, seed});
  Rng rng(seed);
  auto s = e.reset(rng);
  for (std::size_t i = 0; i < steps; ++i) {
    const int a = uniform01(rng) < 0.3 ? static_cast<int>(uniform_index(rng, 2)) : (s.raw[1] > 0.0 ? 1 : 0);
    const auto r = e.step(s, a);
    mem.store({s.normalized, a, r.reward_normalized, r.next_state.normalized, r.terminal}, r.truncated);
    s = (r.terminal || r.truncated) ? e.reset(rng) : r.next_state;
  }
  return mem;
}

void force_reward(Imagination& im, double raw) {
  auto& p = im.reward_model().network().parameters();
  p[p.size() - 2].data.assign(p[p.size() - 2].size(), 0.0);
  p[p.size() - 1].data.assign(1, raw);
}

// Shape, range and flag-domain contract shared by every environment.
void check_step_contract(env::Environment& e, std::uint64_t seed, std::size_t cap) {
  Rng rng(seed);
  auto s = e.reset(rng);
  ASSERT_EQ(s.normalized.size(), e.state_size());
  ASSERT_EQ(s.elapsed_steps, 0u);
  for (int i = 0; i < 400; ++i) {
    const int a = static_cast<int>(uniform_index(rng, e.action_count()));
    const auto r = e.step(s, a);
    ASSERT_EQ(r.next_state.normalized.size(), e.state_size());
    for (double v : r.next_state.normalized) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    ASSERT_TRUE(r.reward_normalized == 0.0 || r.reward_normalized == 1.0);
    ASSERT_EQ(r.reward_raw, r.reward_normalized - 1.0);
    ASSERT_EQ(r.terminal, r.reward_normalized == 1.0);
    ASSERT_FALSE(r.terminal && r.truncated);
    ASSERT_EQ(r.next_state.elapsed_steps, s.elapsed_steps + 1);
    ASSERT_LE(r.next_state.elapsed_steps, cap);
    ASSERT_EQ(r.truncated, !r.terminal && r.next_state.elapsed_steps == cap);
    s = (r.terminal || r.truncated) ? e.reset(rng) : r.next_state;
  }
}

}  // namespace

TEST(Imagination, RewardRounding) {
  EXPECT_EQ(round_reward(0.87), 1);
  EXPECT_EQ(round_reward(0.12), 0);
  EXPECT_EQ(round_reward(0.5), 1);
  EXPECT_EQ(round_reward(0.4999999), 0);
  EXPECT_EQ(round_reward(1.7), 1);
  EXPECT_EQ(round_reward(-0.3), 0);
}

TEST(Imagination, UntrainedModelRefusesToPredict) {
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 1);
  Rng rng(1);
  const std::vector<double> s = {0.5, 0.5};
  EXPECT_THROW(im.predict_next_state(s, 0, rng), std::logic_error);
  EXPECT_THROW(im.predict_reward(s, 0), std::logic_error);
}

TEST(Imagination, ZeroStepsIsNoOp) {
  const auto mem = collect_mountain_car(200, 1);
  Imagination im(small_config(StateModelKind::wgangp), 2, 2, 1);
  const auto before = im.gan().generator().parameters();
  Rng rng(2);
  EXPECT_TRUE(im.train(mem, 0, rng).empty());
  EXPECT_EQ(im.gan().generator().parameters(), before);
  EXPECT_FALSE(im.trained());
}

TEST(Imagination, EmptyMemoryThrows) {
  memory::GairlMemory mem({}, 1);
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 1);
  Rng rng(2);
  EXPECT_THROW(im.train(mem, 5, rng), std::length_error);
}

TEST(Imagination, ConditionIsStateAndOneHotAction) {
  Imagination im(small_config(StateModelKind::mlp), 2, 3, 1);
  const std::vector<double> s = {0.25, 0.75};
  const auto c = im.condition(s, 2);
  EXPECT_EQ(c.data, (std::vector<double>{0.25, 0.75, 0.0, 0.0, 1.0}));
  EXPECT_THROW(im.condition(s, 3), std::out_of_range);
  EXPECT_THROW(im.condition(std::vector<double>{0.1}, 0), std::invalid_argument);
}

TEST(Imagination, TraceCadenceAndLearning) {
  const auto mem = collect_mountain_car(3000, 3);
  ASSERT_FALSE(mem.test_store().empty());
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 4);
  Rng rng(5);
  const auto trace = im.train(mem, 500, rng);
  ASSERT_EQ(trace.size(), 10u);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(trace[i].itp_step, 50 * (i + 1));
    EXPECT_GE(trace[i].state_mae, 0.0);
    EXPECT_FALSE(trace[i].wasserstein_estimate.has_value());
  }
  EXPECT_LT(trace.back().state_mae, trace.front().state_mae);
  EXPECT_LT(trace.back().state_mae, 0.05);
  const auto more = im.train(mem, 100, rng);
  ASSERT_EQ(more.size(), 2u);
  EXPECT_EQ(more[0].itp_step, 550u);
}

TEST(Imagination, WganModelReportsCriticEstimate) {
  const auto mem = collect_mountain_car(1000, 3);
  Imagination im(small_config(StateModelKind::wgangp), 2, 2, 4);
  Rng rng(5);
  const auto trace = im.train(mem, 50, rng);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_TRUE(trace[0].wasserstein_estimate.has_value());
}

TEST(Imagination, DeterministicPredictionsWithinUnitBox) {
  const auto mem = collect_mountain_car(500, 3);
  for (auto kind : {StateModelKind::mlp, StateModelKind::wgangp}) {
    Imagination im(small_config(kind), 2, 2, 4);
    Rng rng(5);
    im.train(mem, 5, rng);
    Rng q(9);
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> s = {uniform01(q) * 3 - 1, uniform01(q) * 3 - 1};
      const auto a = im.predict_next_state(s, i % 2, rng);
      EXPECT_EQ(a, im.predict_next_state(s, i % 2, rng));
      for (double v : a) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Imagination, CheckpointRoundTrip) {
  const auto mem = collect_mountain_car(500, 3);
  Imagination im(small_config(StateModelKind::wgangp), 2, 2, 4);
  Rng rng(5);
  im.train(mem, 5, rng);
  const auto path = std::filesystem::temp_directory_path() / "gairl_im_roundtrip.bin";
  im.save(path.string());
  Imagination other(small_config(StateModelKind::wgangp), 2, 2, 99);
  other.load_parameters(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(other.gan().generator().parameters(), im.gan().generator().parameters());
  EXPECT_EQ(other.gan().critic().parameters(), im.gan().critic().parameters());
  EXPECT_EQ(other.reward_model().network().parameters(), im.reward_model().network().parameters());
  Imagination mismatched(small_config(StateModelKind::mlp), 2, 2, 99);
  im.save(path.string());
  EXPECT_THROW(mismatched.load_parameters(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(ImaginedEnvironment, PredictedGoalRewardEndsEpisode) {
  const auto mem = collect_mountain_car(500, 3);
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 4);
  Rng rng(5);
  im.train(mem, 5, rng);
  ImaginedEnvironment e(im, mem, EnvKind::mountain_car, 20, 6);
  force_reward(im, 0.9);
  auto s = e.reset(rng);
  auto r = e.step(s, 1);
  EXPECT_EQ(r.reward_normalized, 1.0);
  EXPECT_TRUE(r.terminal);
  force_reward(im, 0.1);
  r = e.step(s, 1);
  EXPECT_EQ(r.reward_normalized, 0.0);
  EXPECT_FALSE(r.terminal);
}

TEST(ImaginedEnvironment, RolloutsRespectCap) {
  const auto mem = collect_mountain_car(500, 3);
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 4);
  Rng rng(5);
  im.train(mem, 5, rng);
  force_reward(im, 0.0);
  ImaginedEnvironment e(im, mem, EnvKind::mountain_car, 7, 6);
  for (int episode = 0; episode < 5; ++episode) {
    auto s = e.reset(rng);
    std::size_t n = 0;
    for (;;) {
      const auto r = e.step(s, 0);
      ++n;
      if (r.terminal || r.truncated) break;
      s = r.next_state;
    }
    EXPECT_EQ(n, 7u);
  }
}

TEST(ImaginedEnvironment, ResetDrawsNonTerminalMemoryStates) {
  const auto mem = collect_mountain_car(500, 3);
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 4);
  Rng rng(5);
  im.train(mem, 5, rng);
  ImaginedEnvironment e(im, mem, EnvKind::mountain_car, 10, 6);
  for (int i = 0; i < 50; ++i) {
    const auto s = e.reset(rng);
    bool found = false;
    for (std::size_t k = 0; k < mem.train_store().size() && !found; ++k)
      found = !mem.train_store()[k].terminal && mem.train_store()[k].state == s.normalized;
    EXPECT_TRUE(found);
    EXPECT_EQ(s.raw, env::denormalize_state(s.normalized, EnvKind::mountain_car));
  }
}

TEST(ImaginedEnvironment, SubstitutableForTheSimulator) {
  env::ClassicControl real({EnvKind::mountain_car, 50, 1});
  check_step_contract(real, 11, 50);

  const auto mem = collect_mountain_car(2000, 3);
  Imagination im(small_config(StateModelKind::wgangp), 2, 2, 4);
  Rng rng(5);
  im.train(mem, 20, rng);
  ImaginedEnvironment imagined(im, mem, EnvKind::mountain_car, 50, 6);
  check_step_contract(imagined, 11, 50);
  force_reward(im, 0.7);
  check_step_contract(imagined, 12, 50);
}

TEST(ImaginedEnvironment, DimensionMismatchRejected) {
  const auto mem = collect_mountain_car(200, 3);
  Imagination im(small_config(StateModelKind::mlp), 2, 2, 4);
  EXPECT_THROW(ImaginedEnvironment(im, mem, EnvKind::acrobot, 10, 1), std::invalid_argument);
  EXPECT_THROW(ImaginedEnvironment(im, mem, EnvKind::mountain_car, 0, 1), std::invalid_argument);
}
