#include <gtest/gtest.h>

#include <cmath>

#include "gairl/generative/gan.hpp"
#include "gairl/generative/regressor.hpp"
#include "gairl/nn/input_gradient.hpp"
#include "test_helpers.hpp"

using namespace gairl;
using namespace gairl::generative;
using nn::Matrix;

namespace {

GanConfig small_gan(GanFamily family, std::size_t cond, std::size_t payload, std::size_t noise = 0) {
  GanConfig c = GanConfig::defaults(family);
  c.condition_dim = cond;
  c.payload_dim = payload;
  c.noise_dim = noise;
  c.generator_hidden = {16, 16};
  c.critic_hidden = {16, 16};
  c.init_stddev = 0.5;
  return c;
}

ConditionedBatch batch_from(const Matrix& cond, const Matrix& payload) { return {cond, payload}; }

Matrix column(std::initializer_list<double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data.begin());
  return m;
}

Matrix uniform_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = uniform01(rng);
  return m;
}

// Single hidden unit critic D(x) = w2 * lrelu(w1 . x + b1) + b2.
void set_single_unit_critic(ConditionalGan& gan, std::vector<double> w1, double b1, double w2, double b2) {
  auto& p = gan.critic().parameters();
  ASSERT_EQ(p[0].rows, 1u);
  p[0].data = std::move(w1);
  p[1].data = {b1};
  p[2].data = {w2};
  p[3].data = {b2};
}

}  // namespace

TEST(Generator, DeterministicWithoutNoiseAndInRange) {
  ConditionalGan gan(small_gan(GanFamily::wgangp, 3, 2), 1);
  Rng rng(2);
  const Matrix cond = gairl::testing::random_matrix(20, 3, rng, 5.0);
  const Matrix a = gan.generate(cond, rng);
  const Matrix b = gan.generate(cond, rng);
  EXPECT_EQ(a, b);
  for (double v : a.data) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(gan.generate(Matrix(2, 2), rng), std::invalid_argument);
}

TEST(Generator, NoiseMakesOutputStochastic) {
  ConditionalGan gan(small_gan(GanFamily::wgangp, 1, 2, 3), 1);
  Rng rng(2);
  const Matrix cond(4, 1, 0.5);
  EXPECT_NE(gan.generate(cond, rng), gan.generate(cond, rng));
  const Matrix z(4, 3, 0.1);
  EXPECT_EQ(gan.generate(z, cond), gan.generate(z, cond));
}

TEST(OriginalGan, HalfEverywhereGivesTwoLogTwo) {
  GanConfig c = small_gan(GanFamily::gan, 0, 1, 1);
  ConditionalGan gan(c, 3);
  auto& p = gan.critic().parameters();
  p[p.size() - 2].data.assign(p[p.size() - 2].size(), 0.0);
  p[p.size() - 1].data.assign(1, 0.0);
  Rng rng(1);
  const Matrix real = column({0.1, 0.5, 0.9});
  EXPECT_NEAR(gan.critic_loss(batch_from(Matrix(3, 0), real), column({0.3, 0.2, 0.7}), rng), 2.0 * std::log(2.0), 1e-12);
  EXPECT_EQ(c.critic_steps, 1u);
}

TEST(OriginalGan, PerfectDiscriminatorKeepsGeneratorGradient) {
  GanConfig c = small_gan(GanFamily::gan, 0, 1, 1);
  c.critic_hidden = {1};
  ConditionalGan gan(c, 3);
  // D = sigmoid(10 lrelu(100 x - 82)): ~1 above 0.9, ~0 below 0.75
  set_single_unit_critic(gan, {100.0}, -82.0, 10.0, 0.0);
  Rng rng(4);
  const Matrix none(4, 0);
  EXPECT_LT(gan.critic_loss(batch_from(none, column({0.9, 0.95, 0.92, 0.99})), column({0.5, 0.45, 0.55, 0.5}), rng), 1e-9);
  auto& g_params = gan.generator().parameters();
  g_params[g_params.size() - 2].data.assign(g_params[g_params.size() - 2].size(), 0.0);
  g_params[g_params.size() - 1].data.assign(1, 0.0);
  const Matrix fake = gan.generate(Matrix(64, 0), rng);
  for (double v : fake.data) ASSERT_EQ(v, 0.5);  // every fake is confidently rejected
  const auto g = gan.generator_gradient(Matrix(64, 0), rng);
  EXPECT_GT(std::sqrt(g.squared_norm()), 1e-3);
}

TEST(Wgan, ClippingBoundsEveryWeight) {
  GanConfig c = small_gan(GanFamily::wgan, 1, 1);
  ConditionalGan gan(c, 5);
  Rng rng(6);
  const ConditionedBatch real{uniform_matrix(16, 1, rng), uniform_matrix(16, 1, rng)};
  for (int k = 0; k < 3; ++k) {
    gan.critic_step(real, uniform_matrix(16, 1, rng), rng);
    for (const auto& t : gan.critic().parameters().tensors)
      for (double v : t.data) ASSERT_LE(std::abs(v), c.clip_value);
  }
}

TEST(Wgan, IdenticalBatchesGiveZeroEstimate) {
  ConditionalGan gan(small_gan(GanFamily::wgan, 1, 2), 5);
  Rng rng(6);
  const ConditionedBatch real{uniform_matrix(16, 1, rng), uniform_matrix(16, 2, rng)};
  double est = 1.0;
  gan.critic_loss(real, real.payload, rng, nullptr, &est);
  EXPECT_EQ(est, 0.0);
}

TEST(Wgan, EstimateNonNegativeOnSeparatedPointMasses) {
  GanConfig c = small_gan(GanFamily::wgan, 0, 1, 1);
  c.critic_hidden = {32, 32};
  c.critic_optimizer.learning_rate = 5e-3;
  ConditionalGan gan(c, 5);
  Rng rng(6);
  const ConditionedBatch real{Matrix(32, 0), Matrix(32, 1, 0.65)};
  const Matrix fake(32, 1, 0.35);
  GanStepStats s;
  for (int k = 0; k < 500; ++k) s = gan.critic_step(real, fake, rng);
  EXPECT_GT(s.critic_estimate, 0.0);
  EXPECT_LE(s.critic_estimate, 0.3);
}

TEST(GradientPenalty, UnitGradientCriticHasZeroPenalty) {
  GanConfig c = small_gan(GanFamily::wgangp, 0, 4, 1);
  c.critic_hidden = {1};
  ConditionalGan gan(c, 7);
  set_single_unit_critic(gan, {0.5, 0.5, 0.5, 0.5}, 10.0, 1.0, 0.0);
  Rng rng(8);
  const ConditionedBatch real{Matrix(8, 0), uniform_matrix(8, 4, rng)};
  EXPECT_NEAR(gan.gradient_penalty(real, uniform_matrix(8, 4, rng), rng), 0.0, 1e-24);
}

TEST(GradientPenalty, ConstantCriticHasUnitPenalty) {
  GanConfig c = small_gan(GanFamily::wgangp, 0, 3, 1);
  ConditionalGan gan(c, 7);
  for (auto& t : gan.critic().parameters().tensors) t.data.assign(t.size(), 0.0);
  Rng rng(8);
  const ConditionedBatch real{Matrix(8, 0), uniform_matrix(8, 3, rng)};
  EXPECT_EQ(gan.gradient_penalty(real, uniform_matrix(8, 3, rng), rng), 1.0);
}

TEST(GradientPenalty, SlopeTwoCritic) {
  GanConfig c = small_gan(GanFamily::wgangp, 0, 1, 1);
  c.critic_hidden = {1};
  ConditionalGan gan(c, 7);
  set_single_unit_critic(gan, {2.0}, 5.0, 1.0, 0.0);
  Rng rng(8);
  const ConditionedBatch real{Matrix(8, 0), uniform_matrix(8, 1, rng)};
  EXPECT_NEAR(gan.gradient_penalty(real, uniform_matrix(8, 1, rng), rng), 1.0, 1e-15);
}

TEST(GradientPenalty, ConditionIsNotPenalizedOrMixed) {
  GanConfig c = small_gan(GanFamily::wgangp, 2, 1, 0);
  c.critic_hidden = {1};
  ConditionalGan gan(c, 7);
  // D = 5 c0 + 5 c1 + 1 * x: only the payload slope counts
  set_single_unit_critic(gan, {5.0, 5.0, 1.0}, 20.0, 1.0, 0.0);
  Rng rng(8);
  const ConditionedBatch real{uniform_matrix(8, 2, rng), uniform_matrix(8, 1, rng)};
  EXPECT_NEAR(gan.gradient_penalty(real, uniform_matrix(8, 1, rng), rng), 0.0, 1e-24);
}

TEST(GradientPenalty, InputGradientMatchesFiniteDifferences) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    nn::NetworkSpec spec;
    spec.layer_sizes = {4, 7, 5, 1};
    spec.init_stddev = 0.7;
    const nn::NetworkParameters params = nn::init_network(spec, 100 + trial);
    const Matrix x = gairl::testing::random_matrix(3, 4, rng);
    nn::ForwardCache cache;
    nn::forward(spec, params, x, nn::Mode::eval, nullptr, &cache);
    const auto trace = nn::input_gradient(spec, params, cache);
    const double h = 1e-5;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t j = 0; j < 4; ++j) {
        Matrix xp = x, xm = x;
        xp(r, j) += h;
        xm(r, j) -= h;
        const double fd = (nn::forward(spec, params, xp, nn::Mode::eval)(r, 0) -
                           nn::forward(spec, params, xm, nn::Mode::eval)(r, 0)) / (2 * h);
        EXPECT_LT(gairl::testing::relative_error(trace.input_gradient(r, j), fd), 1e-4);
      }
    }
  }
}

TEST(GradientPenalty, CriticGradientMatchesFiniteDifferences) {
  GanConfig c = small_gan(GanFamily::wgangp, 2, 2, 0);
  c.critic_hidden = {6, 5};
  c.penalty_coefficient = 3.0;
  ConditionalGan gan(c, 11);
  Rng data_rng(12);
  const ConditionedBatch real{uniform_matrix(5, 2, data_rng), uniform_matrix(5, 2, data_rng)};
  const Matrix fake = uniform_matrix(5, 2, data_rng);
  auto loss = [&](const ConditionalGan& g) {
    Rng r(77);
    return g.critic_loss(real, fake, r);
  };
  Rng r(77);
  const auto grads = gan.critic_gradient(real, fake, r);
  const double h = 1e-5;
  for (std::size_t t = 0; t < grads.size(); ++t) {
    for (std::size_t i = 0; i < grads[t].size(); ++i) {
      ConditionalGan plus = gan, minus = gan;
      plus.critic().parameters()[t].data[i] += h;
      minus.critic().parameters()[t].data[i] -= h;
      const double fd = (loss(plus) - loss(minus)) / (2 * h);
      if (std::abs(fd) < 1e-8 && std::abs(grads[t].data[i]) < 1e-8) continue;
      ASSERT_LT(gairl::testing::relative_error(grads[t].data[i], fd), 1e-4) << t << " " << i;
    }
  }
}

TEST(GradientPenalty, ZeroLambdaEqualsUnclippedWgan) {
  GanConfig gp = small_gan(GanFamily::wgangp, 1, 2);
  gp.penalty_coefficient = 0.0;
  GanConfig w = gp;
  w.family = GanFamily::wgan;
  const ConditionalGan a(gp, 21), b(w, 21);
  Rng data(3);
  for (int k = 0; k < 5; ++k) {
    const ConditionedBatch real{uniform_matrix(16, 1, data), uniform_matrix(16, 2, data)};
    const Matrix fake = uniform_matrix(16, 2, data);
    Rng ra(1), rb(1);
    EXPECT_EQ(a.critic_loss(real, fake, ra), b.critic_loss(real, fake, rb));
    Rng ga(1), gb(1);
    EXPECT_EQ(a.critic_gradient(real, fake, ga), b.critic_gradient(real, fake, gb));
  }
}

TEST(GradientPenalty, PointMassEstimateConverges) {
  GanConfig c = small_gan(GanFamily::wgangp, 0, 1, 1);
  c.critic_hidden = {64, 64};
  c.init_stddev = 0.1;
  ConditionalGan gan(c, 13);
  Rng rng(14);
  const ConditionedBatch real{Matrix(64, 0), Matrix(64, 1, 0.65)};
  const Matrix fake(64, 1, 0.35);
  GanStepStats s;
  for (int k = 0; k < 3000; ++k) s = gan.critic_step(real, fake, rng);
  EXPECT_NEAR(s.critic_estimate, 0.3, 0.05);
}

TEST(Regressor, ZeroLossLeavesParameters) {
  RegressorConfig c;
  c.input_dim = 3;
  c.output_dim = 2;
  c.hidden = {8};
  MlpRegressor model(c, 1);
  Rng rng(2);
  const Matrix x = uniform_matrix(10, 3, rng);
  const Matrix y = model.predict(x);
  const auto before = model.network().parameters();
  EXPECT_EQ(model.train_step(x, y, rng), 0.0);
  EXPECT_EQ(model.network().parameters(), before);
}

TEST(Regressor, L1Definition) {
  RegressorConfig c;
  c.hidden = {4};
  MlpRegressor model(c, 1);
  auto& p = model.network().parameters();
  for (auto& t : p.tensors) t.data.assign(t.size(), 0.0);
  p[p.size() - 1].data = {0.2};
  EXPECT_NEAR(model.l1_loss(Matrix(1, 1, 0.3), Matrix(1, 1, 0.9)), 0.7, 1e-15);
}

TEST(Regressor, FitsLinearFunction) {
  RegressorConfig c;
  c.hidden = {64, 64};
  MlpRegressor model(c, 3);
  Rng rng(4);
  for (int step = 0; step < 5000; ++step) {
    const Matrix x = uniform_matrix(64, 1, rng);
    Matrix y = x;
    for (double& v : y.data) v = 0.5 * v + 0.1;
    model.train_step(x, y, rng);
  }
  Matrix x(101, 1), y(101, 1);
  for (std::size_t i = 0; i <= 100; ++i) {
    x.data[i] = i / 100.0;
    y.data[i] = 0.5 * x.data[i] + 0.1;
  }
  EXPECT_LT(model.l1_loss(x, y), 0.01);
}

TEST(Regressor, DropoutOnlyInTraining) {
  RegressorConfig c;
  c.input_dim = 2;
  c.hidden = {64, 64};
  c.dropout = 0.25;
  MlpRegressor model(c, 3);
  Rng rng(1);
  const Matrix x = uniform_matrix(5, 2, rng);
  EXPECT_EQ(model.predict(x), model.predict(x));
}
