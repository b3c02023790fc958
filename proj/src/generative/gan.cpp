#include "gairl/generative/gan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gairl/nn/input_gradient.hpp"

namespace gairl::generative {

using nn::Matrix;

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kTiny = 1e-300;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double column_mean(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v;
  return s / static_cast<double>(m.rows);
}

std::vector<std::size_t> layers(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

std::string to_string(GanFamily f) {
  switch (f) {
    case GanFamily::gan: return "gan";
    case GanFamily::wgan: return "wgan";
    case GanFamily::wgangp: return "wgangp";
  }
  return "wgangp";
}

GanFamily gan_family_from_string(const std::string& name) {
  if (name == "gan") return GanFamily::gan;
  if (name == "wgan") return GanFamily::wgan;
  if (name == "wgangp") return GanFamily::wgangp;
  throw std::invalid_argument("unknown gan family '" + name + "'");
}

GanConfig GanConfig::defaults(GanFamily family) {
  GanConfig c;
  c.family = family;
  if (family != GanFamily::wgangp) {
    c.critic_steps = family == GanFamily::gan ? 1 : 5;
    c.penalty_coefficient = 0.0;
    c.generator_optimizer = {2e-4, 0.9, 0.999, 1e-8};
    c.critic_optimizer = {2e-4, 0.9, 0.999, 1e-8};
  }
  return c;
}

void GanConfig::validate() const {
  if (payload_dim == 0) throw std::invalid_argument("gan payload_dim must be positive");
  if (noise_dim + condition_dim == 0) throw std::invalid_argument("gan generator needs noise or a condition");
  if (critic_steps == 0) throw std::invalid_argument("gan critic steps (k) must be >= 1");
  if (!(penalty_coefficient >= 0.0)) throw std::invalid_argument("gan penalty coefficient must be >= 0");
  if (family == GanFamily::wgan && !(clip_value > 0.0)) throw std::invalid_argument("wgan clip value must be > 0");
  nn::validate(generator_optimizer);
  nn::validate(critic_optimizer);
  generator_spec().validate();
  critic_spec().validate();
}

nn::NetworkSpec GanConfig::generator_spec() const {
  nn::NetworkSpec s;
  s.layer_sizes = layers(noise_dim + condition_dim, generator_hidden, payload_dim);
  s.leaky_alpha = leaky_alpha;
  s.output_activation = nn::OutputActivation::tanh;
  s.init_stddev = init_stddev;
  return s;
}

nn::NetworkSpec GanConfig::critic_spec() const {
  nn::NetworkSpec s;
  s.layer_sizes = layers(condition_dim + payload_dim, critic_hidden, 1);
  s.leaky_alpha = leaky_alpha;
  s.output_activation = family == GanFamily::gan ? nn::OutputActivation::sigmoid : nn::OutputActivation::linear;
  s.init_stddev = init_stddev;
  return s;
}

Matrix concat_columns(const Matrix& a, const Matrix& b) {
  if (a.cols == 0) return b;
  if (b.cols == 0) return a;
  if (a.rows != b.rows) throw std::invalid_argument("concat_columns: row counts differ");
  Matrix out(a.rows, a.cols + b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(a.cols));
  }
  return out;
}

ConditionalGan::ConditionalGan(GanConfig config, std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      generator_(config_.generator_spec(), derive_seed(seed, "generator-init")),
      critic_(config_.critic_spec(), derive_seed(seed, "critic-init")),
      generator_opt_(config_.generator_optimizer, generator_.parameters()),
      critic_opt_(config_.critic_optimizer, critic_.parameters()) {}

Matrix ConditionalGan::generator_input(const Matrix& noise, const Matrix& condition) const {
  if (noise.cols != config_.noise_dim) throw std::invalid_argument("generator: noise width mismatch");
  if (condition.cols != config_.condition_dim) throw std::invalid_argument("generator: condition width mismatch");
  if (config_.noise_dim == 0) return condition;
  if (config_.condition_dim == 0) return noise;
  return concat_columns(noise, condition);
}

Matrix ConditionalGan::noise_rows(std::size_t rows, Rng& rng) const {
  Matrix z(rows, config_.noise_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : z.data) v = normal(rng);
  return z;
}

Matrix ConditionalGan::generate(const Matrix& noise, const Matrix& condition) const {
  Matrix out = generator_.forward(generator_input(noise, condition), nn::Mode::eval);
  for (double& v : out.data) v = 0.5 * (v + 1.0);
  return out;
}

Matrix ConditionalGan::generate(const Matrix& condition, Rng& rng) const {
  return generate(noise_rows(condition.rows, rng), condition);
}

Matrix ConditionalGan::critic_output(const Matrix& condition, const Matrix& payload) const {
  return critic_.forward(concat_columns(condition, payload), nn::Mode::eval);
}

namespace {

struct PenaltyPass {
  Matrix input;
  nn::ForwardCache cache;
  nn::InputGradientTrace trace;
  std::vector<double> norms;
  double value = 0.0;
};

}  // namespace

static PenaltyPass penalty_pass(const ConditionalGan& gan, const ConditionedBatch& real, const Matrix& fake,
                                Rng& rng) {
  const GanConfig& c = gan.config();
  if (!fake.same_shape(real.payload)) throw std::invalid_argument("gradient penalty: batch shapes differ");
  PenaltyPass p;
  Matrix mixed(fake.rows, fake.cols);
  for (std::size_t r = 0; r < fake.rows; ++r) {
    const double u = uniform01(rng);
    for (std::size_t j = 0; j < fake.cols; ++j) mixed(r, j) = u * real.payload(r, j) + (1.0 - u) * fake(r, j);
  }
  p.input = concat_columns(real.condition, mixed);
  gan.critic().forward(p.input, nn::Mode::eval, nullptr, &p.cache);
  p.trace = nn::input_gradient(gan.critic().spec(), gan.critic().parameters(), p.cache);
  p.norms.resize(fake.rows);
  for (std::size_t r = 0; r < fake.rows; ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < c.payload_dim; ++j) {
      const double g = p.trace.input_gradient(r, c.condition_dim + j);
      sq += g * g;
    }
    p.norms[r] = std::sqrt(sq);
    p.value += (p.norms[r] - 1.0) * (p.norms[r] - 1.0);
  }
  p.value /= static_cast<double>(fake.rows);
  return p;
}

double ConditionalGan::gradient_penalty(const ConditionedBatch& real, const Matrix& fake_payload, Rng& rng) const {
  return penalty_pass(*this, real, fake_payload, rng).value;
}

nn::GradientSet ConditionalGan::critic_gradient(const ConditionedBatch& real, const Matrix& fake_payload, Rng& rng,
                                                GanStepStats* stats) const {
  if (real.payload.cols != config_.payload_dim || !fake_payload.same_shape(real.payload))
    throw std::invalid_argument("critic: payload shape mismatch");
  const double b = static_cast<double>(real.size());
  nn::ForwardCache real_cache, fake_cache;
  const Matrix d_real = critic_.forward(concat_columns(real.condition, real.payload), nn::Mode::eval, nullptr, &real_cache);
  const Matrix d_fake = critic_.forward(concat_columns(real.condition, fake_payload), nn::Mode::eval, nullptr, &fake_cache);

  GanStepStats s;
  s.critic_estimate = column_mean(d_real) - column_mean(d_fake);
  Matrix g_real(d_real.rows, 1), g_fake(d_fake.rows, 1);
  if (config_.family == GanFamily::gan) {
    for (std::size_t r = 0; r < d_real.rows; ++r) {
      const double pr = d_real.data[r];
      const double pf = d_fake.data[r];
      s.critic_loss -= (std::log(clamp_prob(pr)) + std::log(1.0 - clamp_prob(pf))) / b;
      // unclamped so the sigmoid derivative cancels exactly in backward
      g_real.data[r] = -1.0 / (b * std::max(pr, kTiny));
      g_fake.data[r] = 1.0 / (b * std::max(1.0 - pf, kTiny));
    }
  } else {
    s.critic_loss = -s.critic_estimate;
    std::fill(g_real.data.begin(), g_real.data.end(), -1.0 / b);
    std::fill(g_fake.data.begin(), g_fake.data.end(), 1.0 / b);
  }
  nn::GradientSet grads = critic_.backward(real_cache, g_real);
  nn::axpy(grads, 1.0, critic_.backward(fake_cache, g_fake));

  if (config_.family == GanFamily::wgangp) {
    PenaltyPass p = penalty_pass(*this, real, fake_payload, rng);
    s.penalty = p.value;
    s.critic_loss += config_.penalty_coefficient * p.value;
    Matrix v(p.trace.input_gradient.rows, p.trace.input_gradient.cols);
    for (std::size_t r = 0; r < v.rows; ++r) {
      if (p.norms[r] == 0.0) continue;
      const double scale = 2.0 * (p.norms[r] - 1.0) / (b * p.norms[r]);
      for (std::size_t j = 0; j < config_.payload_dim; ++j) {
        const std::size_t col = config_.condition_dim + j;
        v(r, col) = scale * p.trace.input_gradient(r, col);
      }
    }
    nn::axpy(grads, config_.penalty_coefficient,
             nn::input_gradient_vjp(critic_.spec(), critic_.parameters(), p.cache, p.trace, v));
  }
  if (stats) *stats = s;
  return grads;
}

double ConditionalGan::critic_loss(const ConditionedBatch& real, const Matrix& fake_payload, Rng& rng,
                                   double* penalty, double* estimate) const {
  GanStepStats s;
  critic_gradient(real, fake_payload, rng, &s);
  if (penalty) *penalty = s.penalty;
  if (estimate) *estimate = s.critic_estimate;
  return s.critic_loss;
}

GanStepStats ConditionalGan::critic_step(const ConditionedBatch& real, const Matrix& fake_payload, Rng& rng) {
  GanStepStats s;
  nn::GradientSet grads = critic_gradient(real, fake_payload, rng, &s);
  critic_opt_.step(critic_.parameters(), grads);
  if (config_.family == GanFamily::wgan) nn::clamp_parameters(critic_.parameters(), config_.clip_value);
  return s;
}

double ConditionalGan::generator_step(const Matrix& condition, Rng& rng) {
  double loss = 0.0;
  const nn::GradientSet grads = generator_gradient(condition, rng, &loss);
  generator_opt_.step(generator_.parameters(), grads);
  return loss;
}

nn::GradientSet ConditionalGan::generator_gradient(const Matrix& condition, Rng& rng, double* loss_out) const {
  const Matrix noise = noise_rows(condition.rows, rng);
  nn::ForwardCache gen_cache, critic_cache;
  const Matrix t = generator_.forward(generator_input(noise, condition), nn::Mode::train, &rng, &gen_cache);
  Matrix fake = t;
  for (double& v : fake.data) v = 0.5 * (v + 1.0);
  const Matrix d = critic_.forward(concat_columns(condition, fake), nn::Mode::eval, nullptr, &critic_cache);

  const double b = static_cast<double>(condition.rows);
  double loss = 0.0;
  Matrix g(d.rows, 1);
  for (std::size_t r = 0; r < d.rows; ++r) {
    if (config_.family == GanFamily::gan) {
      loss -= std::log(clamp_prob(d.data[r])) / b;
      g.data[r] = -1.0 / (b * std::max(d.data[r], kTiny));
    } else {
      loss -= d.data[r] / b;
      g.data[r] = -1.0 / b;
    }
  }
  Matrix d_input;
  critic_.backward(critic_cache, g, &d_input);
  Matrix d_t(t.rows, t.cols);
  for (std::size_t r = 0; r < t.rows; ++r)
    for (std::size_t j = 0; j < t.cols; ++j) d_t(r, j) = 0.5 * d_input(r, config_.condition_dim + j);
  if (loss_out) *loss_out = loss;
  return generator_.backward(gen_cache, d_t);
}

GanStepStats ConditionalGan::train_step(const BatchSource& source, Rng& rng) {
  GanStepStats s;
  for (std::size_t k = 0; k < config_.critic_steps; ++k) {
    const ConditionedBatch real = source(rng);
    const Matrix fake = generate(real.condition, rng);
    s = critic_step(real, fake, rng);
  }
  s.generator_loss = generator_step(source(rng).condition, rng);
  return s;
}

GanStepStats ConditionalGan::train_step(const ConditionedBatch& batch, Rng& rng) {
  return train_step([&batch](Rng&) { return batch; }, rng);
}

}  // namespace gairl::generative
