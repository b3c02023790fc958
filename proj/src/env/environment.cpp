#include "gairl/env/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gairl::env {

std::string to_string(EnvKind kind) {
  return kind == EnvKind::mountain_car ? "mountain_car" : "acrobot";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "mountain_car") return EnvKind::mountain_car;
  if (name == "acrobot") return EnvKind::acrobot;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::size_t default_max_episode_steps(EnvKind kind) {
  return kind == EnvKind::mountain_car ? 10000 : 500;
}

std::size_t state_size(EnvKind kind) { return kind == EnvKind::mountain_car ? 2 : 6; }

std::size_t action_count(EnvKind kind) { return kind == EnvKind::mountain_car ? 2 : 3; }

const Bounds& state_bounds(EnvKind kind) {
  static const Bounds car{{mountain_car::kMinPosition, -mountain_car::kMaxSpeed},
                          {mountain_car::kMaxPosition, mountain_car::kMaxSpeed}};
  static const Bounds arm{{-1.0, -1.0, -1.0, -1.0, -acrobot::kMaxVel1, -acrobot::kMaxVel2},
                          {1.0, 1.0, 1.0, 1.0, acrobot::kMaxVel1, acrobot::kMaxVel2}};
  return kind == EnvKind::mountain_car ? car : arm;
}

std::vector<double> normalize_state(std::span<const double> raw, EnvKind kind) {
  const auto& b = state_bounds(kind);
  if (raw.size() != b.lower.size())
    throw std::invalid_argument("normalize_state: expected " + std::to_string(b.lower.size()) +
                                " components, got " + std::to_string(raw.size()));
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= b.lower[i] && raw[i] <= b.upper[i]))
      throw std::domain_error("normalize_state: component " + std::to_string(i) + " = " +
                              std::to_string(raw[i]) + " outside its bounds");
    out[i] = (raw[i] - b.lower[i]) / (b.upper[i] - b.lower[i]);
  }
  return out;
}

std::vector<double> denormalize_state(std::span<const double> normalized, EnvKind kind) {
  const auto& b = state_bounds(kind);
  if (normalized.size() != b.lower.size())
    throw std::invalid_argument("denormalize_state: wrong vector length");
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i)
    out[i] = b.lower[i] + normalized[i] * (b.upper[i] - b.lower[i]);
  return out;
}

namespace mountain_car {

std::vector<double> dynamics(std::span<const double> raw, int action) {
  const double force = action == 0 ? -1.0 : 1.0;
  double x = raw[0];
  double v = raw[1] + force * kForce - kGravity * std::cos(3.0 * x);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  x = std::clamp(x + v, kMinPosition, kMaxPosition);
  if (x == kMinPosition && v < 0.0) v = 0.0;
  return {x, v};
}

bool goal_reached(std::span<const double> raw) { return raw[0] >= kGoalPosition; }

}  // namespace mountain_car

namespace acrobot {

namespace {

using State4 = std::array<double, 4>;

constexpr double kLinkMass1 = 1.0;
constexpr double kLinkMass2 = 1.0;
constexpr double kLinkLength1 = 1.0;
constexpr double kLinkCom1 = 0.5;
constexpr double kLinkCom2 = 0.5;
constexpr double kLinkMoi = 1.0;
constexpr double kGravity = 9.8;

State4 derivatives(const State4& s, double torque) {
  const double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  const double lc1 = kLinkCom1, lc2 = kLinkCom2, i1 = kLinkMoi, i2 = kLinkMoi, g = kGravity;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
  const double pi = std::numbers::pi;
  const double d1 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - pi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - pi / 2.0) + phi2;
  const double ddtheta2 =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

State4 axpy(const State4& s, double h, const State4& k) {
  return {s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]};
}

double wrap(double x) {
  const double pi = std::numbers::pi;
  const double two_pi = 2.0 * pi;
  while (x > pi) x -= two_pi;
  while (x < -pi) x += two_pi;
  return x;
}

}  // namespace

std::vector<double> observe(std::span<const double> p) {
  return {std::sin(p[0]), std::cos(p[0]), std::sin(p[1]), std::cos(p[1]), p[2], p[3]};
}

std::vector<double> physical_from_observation(std::span<const double> obs) {
  return {std::atan2(obs[0], obs[1]), std::atan2(obs[2], obs[3]), obs[4], obs[5]};
}

std::vector<double> dynamics(std::span<const double> physical, int action) {
  const double torque = static_cast<double>(action) - 1.0;
  const State4 s{physical[0], physical[1], physical[2], physical[3]};
  const double h = kDt;
  const State4 k1 = derivatives(s, torque);
  const State4 k2 = derivatives(axpy(s, h / 2, k1), torque);
  const State4 k3 = derivatives(axpy(s, h / 2, k2), torque);
  const State4 k4 = derivatives(axpy(s, h, k3), torque);
  State4 n;
  for (int i = 0; i < 4; ++i) n[i] = s[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return {wrap(n[0]), wrap(n[1]), std::clamp(n[2], -kMaxVel1, kMaxVel1),
          std::clamp(n[3], -kMaxVel2, kMaxVel2)};
}

bool goal_reached(std::span<const double> p) {
  return -std::cos(p[0]) - std::cos(p[1] + p[0]) > 1.0;
}

}  // namespace acrobot

ClassicControl::ClassicControl(EnvConfig config) : config_(config) {
  if (config_.max_episode_steps < 1)
    throw std::invalid_argument("max_episode_steps must be >= 1");
}

EnvState ClassicControl::make_state(std::vector<double> raw) const {
  EnvState s;
  s.normalized = normalize_state(raw, config_.kind);
  s.raw = std::move(raw);
  return s;
}

EnvState ClassicControl::reset(Rng& rng) {
  if (config_.kind == EnvKind::mountain_car) {
    std::uniform_real_distribution<double> pos(-0.6, -0.4);
    return make_state({pos(rng), 0.0});
  }
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<double> physical(4);
  for (double& v : physical) v = u(rng);
  return make_state(acrobot::observe(physical));
}

StepResult ClassicControl::step(const EnvState& state, int action) {
  if (action < 0 || static_cast<std::size_t>(action) >= action_count())
    throw std::invalid_argument("invalid action index " + std::to_string(action) + " for " +
                                to_string(config_.kind));
  if (state.raw.size() != state_size())
    throw std::invalid_argument("step: state has the wrong dimension");
  std::vector<double> raw;
  bool goal = false;
  if (config_.kind == EnvKind::mountain_car) {
    raw = mountain_car::dynamics(state.raw, action);
    goal = mountain_car::goal_reached(raw);
  } else {
    const auto next = acrobot::dynamics(acrobot::physical_from_observation(state.raw), action);
    goal = acrobot::goal_reached(next);
    raw = acrobot::observe(next);
  }
  StepResult r;
  r.next_state = make_state(std::move(raw));
  r.next_state.elapsed_steps = state.elapsed_steps + 1;
  r.terminal = goal;
  r.reward_raw = goal ? 0.0 : -1.0;
  r.reward_normalized = r.reward_raw + 1.0;
  r.truncated = !goal && r.next_state.elapsed_steps >= config_.max_episode_steps;
  return r;
}

}  // namespace gairl::env
