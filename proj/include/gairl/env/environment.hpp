#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gairl/rng.hpp"

namespace gairl::env {

enum class EnvKind { mountain_car, acrobot };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct EnvState {
  std::vector<double> raw;         // environment units
  std::vector<double> normalized;  // [0,1]^d
  std::size_t elapsed_steps = 0;   // steps taken in the current episode

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepResult {
  EnvState next_state;
  double reward_raw = -1.0;
  double reward_normalized = 0.0;  // reward_raw + 1, so 1 exactly on the goal transition
  bool terminal = false;
  bool truncated = false;

  friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct EnvConfig {
  EnvKind kind = EnvKind::mountain_car;
  std::size_t max_episode_steps = 10000;
  std::uint64_t seed = 0;
};

std::size_t default_max_episode_steps(EnvKind kind);
std::size_t state_size(EnvKind kind);
std::size_t action_count(EnvKind kind);

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
};
const Bounds& state_bounds(EnvKind kind);

/// Componentwise affine map onto [0,1]. Throws std::domain_error when a
/// component lies outside the fixed bounds.
std::vector<double> normalize_state(std::span<const double> raw, EnvKind kind);
std::vector<double> denormalize_state(std::span<const double> normalized, EnvKind kind);

/// Episodic step interface shared by the simulators and the learned
/// imagination, so an agent cannot tell the two apart.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t state_size() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual EnvState reset(Rng& rng) = 0;
  virtual StepResult step(const EnvState& state, int action) = 0;
};

/// Deterministic MountainCar / Acrobot simulator.
class ClassicControl final : public Environment {
 public:
  explicit ClassicControl(EnvConfig config);

  std::size_t state_size() const override { return env::state_size(config_.kind); }
  std::size_t action_count() const override { return env::action_count(config_.kind); }
  EnvState reset(Rng& rng) override;
  StepResult step(const EnvState& state, int action) override;

  const EnvConfig& config() const { return config_; }

  /// Builds an EnvState from raw coordinates (elapsed_steps = 0).
  EnvState make_state(std::vector<double> raw) const;

 private:
  EnvConfig config_;
};

namespace mountain_car {
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kForce = 0.001;
inline constexpr double kGravity = 0.0025;
/// action index 0 pushes left (-1), index 1 pushes right (+1)
std::vector<double> dynamics(std::span<const double> raw, int action);
bool goal_reached(std::span<const double> raw);
}  // namespace mountain_car

namespace acrobot {
inline constexpr double kDt = 0.2;
inline constexpr double kMaxVel1 = 4.0 * 3.14159265358979323846;
inline constexpr double kMaxVel2 = 9.0 * 3.14159265358979323846;
/// Physical state (theta1, theta2, dtheta1, dtheta2) <-> observation
/// (sin t1, cos t1, sin t2, cos t2, dt1, dt2).
std::vector<double> observe(std::span<const double> physical);
std::vector<double> physical_from_observation(std::span<const double> obs);
/// One RK4 step of dt with torque in {-1, 0, +1} (action index 0, 1, 2).
std::vector<double> dynamics(std::span<const double> physical, int action);
bool goal_reached(std::span<const double> physical);
}  // namespace acrobot

}  // namespace gairl::env
