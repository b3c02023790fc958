#pragma once

#include <cstdint>
#include <vector>

namespace gairl::memory {

/// One experience tuple in normalized coordinates.
struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  /// Number of environment steps folded into this tuple (n-step returns);
  /// 1 for raw transitions.
  std::uint32_t horizon = 1;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Throws std::invalid_argument unless the tuple is a raw environment
/// transition: components in [0,1], reward in {0,1}, terminal => reward 1.
void validate_environment_transition(const Transition& t);

}  // namespace gairl::memory
