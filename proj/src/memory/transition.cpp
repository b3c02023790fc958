#include "gairl/memory/transition.hpp"

#include <stdexcept>
#include <string>

namespace gairl::memory {

namespace {

void check_unit(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument(std::string("transition ") + what + " component outside [0,1]");
    }
  }
}

}  // namespace

void validate_environment_transition(const Transition& t) {
  if (t.state.empty() || t.state.size() != t.next_state.size()) {
    throw std::invalid_argument("transition state sizes differ or are empty");
  }
  check_unit(t.state, "state");
  check_unit(t.next_state, "next_state");
  if (t.reward != 0.0 && t.reward != 1.0) throw std::invalid_argument("transition reward not in {0,1}");
  if (t.terminal && t.reward != 1.0) throw std::invalid_argument("terminal transition without reward 1");
  if (t.action < 0) throw std::invalid_argument("negative action");
}

}  // namespace gairl::memory
