#include "gairl/rainbow/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gairl::rainbow {

void Support::validate() const {
  if (atoms < 2) throw std::invalid_argument("support needs at least 2 atoms");
  if (!(v_min < v_max) || !std::isfinite(v_min) || !std::isfinite(v_max))
    throw std::invalid_argument("support requires finite v_min < v_max");
}

std::vector<double> Support::values() const {
  std::vector<double> z(atoms);
  for (std::size_t i = 0; i < atoms; ++i) z[i] = atom(i);
  return z;
}

std::vector<double> project_distribution(std::span<const double> probs, std::span<const double> shifted_atoms,
                                         const Support& support) {
  if (probs.size() != shifted_atoms.size()) throw std::invalid_argument("project_distribution: size mismatch");
  const double dz = support.delta();
  const double last = static_cast<double>(support.atoms - 1);
  std::vector<double> out(support.atoms, 0.0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double tz = std::clamp(shifted_atoms[j], support.v_min, support.v_max);
    const double b = std::clamp((tz - support.v_min) / dz, 0.0, last);
    const double lo = std::floor(b);
    const auto l = static_cast<std::size_t>(lo);
    if (b == lo) {
      out[l] += probs[j];
    } else {
      out[l] += probs[j] * (lo + 1.0 - b);
      out[l + 1] += probs[j] * (b - lo);
    }
  }
  return out;
}

double expected_value(std::span<const double> probs, const Support& support) {
  double e = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) e += support.atom(i) * probs[i];
  return e;
}

}  // namespace gairl::rainbow
