#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gairl::rainbow {

/// Evenly spaced return atoms z_0 = v_min, ..., z_{n-1} = v_max.
struct Support {
  double v_min = 0.0;
  double v_max = 1.0;
  std::size_t atoms = 51;

  void validate() const;
  double delta() const { return (v_max - v_min) / static_cast<double>(atoms - 1); }
  double atom(std::size_t i) const { return v_min + static_cast<double>(i) * delta(); }
  std::vector<double> values() const;
};

/// Distributes probs[j] at location shifted_atoms[j] (clamped into the
/// support) linearly over the two neighbouring support atoms.
std::vector<double> project_distribution(std::span<const double> probs, std::span<const double> shifted_atoms,
                                         const Support& support);

/// sum_i z_i p_i
double expected_value(std::span<const double> probs, const Support& support);

}  // namespace gairl::rainbow
