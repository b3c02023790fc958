#include "gairl/memory/sum_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gairl::memory {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), leaves_(1) {
  if (capacity == 0) throw std::invalid_argument("sum tree capacity must be positive");
  while (leaves_ < capacity) leaves_ <<= 1;
  nodes_.assign(2 * leaves_, 0.0);
}

void SumTree::set(std::size_t index, double value) {
  if (index >= capacity_) throw std::out_of_range("sum tree index out of range");
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("sum tree value must be finite and >= 0");
  std::size_t node = leaves_ + index;
  nodes_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t SumTree::find_prefix(double mass) const {
  mass = std::max(mass, 0.0);
  std::size_t node = 1;
  while (node < leaves_) {
    const std::size_t left = 2 * node;
    const double left_sum = nodes_[left];
    const double right_sum = nodes_[left + 1];
    if (mass < left_sum || right_sum <= 0.0) {
      node = left;
    } else {
      mass -= left_sum;
      node = left + 1;
    }
  }
  return std::min(node - leaves_, capacity_ - 1);
}

}  // namespace gairl::memory
