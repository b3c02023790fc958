#pragma once

#include <cstddef>
#include <vector>

namespace gairl::memory {

/// Binary tree of partial sums over a fixed number of non-negative leaves.
/// Parents are recomputed from their children on every write, so the root
/// is always exactly the tree-ordered sum of the leaves.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  void set(std::size_t index, double value);
  double get(std::size_t index) const { return nodes_[leaves_ + index]; }
  double total() const { return nodes_[1]; }
  std::size_t capacity() const { return capacity_; }

  /// Index i such that sum(leaves[0..i)) <= mass < sum(leaves[0..i]).
  /// Zero-valued subtrees are never entered, so with total() > 0 the
  /// result always has a positive leaf.
  std::size_t find_prefix(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t leaves_;
  std::vector<double> nodes_;
};

}  // namespace gairl::memory
