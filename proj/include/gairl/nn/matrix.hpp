#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gairl::nn {

/// Dense row-major matrix of doubles. Vectors are stored as n x 1.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  void reshape_zero(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.assign(r * c, 0.0);
  }

  static Matrix from_row(std::span<const double> values) {
    Matrix m(1, values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m.data[i] = values[i];
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// An ordered list of tensors. Network parameters, their gradients and the
/// optimizer moment accumulators all share this layout.
struct TensorList {
  std::vector<Matrix> tensors;

  std::size_t size() const { return tensors.size(); }
  Matrix& operator[](std::size_t i) { return tensors[i]; }
  const Matrix& operator[](std::size_t i) const { return tensors[i]; }

  bool same_layout(const TensorList& o) const;
  TensorList zeros_like() const;
  double squared_norm() const;
  bool all_finite() const;
  std::size_t element_count() const;

  friend bool operator==(const TensorList&, const TensorList&) = default;
};

using NetworkParameters = TensorList;
using GradientSet = TensorList;

}  // namespace gairl::nn
