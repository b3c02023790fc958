#include "gairl/nn/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace gairl::nn::kernels {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelThreshold = 1u << 16;

constexpr std::size_t kTileRows = 4;
constexpr std::size_t kTileCols = 16;

// c = a * b with b row-major (k x n). Tiles of 4 x 16 outputs are kept in
// registers while the shared dimension is swept once.
void gemm_tiled(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                std::size_t n) {
  const std::size_t row_blocks = (m + kTileRows - 1) / kTileRows;
  const std::size_t col_blocks = (n + kTileCols - 1) / kTileCols;
  const long long total_blocks = static_cast<long long>(row_blocks * col_blocks);

#pragma omp parallel for schedule(static) if (m * n * k > kParallelThreshold)
  for (long long blk = 0; blk < total_blocks; ++blk) {
    const std::size_t jb = static_cast<std::size_t>(blk) / row_blocks;
    const std::size_t ib = static_cast<std::size_t>(blk) % row_blocks;
    const std::size_t i0 = ib * kTileRows;
    const std::size_t j0 = jb * kTileCols;
    const std::size_t rows = std::min(kTileRows, m - i0);
    const std::size_t cols = std::min(kTileCols, n - j0);

    if (rows == kTileRows && cols == kTileCols) {
      double acc[kTileRows][kTileCols] = {};
      const double* a0 = a + (i0 + 0) * k;
      const double* a1 = a + (i0 + 1) * k;
      const double* a2 = a + (i0 + 2) * k;
      const double* a3 = a + (i0 + 3) * k;
      for (std::size_t p = 0; p < k; ++p) {
        const double* brow = b + p * n + j0;
        const double s0 = a0[p], s1 = a1[p], s2 = a2[p], s3 = a3[p];
#pragma omp simd
        for (std::size_t j = 0; j < kTileCols; ++j) {
          const double bv = brow[j];
          acc[0][j] += s0 * bv;
          acc[1][j] += s1 * bv;
          acc[2][j] += s2 * bv;
          acc[3][j] += s3 * bv;
        }
      }
      for (std::size_t r = 0; r < kTileRows; ++r)
        std::copy_n(acc[r], kTileCols, c + (i0 + r) * n + j0);
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        double acc[kTileCols] = {};
        const double* arow = a + (i0 + r) * k;
        for (std::size_t p = 0; p < k; ++p) {
          const double s = arow[p];
          const double* brow = b + p * n + j0;
          for (std::size_t j = 0; j < cols; ++j) acc[j] += s * brow[j];
        }
        std::copy_n(acc, cols, c + (i0 + r) * n + j0);
      }
    }
  }
}

}  // namespace

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t.data[j * a.rows + i] = a.data[i * a.cols + j];
  return t;
}

namespace serial {

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.cols == b.cols, "matmul_nt: inner dimension mismatch");
  c.reshape_zero(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols; ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
}

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.cols == b.rows, "matmul_nn: inner dimension mismatch");
  c.reshape_zero(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols; ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.rows == b.rows, "matmul_tn: inner dimension mismatch");
  c.reshape_zero(a.cols, b.cols);
  for (std::size_t i = 0; i < a.cols; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.rows; ++p) s += a(p, i) * b(p, j);
      c(i, j) = s;
    }
}

}  // namespace serial

namespace parallel {

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.cols == b.cols, "matmul_nt: inner dimension mismatch");
  c.reshape_zero(a.rows, b.rows);
  if (c.size() == 0) return;
  if (a.rows < kTileRows) {
    // a handful of rows: transposing b would cost as much as the product
    const std::size_t k = a.cols;
    for (std::size_t i = 0; i < a.rows; ++i) {
      const double* arow = a.data.data() + i * k;
#pragma omp parallel for schedule(static) if (b.rows * k > kParallelThreshold)
      for (std::size_t j = 0; j < b.rows; ++j) {
        const double* brow = b.data.data() + j * k;
        double s = 0.0;
#pragma omp simd reduction(+ : s)
        for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
        c.data[i * b.rows + j] = s;
      }
    }
    return;
  }
  const Matrix bt = transpose(b);
  gemm_tiled(a.data.data(), bt.data.data(), c.data.data(), a.rows, a.cols, b.rows);
}

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.cols == b.rows, "matmul_nn: inner dimension mismatch");
  c.reshape_zero(a.rows, b.cols);
  if (c.size() == 0) return;
  gemm_tiled(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.rows == b.rows, "matmul_tn: inner dimension mismatch");
  c.reshape_zero(a.cols, b.cols);
  if (c.size() == 0) return;
  const Matrix at = transpose(a);
  gemm_tiled(at.data.data(), b.data.data(), c.data.data(), a.cols, a.rows, b.cols);
}

}  // namespace parallel

}  // namespace gairl::nn::kernels
