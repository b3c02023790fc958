#include <gtest/gtest.h>
#include <omp.h>

#include "gairl/nn/kernels.hpp"
#include "test_helpers.hpp"

using gairl::nn::Matrix;
namespace kernels = gairl::nn::kernels;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  EXPECT_TRUE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST(Kernels, ParallelMatchesSerialOnRandomShapes) {
  gairl::Rng rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 70);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
    const Matrix a = gairl::testing::random_matrix(m, k, rng);
    const Matrix bt = gairl::testing::random_matrix(n, k, rng);
    const Matrix b = gairl::testing::random_matrix(k, n, rng);
    const Matrix at = gairl::testing::random_matrix(k, m, rng);
    Matrix ref, got;
    kernels::serial::matmul_nt(a, bt, ref);
    kernels::parallel::matmul_nt(a, bt, got);
    EXPECT_LT(max_abs_diff(ref, got), 1e-12 * k) << m << "x" << k << "x" << n;
    kernels::serial::matmul_nn(a, b, ref);
    kernels::parallel::matmul_nn(a, b, got);
    EXPECT_LT(max_abs_diff(ref, got), 1e-12 * k);
    kernels::serial::matmul_tn(at, b, ref);
    kernels::parallel::matmul_tn(at, b, got);
    EXPECT_LT(max_abs_diff(ref, got), 1e-12 * k);
  }
}

TEST(Kernels, ResultIndependentOfThreadCount) {
  gairl::Rng rng(5);
  const Matrix a = gairl::testing::random_matrix(67, 129, rng);
  const Matrix b = gairl::testing::random_matrix(129, 93, rng);
  Matrix one, many;
  omp_set_num_threads(1);
  kernels::parallel::matmul_nn(a, b, one);
  omp_set_num_threads(4);
  kernels::parallel::matmul_nn(a, b, many);
  omp_set_num_threads(omp_get_num_procs());
  EXPECT_EQ(one.data, many.data);
}

TEST(Kernels, RejectsMismatchedShapes) {
  Matrix a(2, 3), b(4, 2), c;
  EXPECT_THROW(kernels::parallel::matmul_nt(a, b, c), std::invalid_argument);
  EXPECT_THROW(kernels::serial::matmul_nn(a, b, c), std::invalid_argument);
}
