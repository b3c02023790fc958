#include <benchmark/benchmark.h>

#include "gairl/nn/kernels.hpp"
#include "gairl/rng.hpp"

using gairl::nn::Matrix;
namespace kernels = gairl::nn::kernels;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  gairl::Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data) v = n(rng);
  return m;
}

// Shapes: forward of a 512-wide layer on a 256-sample batch, and the two
// products of its backward pass.
template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_nt(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  const Matrix x = random_matrix(batch, width, 1);
  const Matrix w = random_matrix(width, width, 2);
  Matrix y;
  for (auto _ : state) {
    Kernel(x, w, y);
    benchmark::DoNotOptimize(y.data.data());
  }
  state.counters["GFLOPS"] = benchmark::Counter(2.0 * batch * width * width,
                                                benchmark::Counter::kIsIterationInvariantRate,
                                                benchmark::Counter::kIs1000);
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_nn(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  const Matrix dy = random_matrix(batch, width, 3);
  const Matrix w = random_matrix(width, width, 4);
  Matrix dx;
  for (auto _ : state) {
    Kernel(dy, w, dx);
    benchmark::DoNotOptimize(dx.data.data());
  }
  state.counters["GFLOPS"] = benchmark::Counter(2.0 * batch * width * width,
                                                benchmark::Counter::kIsIterationInvariantRate,
                                                benchmark::Counter::kIs1000);
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_tn(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  const Matrix dy = random_matrix(batch, width, 5);
  const Matrix x = random_matrix(batch, width, 6);
  Matrix dw;
  for (auto _ : state) {
    Kernel(dy, x, dw);
    benchmark::DoNotOptimize(dw.data.data());
  }
  state.counters["GFLOPS"] = benchmark::Counter(2.0 * batch * width * width,
                                                benchmark::Counter::kIsIterationInvariantRate,
                                                benchmark::Counter::kIs1000);
}

}  // namespace

#define SHAPES Args({1, 512})->Args({256, 24})->Args({256, 512})

BENCHMARK(BM_nt<kernels::serial::matmul_nt>)->SHAPES;
BENCHMARK(BM_nt<kernels::parallel::matmul_nt>)->SHAPES;
BENCHMARK(BM_nn<kernels::serial::matmul_nn>)->SHAPES;
BENCHMARK(BM_nn<kernels::parallel::matmul_nn>)->SHAPES;
BENCHMARK(BM_tn<kernels::serial::matmul_tn>)->SHAPES;
BENCHMARK(BM_tn<kernels::parallel::matmul_tn>)->SHAPES;

BENCHMARK_MAIN();
