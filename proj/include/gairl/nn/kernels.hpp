#pragma once

#include "gairl/nn/matrix.hpp"

// Dense products used by every forward and backward pass. Two
// implementations are kept side by side: `serial` is the plain triple loop
// used as the reference in tests, `parallel` is the register-tiled OpenMP
// version the library actually runs. Each output element of `parallel` is
// accumulated by one thread in a fixed order, so results do not depend on
// the thread count.
namespace gairl::nn::kernels {

namespace serial {
/// c = a * b^T  (a: m x k, b: n x k, c: m x n)
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
/// c = a * b    (a: m x k, b: k x n)
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c);
/// c = a^T * b  (a: k x m, b: k x n)
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
}  // namespace serial

namespace parallel {
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
}  // namespace parallel

using parallel::matmul_nn;
using parallel::matmul_nt;
using parallel::matmul_tn;

Matrix transpose(const Matrix& a);

}  // namespace gairl::nn::kernels
