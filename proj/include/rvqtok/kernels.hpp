#pragma once

#include <cstdint>
#include <vector>

#include "rvqtok/matrix.hpp"

namespace rvqtok {

// Worker thread cap: min(hardware, RVQTOK_THREADS). Read once per process.
int worker_threads();

// Hot inner loops, parallelized with OpenMP over independent output rows.
// Each output element is computed by a fixed serial chain, so results are
// bit-identical for any thread count. kernels::serial holds the plain
// reference implementations used by tests and the benchmark.
namespace kernels {

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a^T * b
Matrix matmul_ta(const Matrix& a, const Matrix& b);
// c = a * b^T
Matrix matmul_tb(const Matrix& a, const Matrix& b);

// Nearest codebook row per frame under squared Euclidean distance.
// Ties break to the lowest index.
std::vector<int> nearest_rows(const Matrix& codebook, const Matrix& frames);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<int> nearest_rows(const Matrix& codebook, const Matrix& frames);
}  // namespace serial

}  // namespace kernels
}  // namespace rvqtok
