#pragma once

#include <cstdint>

namespace lae2::kernels {

// Dense row-major kernels behind the predictor's training loop. Each kernel
// exists twice: a serial reference and an OpenMP variant parallelized over
// independent output elements only, so both produce bit-identical results for
// any thread count. The serial forms stay as the comparison baseline for the
// tests and the benchmark target.

// y = A x + b, A is rows x cols. b may be null.
void matvec_serial(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
                   std::int32_t cols);
void matvec_omp(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
                std::int32_t cols);

// y += A^T x, A is rows x cols, x has rows entries, y has cols entries.
void matvec_transpose_acc_serial(const double* a, const double* x, double* y, std::int32_t rows,
                                 std::int32_t cols);
void matvec_transpose_acc_omp(const double* a, const double* x, double* y, std::int32_t rows,
                              std::int32_t cols);

// A += x y^T, A is rows x cols.
void outer_acc_serial(double* a, const double* x, const double* y, std::int32_t rows,
                      std::int32_t cols);
void outer_acc_omp(double* a, const double* x, const double* y, std::int32_t rows, std::int32_t cols);

// Dispatchers.
void matvec(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
            std::int32_t cols, bool parallel);
void matvec_transpose_acc(const double* a, const double* x, double* y, std::int32_t rows,
                          std::int32_t cols, bool parallel);
void outer_acc(double* a, const double* x, const double* y, std::int32_t rows, std::int32_t cols,
               bool parallel);

// In-place numerically stable softmax. Serial: the reduction order is part of
// the reproducibility contract.
void softmax_inplace(double* x, std::int64_t n);

}  // namespace lae2::kernels
