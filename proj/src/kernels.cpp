#include "lae2/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lae2::kernels {

void matvec_serial(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
                   std::int32_t cols) {
  for (std::int32_t i = 0; i < rows; ++i) {
    const double* row = a + static_cast<std::int64_t>(i) * cols;
    double acc = b ? b[i] : 0.0;
    for (std::int32_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_omp(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
                std::int32_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int32_t i = 0; i < rows; ++i) {
    const double* row = a + static_cast<std::int64_t>(i) * cols;
    double acc = b ? b[i] : 0.0;
    for (std::int32_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_transpose_acc_serial(const double* a, const double* x, double* y, std::int32_t rows,
                                 std::int32_t cols) {
  for (std::int32_t j = 0; j < cols; ++j) {
    double acc = y[j];
    for (std::int32_t i = 0; i < rows; ++i) acc += a[static_cast<std::int64_t>(i) * cols + j] * x[i];
    y[j] = acc;
  }
}

void matvec_transpose_acc_omp(const double* a, const double* x, double* y, std::int32_t rows,
                              std::int32_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int32_t j = 0; j < cols; ++j) {
    double acc = y[j];
    for (std::int32_t i = 0; i < rows; ++i) acc += a[static_cast<std::int64_t>(i) * cols + j] * x[i];
    y[j] = acc;
  }
}

void outer_acc_serial(double* a, const double* x, const double* y, std::int32_t rows,
                      std::int32_t cols) {
  for (std::int32_t i = 0; i < rows; ++i) {
    double* row = a + static_cast<std::int64_t>(i) * cols;
    const double xi = x[i];
    for (std::int32_t j = 0; j < cols; ++j) row[j] += xi * y[j];
  }
}

void outer_acc_omp(double* a, const double* x, const double* y, std::int32_t rows, std::int32_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int32_t i = 0; i < rows; ++i) {
    double* row = a + static_cast<std::int64_t>(i) * cols;
    const double xi = x[i];
    for (std::int32_t j = 0; j < cols; ++j) row[j] += xi * y[j];
  }
}

void matvec(const double* a, const double* x, const double* b, double* y, std::int32_t rows,
            std::int32_t cols, bool parallel) {
  if (parallel) {
    matvec_omp(a, x, b, y, rows, cols);
  } else {
    matvec_serial(a, x, b, y, rows, cols);
  }
}

void matvec_transpose_acc(const double* a, const double* x, double* y, std::int32_t rows,
                          std::int32_t cols, bool parallel) {
  if (parallel) {
    matvec_transpose_acc_omp(a, x, y, rows, cols);
  } else {
    matvec_transpose_acc_serial(a, x, y, rows, cols);
  }
}

void outer_acc(double* a, const double* x, const double* y, std::int32_t rows, std::int32_t cols,
               bool parallel) {
  if (parallel) {
    outer_acc_omp(a, x, y, rows, cols);
  } else {
    outer_acc_serial(a, x, y, rows, cols);
  }
}

void softmax_inplace(double* x, std::int64_t n) {
  double mx = x[0];
  for (std::int64_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - mx);
    sum += x[i];
  }
  for (std::int64_t i = 0; i < n; ++i) x[i] /= sum;
}

}  // namespace lae2::kernels
